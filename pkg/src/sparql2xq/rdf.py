"""RDF terms, triples, triple patterns and the update AST."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

_VAR_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_WHITESPACE = re.compile(r"\s")


@dataclass(frozen=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value or _WHITESPACE.search(self.value):
            raise ValueError(f"invalid IRI {self.value!r}")

    def __str__(self):
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str

    def __str__(self):
        return '"' + escape_string(self.lexical) + '"'


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VAR_NAME.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self):
        return f"?{self.name}"


RdfTerm = Union[Iri, Literal, Variable]


def escape_string(s: str) -> str:
    """Escape a lexical form for use inside a double-quoted SPARQL/N-Triples string."""
    return (s.replace("\\", "\\\\").replace('"', '\\"')
             .replace("\n", "\\n").replace("\r", "\\r"))


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Union[Iri, Literal]

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise ValueError("triple subject must be an IRI")
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal)):
            raise ValueError("triple object must be an IRI or literal")

    def __str__(self):
        return f"{self.subject} {self.predicate} {self.object} ."


@dataclass(frozen=True)
class TriplePattern:
    subject: Union[Iri, Variable]
    predicate: Iri
    object: RdfTerm

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, Variable)):
            raise ValueError("pattern subject must be an IRI or variable")
        if not isinstance(self.predicate, Iri):
            raise ValueError("pattern predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal, Variable)):
            raise ValueError("pattern object must be an RDF term")

    @property
    def is_ground(self) -> bool:
        return not isinstance(self.subject, Variable) and not isinstance(self.object, Variable)

    def __str__(self):
        return f"{self.subject} {self.predicate} {self.object} ."


@dataclass(frozen=True)
class GraphPattern:
    patterns: tuple[TriplePattern, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)


def variables_of(patterns) -> set[str]:
    """Names of all variables occurring in ``patterns`` (a GraphPattern or iterable of patterns)."""
    names = set()
    for tp in patterns:
        for term in (tp.subject, tp.predicate, tp.object):
            if isinstance(term, Variable):
                names.add(term.name)
    return names


@dataclass(frozen=True)
class DeleteData:
    triples: tuple[Triple, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))
        for t in self.triples:
            if not isinstance(t, Triple):
                raise ValueError("DELETE DATA accepts ground triples only")


@dataclass(frozen=True)
class InsertData:
    triples: tuple[Triple, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))
        for t in self.triples:
            if not isinstance(t, Triple):
                raise ValueError("INSERT DATA accepts ground triples only")


@dataclass(frozen=True)
class DeleteInsertWhere:
    delete_template: Optional[tuple[TriplePattern, ...]]
    insert_template: Optional[tuple[TriplePattern, ...]]
    where: GraphPattern

    def __post_init__(self):
        for attr in ("delete_template", "insert_template"):
            value = getattr(self, attr)
            if value is not None:
                object.__setattr__(self, attr, tuple(value))
        if not isinstance(self.where, GraphPattern):
            object.__setattr__(self, "where", GraphPattern(tuple(self.where)))
        if not (self.delete_template or self.insert_template):
            raise ValueError("DELETE/INSERT needs a non-empty delete or insert template")
        if not self.where.patterns:
            raise ValueError("WHERE clause must not be empty")
        unbound = self.template_variables() - variables_of(self.where)
        if unbound:
            raise ValueError("template variables not bound by WHERE: "
                             + ", ".join(sorted("?" + v for v in unbound)))

    def template_variables(self) -> set[str]:
        return variables_of((self.delete_template or ()) + (self.insert_template or ()))


UpdateOperation = Union[DeleteData, InsertData, DeleteInsertWhere]
