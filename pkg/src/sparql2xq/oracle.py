"""Reference semantics on the RDF side, used to check translations end to end.

The oracle projects an XML document to the triples it represents under a
mapping set, applies an update with plain SPARQL semantics to that triple
set, and compares the outcome with the projection of the translated program's
result.  It deliberately re-implements path matching and pattern matching
instead of reusing the translator or the XQuery executor.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

from .errors import Sparql2XQError
from .mapping import MappingSet, PropertyKind, parse_instance_path
from .rdf import (DeleteData, InsertData, Iri, Literal, Triple,
                  UpdateOperation, Variable, escape_string)
from .translator import translate
from .xmlstore import Element, Text, execute

TripleSet = frozenset


def _text(elem: Element) -> str:
    out = []

    def walk(node):
        for c in node.children:
            if isinstance(c, Text):
                out.append(c.value)
            else:
                walk(c)
    walk(elem)
    return "".join(out)


def _nodes_at(doc: Element, names, attr_filters=None) -> list[Element]:
    """Elements reached from the document node by child steps ``names``."""
    attr_filters = attr_filters or [()] * len(names)
    level = [doc] if doc.name == names[0] and _attrs_ok(doc, attr_filters[0]) else []
    for name, filters in zip(names[1:], attr_filters[1:]):
        level = [c for node in level for c in node.children
                 if isinstance(c, Element) and c.name == name and _attrs_ok(c, filters)]
    return level


def _attrs_ok(elem: Element, filters) -> bool:
    return all(elem.attributes.get(n) == v for n, v in filters)


def project(doc: Element, ms: MappingSet) -> TripleSet:
    """The triple view of ``doc`` under ``ms``."""
    triples = set()
    for cm in ms.class_mappings:
        names = cm.xml_path.strip("/").split("/")
        nodes = _nodes_at(doc, names)
        if not nodes:
            continue
        subject_of = {}
        for im in ms.instance_mappings:
            steps = parse_instance_path(im.xml_path)
            if [s.name for s in steps] != names:
                continue
            for node in _nodes_at(doc, names, [s.attributes for s in steps]):
                subject_of.setdefault(id(node), im.iri)
        props = ms.properties_of(cm.class_iri)
        for index, node in enumerate(nodes, start=1):
            iri = subject_of.get(id(node), f"urn:node:{cm.local_name}:{index}")
            subject = Iri(iri)
            for pm in props:
                if pm.kind is PropertyKind.ATTRIBUTE:
                    values = [node.attributes[pm.xml_name]] if pm.xml_name in node.attributes else []
                else:
                    values = [_text(c) for c in node.children
                              if isinstance(c, Element) and c.name == pm.xml_name]
                for v in values:
                    triples.add(Triple(subject, Iri(pm.property_iri), Literal(v)))
    return frozenset(triples)


def _match_bgp(patterns, ts) -> list[dict]:
    """All solutions of a basic graph pattern over ``ts`` by nested enumeration."""
    solutions = [{}]
    for tp in patterns:
        extended = []
        for sol in solutions:
            for t in ts:
                binding = dict(sol)
                if all(_unify(term, value, binding) for term, value in
                       ((tp.subject, t.subject), (tp.predicate, t.predicate), (tp.object, t.object))):
                    extended.append(binding)
        solutions = extended
    return solutions


def _unify(term, value, binding) -> bool:
    if isinstance(term, Variable):
        bound = binding.get(term.name)
        if bound is None:
            binding[term.name] = value
            return True
        return bound == value
    return term == value


def _instantiate(template, solution) -> Optional[Triple]:
    terms = [solution.get(t.name) if isinstance(t, Variable) else t
             for t in (template.subject, template.predicate, template.object)]
    try:
        return Triple(*terms)
    except ValueError:
        # unbound or ill-typed instantiation (e.g. literal subject): skipped per SPARQL
        return None


def apply_sparql(op: UpdateOperation, ts) -> TripleSet:
    ts = frozenset(ts)
    if isinstance(op, DeleteData):
        return ts - set(op.triples)
    if isinstance(op, InsertData):
        return ts | set(op.triples)
    solutions = _match_bgp(op.where.patterns, ts)
    removed = {t for sol, tp in itertools.product(solutions, op.delete_template or ())
               if (t := _instantiate(tp, sol)) is not None}
    added = {t for sol, tp in itertools.product(solutions, op.insert_template or ())
             if (t := _instantiate(tp, sol)) is not None}
    return (ts - removed) | added


class Status(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    ERROR = "ERROR"


@dataclass
class Verdict:
    status: Status
    expected: TripleSet = field(default_factory=frozenset)
    actual: TripleSet = field(default_factory=frozenset)
    cause: Optional[BaseException] = None
    # updated document produced by the translated program, for chaining steps
    document: Optional[Element] = None

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @property
    def missing(self) -> TripleSet:
        return self.expected - self.actual

    @property
    def unexpected(self) -> TripleSet:
        return self.actual - self.expected

    def report(self) -> str:
        lines = [self.status.value]
        if self.status is Status.ERROR:
            lines.append(f"# {type(self.cause).__name__}: {self.cause}")
        elif self.status is Status.FAIL:
            lines.append("# expected but missing:")
            lines.extend(ntriple(t) for t in sorted(self.missing, key=ntriple))
            lines.append("# present but not expected:")
            lines.extend(ntriple(t) for t in sorted(self.unexpected, key=ntriple))
        return "\n".join(lines) + "\n"


def ntriple(t: Triple) -> str:
    obj = (f"<{t.object.value}>" if isinstance(t.object, Iri)
           else '"' + escape_string(t.object.lexical) + '"')
    return f"<{t.subject.value}> <{t.predicate.value}> {obj} ."


def check_equivalence(op: UpdateOperation, ms: MappingSet, doc: Element) -> Verdict:
    """Compare translate-then-execute against SPARQL semantics on the projection."""
    before = project(doc, ms)
    expected = apply_sparql(op, before)
    try:
        updated = execute(translate(op, ms), doc, ms.collection_iri)
    except Sparql2XQError as exc:
        return Verdict(Status.ERROR, expected, frozenset(), exc)
    actual = project(updated, ms)
    status = Status.PASS if actual == expected else Status.FAIL
    return Verdict(status, expected, actual, document=updated)
