"""Parser for the SPARQL 1.1 Update subset handled by the translator.

Accepted forms (keywords are case-insensitive)::

    PREFIX ns: <http://ns.gr/#>
    DELETE DATA { triples }
    INSERT DATA { triples }
    DELETE { patterns } WHERE { patterns }
    INSERT { patterns } WHERE { patterns }
    DELETE { patterns } INSERT { patterns } WHERE { patterns }

Constructs that are valid SPARQL but outside the subset (GRAPH, WITH, USING,
FILTER, blank nodes, typed literals, operation sequences, ...) raise
:class:`UnsupportedFeature`; everything else that does not parse raises
:class:`SparqlSyntaxError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .errors import SparqlSyntaxError, UnknownPrefix, UnsupportedFeature
from .rdf import (DeleteData, DeleteInsertWhere, GraphPattern, InsertData, Iri,
                  Literal, Triple, TriplePattern, UpdateOperation, Variable,
                  variables_of)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

_PREFIX_LABEL = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")
_ABSOLUTE_IRI = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n\r]|\\.)*")
  | (?P<badstring>["'])
  | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<bnode>_:[A-Za-z0-9_][A-Za-z0-9_.\-]*)
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_.\-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<langtag>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<typemark>\^\^)
  | (?P<punct>[{}().;,\[\]])
""", re.VERBOSE)

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
          '"': '"', "'": "'", "\\": "\\"}

# Keywords that are legitimate SPARQL but deliberately unsupported.
_UNSUPPORTED_OPERATIONS = {"LOAD", "CLEAR", "CREATE", "DROP", "COPY", "MOVE", "ADD"}
_UNSUPPORTED_IN_BLOCK = {"GRAPH", "FILTER", "OPTIONAL", "UNION", "MINUS", "BIND",
                         "VALUES", "SERVICE"}


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Prologue:
    prefixes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ParsedUpdate:
    prologue: Prologue
    operation: UpdateOperation


def _tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise SparqlSyntaxError(line, column, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == "badstring":
            raise SparqlSyntaxError(line, column, "unterminated or unsupported string literal")
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, column))
        chunk = m.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _unescape(tok: Token) -> str:
    body = tok.text[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ECHAR:
                raise SparqlSyntaxError(tok.line, tok.column + i + 1, f"invalid escape \\{nxt}")
            out.append(_ECHAR[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}

    # -- token helpers ------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.tok
        return SparqlSyntaxError(tok.line, tok.column, message)

    def is_keyword(self, word, tok=None) -> bool:
        tok = tok or self.tok
        return tok.kind == "word" and tok.text.upper() == word

    def expect_keyword(self, word):
        if not self.is_keyword(word):
            raise self.error(f"expected {word}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def expect_punct(self, ch):
        if not (self.tok.kind == "punct" and self.tok.text == ch):
            raise self.error(f"expected {ch!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def at_punct(self, ch) -> bool:
        return self.tok.kind == "punct" and self.tok.text == ch

    # -- grammar ------------------------------------------------------------
    def parse(self) -> ParsedUpdate:
        self.prologue()
        op = self.operation()
        if self.at_punct(";"):
            raise UnsupportedFeature("operation sequence")
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after update operation")
        return ParsedUpdate(Prologue(dict(self.prefixes)), op)

    def prologue(self):
        while True:
            if self.is_keyword("BASE"):
                raise UnsupportedFeature("BASE")
            if not self.is_keyword("PREFIX"):
                return
            self.advance()
            tok = self.advance()
            if tok.kind != "pname" or not tok.text.endswith(":") or tok.text.count(":") != 1:
                raise self.error("expected prefix label followed by ':'", tok)
            label = tok.text[:-1]
            if not _PREFIX_LABEL.match(label):
                raise self.error(f"invalid prefix label {label!r}", tok)
            iri_tok = self.advance()
            if iri_tok.kind != "iri":
                raise self.error("expected namespace IRI", iri_tok)
            self.prefixes[label] = self.iri_value(iri_tok)

    def operation(self) -> UpdateOperation:
        tok = self.tok
        if tok.kind == "word":
            word = tok.text.upper()
            if word in _UNSUPPORTED_OPERATIONS:
                raise UnsupportedFeature(f"graph management ({word})")
            if word == "WITH":
                raise UnsupportedFeature("WITH")
            if word == "DELETE":
                self.advance()
                if self.is_keyword("DATA"):
                    self.advance()
                    return DeleteData(self.data_block())
                if self.is_keyword("WHERE"):
                    raise UnsupportedFeature("DELETE WHERE shorthand")
                delete = self.template_block()
                insert = None
                if self.is_keyword("INSERT"):
                    self.advance()
                    insert = self.template_block()
                return self.finish_modify(delete, insert, tok)
            if word == "INSERT":
                self.advance()
                if self.is_keyword("DATA"):
                    self.advance()
                    return InsertData(self.data_block())
                insert = self.template_block()
                return self.finish_modify(None, insert, tok)
        raise self.error("expected DELETE or INSERT")

    def finish_modify(self, delete, insert, start) -> DeleteInsertWhere:
        if self.is_keyword("USING"):
            raise UnsupportedFeature("USING")
        self.expect_keyword("WHERE")
        where = self.template_block()
        if not where:
            raise self.error("WHERE clause must contain at least one triple pattern", start)
        if not delete and not insert:
            raise self.error("DELETE/INSERT templates are both empty", start)
        unbound = variables_of((delete or []) + (insert or [])) - variables_of(where)
        if unbound:
            raise UnsupportedFeature("unbound template variable "
                                     + ", ".join(sorted("?" + v for v in unbound)))
        return DeleteInsertWhere(
            tuple(delete) if delete is not None else None,
            tuple(insert) if insert is not None else None,
            GraphPattern(tuple(where)))

    def data_block(self) -> list[Triple]:
        triples = []
        for subject, predicate, obj, tok in self.block():
            if isinstance(subject, Variable) or isinstance(obj, Variable):
                raise self.error("variables are not allowed in DATA blocks", tok)
            triples.append(Triple(subject, predicate, obj))
        return triples

    def template_block(self) -> list[TriplePattern]:
        return [TriplePattern(s, p, o) for s, p, o, _ in self.block()]

    def block(self):
        self.expect_punct("{")
        rows = []
        while not self.at_punct("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated '{' block")
            start = self.tok
            if self.tok.kind == "word" and self.tok.text.upper() in _UNSUPPORTED_IN_BLOCK:
                raise UnsupportedFeature(self.tok.text.upper())
            if self.at_punct("{"):
                raise UnsupportedFeature("nested group graph pattern")
            subject = self.term("subject")
            predicate = self.term("predicate")
            obj = self.term("object")
            rows.append((subject, predicate, obj, start))
            if self.at_punct(";") or self.at_punct(","):
                raise UnsupportedFeature("predicate-object list")
            if self.at_punct("."):
                self.advance()
            elif self.tok.kind == "word" and self.tok.text.upper() in _UNSUPPORTED_IN_BLOCK:
                raise UnsupportedFeature(self.tok.text.upper())
            elif not self.at_punct("}"):
                raise self.error(f"expected '.' or '}}', found {self.tok.text or 'end of input'!r}")
        self.advance()
        return rows

    def term(self, position):
        tok = self.tok
        kind = tok.kind
        if kind == "bnode" or (kind == "punct" and tok.text == "["):
            raise UnsupportedFeature("blank node")
        if kind == "iri":
            self.advance()
            return Iri(self.iri_value(tok))
        if kind == "pname":
            self.advance()
            return Iri(self.expand(tok))
        if kind == "var":
            if tok.text[0] == "$":
                raise self.error("variables are written ?name", tok)
            if position == "predicate":
                raise UnsupportedFeature("variable predicate")
            self.advance()
            return Variable(tok.text[1:])
        if kind == "string":
            if position != "object":
                raise self.error(f"literal not allowed as {position}", tok)
            self.advance()
            if self.tok.kind in ("langtag", "typemark"):
                raise UnsupportedFeature("unsupported literal form")
            return Literal(_unescape(tok))
        if kind == "number" or (kind == "word" and tok.text in ("true", "false")):
            if position == "object":
                raise UnsupportedFeature("unsupported literal form")
            raise self.error(f"literal not allowed as {position}", tok)
        if kind == "word" and tok.text == "a" and position == "predicate":
            self.advance()
            return Iri(RDF_TYPE)
        raise self.error(f"expected {position}, found {tok.text or 'end of input'!r}", tok)

    def iri_value(self, tok) -> str:
        value = tok.text[1:-1]
        if not value:
            raise self.error("empty IRI", tok)
        if not _ABSOLUTE_IRI.match(value):
            raise UnsupportedFeature("relative IRI")
        return value

    def expand(self, tok) -> str:
        label, _, local = tok.text.partition(":")
        if label not in self.prefixes:
            raise UnknownPrefix(label, tok.line, tok.column)
        return self.prefixes[label] + local


def parse_update(text: Union[str, bytes]) -> ParsedUpdate:
    """Parse one SPARQL update operation, expanding prefixed names to absolute IRIs."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SparqlSyntaxError(1, exc.start + 1, "input is not valid UTF-8") from None
    return _Parser(text).parse()


def _template(patterns) -> str:
    return "{ " + " ".join(str(p) for p in patterns) + " }"


def to_sparql(update: Union[ParsedUpdate, UpdateOperation]) -> str:
    """Canonical SPARQL text for an update; IRIs are always written in full."""
    if isinstance(update, ParsedUpdate):
        lines = [f"PREFIX {label}: <{ns}>" for label, ns in update.prologue.prefixes.items()]
        op = update.operation
    else:
        lines, op = [], update
    if isinstance(op, DeleteData):
        lines.append("DELETE DATA " + _template(op.triples))
    elif isinstance(op, InsertData):
        lines.append("INSERT DATA " + _template(op.triples))
    else:
        parts = []
        if op.delete_template is not None:
            parts.append("DELETE " + _template(op.delete_template))
        if op.insert_template is not None:
            parts.append("INSERT " + _template(op.insert_template))
        parts.append("WHERE " + _template(op.where.patterns))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_update_operation(text) -> UpdateOperation:
    return parse_update(text).operation


__all__ = ["Prologue", "ParsedUpdate", "parse_update", "parse_update_operation", "to_sparql"]
