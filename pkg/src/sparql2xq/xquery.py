"""AST, canonical serializer and tokenizer for the emitted XQuery Update subset.

The subset covers ``let``/``for``/``return`` clauses, ``delete nodes``,
``insert nodes ... into``, direct element constructors and simple location
paths rooted at ``collection("uri")`` or a variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ScopeError

# -- paths -----------------------------------------------------------------


@dataclass(frozen=True)
class Collection:
    uri: str


@dataclass(frozen=True)
class VarRoot:
    name: str


@dataclass(frozen=True)
class ContextNode:
    pass


@dataclass(frozen=True)
class AttrEq:
    name: str
    value: str


@dataclass(frozen=True)
class AttrExists:
    name: str


@dataclass(frozen=True)
class ChildEq:
    name: str
    value: str


@dataclass(frozen=True)
class ChildExists:
    name: str


@dataclass(frozen=True)
class SelfEq:
    value: str


Predicate = Union[AttrEq, AttrExists, ChildEq, ChildExists, SelfEq]


@dataclass(frozen=True)
class Step:
    name: str
    attribute: bool = False
    predicates: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class PathExpr:
    root: Union[Collection, VarRoot, ContextNode]
    steps: tuple[Step, ...] = ()
    root_predicates: tuple[Predicate, ...] = ()

    def child(self, name, *predicates) -> "PathExpr":
        return PathExpr(self.root, self.steps + (Step(name, False, tuple(predicates)),),
                        self.root_predicates)

    def attribute(self, name, *predicates) -> "PathExpr":
        return PathExpr(self.root, self.steps + (Step(name, True, tuple(predicates)),),
                        self.root_predicates)

    def where(self, *predicates) -> "PathExpr":
        """Append predicates to the last step (or to the root when there are no steps)."""
        if not self.steps:
            return PathExpr(self.root, (), self.root_predicates + tuple(predicates))
        last = self.steps[-1]
        last = Step(last.name, last.attribute, last.predicates + tuple(predicates))
        return PathExpr(self.root, self.steps[:-1] + (last,), self.root_predicates)


# -- expressions and statements --------------------------------------------


@dataclass(frozen=True)
class LiteralText:
    text: str


@dataclass(frozen=True)
class StringOf:
    path: PathExpr


@dataclass(frozen=True)
class ElemConstructor:
    name: str
    content: Union[LiteralText, StringOf]


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class Sequence:
    items: tuple

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))


XQueryExpr = Union[PathExpr, Sequence, ElemConstructor, VarRef]


@dataclass(frozen=True)
class Let:
    var: str
    expr: XQueryExpr


@dataclass(frozen=True)
class For:
    var: str
    expr: XQueryExpr


@dataclass(frozen=True)
class DeleteNodes:
    target: XQueryExpr


@dataclass(frozen=True)
class InsertNodesInto:
    data: XQueryExpr
    target: XQueryExpr


@dataclass(frozen=True)
class Return:
    statements: tuple

    def __post_init__(self):
        object.__setattr__(self, "statements", tuple(self.statements))


XQueryStatement = Union[Let, For, DeleteNodes, InsertNodesInto, Return]


@dataclass(frozen=True)
class XQueryProgram:
    statements: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "statements", tuple(self.statements))

    def __add__(self, other: "XQueryProgram") -> "XQueryProgram":
        return XQueryProgram(self.statements + other.statements)

    def blocks(self):
        """Split into FLWOR blocks: clauses up to and including a Return, or a bare update."""
        current = []
        for stmt in self.statements:
            current.append(stmt)
            if isinstance(stmt, (Return, DeleteNodes, InsertNodesInto)):
                yield tuple(current)
                current = []
        if current:
            yield tuple(current)


# -- serialization ---------------------------------------------------------

_NUMERIC = re.compile(r"\d+(?:\.\d+)?\Z")


def quote(value: str) -> str:
    return '"' + value.replace("&", "&amp;").replace('"', '""') + '"'


def _content_text(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
                .replace("{", "{{").replace("}", "}}"))


def _predicate(p: Predicate) -> str:
    if isinstance(p, AttrEq):
        value = p.value if _NUMERIC.match(p.value) else quote(p.value)
        return f"[@{p.name}={value}]"
    if isinstance(p, AttrExists):
        return f"[@{p.name}]"
    if isinstance(p, ChildEq):
        return f"[./{p.name}={quote(p.value)}]"
    if isinstance(p, ChildExists):
        return f"[./{p.name}]"
    if isinstance(p, SelfEq):
        return f"[.= {quote(p.value)}]"
    raise TypeError(f"not a predicate: {p!r}")


def _path(p: PathExpr) -> str:
    root = p.root
    if isinstance(root, Collection):
        out = f"collection({quote(root.uri)})"
    elif isinstance(root, VarRoot):
        out = f"${root.name}"
    else:
        out = "."
    out += "".join(_predicate(pr) for pr in p.root_predicates)
    for step in p.steps:
        out += "/" + ("@" if step.attribute else "") + step.name
        out += "".join(_predicate(pr) for pr in step.predicates)
    return out


def _expr(e) -> str:
    if isinstance(e, PathExpr):
        return _path(e)
    if isinstance(e, VarRef):
        return f"${e.name}"
    if isinstance(e, Sequence):
        return "(" + ", ".join(_expr(i) for i in e.items) + ")"
    if isinstance(e, ElemConstructor):
        if isinstance(e.content, StringOf):
            body = "{fn:string(" + _path(e.content.path) + ")}"
        else:
            body = _content_text(e.content.text)
        return f"<{e.name}>{body}</{e.name}>"
    raise TypeError(f"not an XQuery expression: {e!r}")


def _update(s) -> str:
    if isinstance(s, DeleteNodes):
        return "delete nodes " + _expr(s.target)
    if isinstance(s, InsertNodesInto):
        return f"insert nodes {_expr(s.data)} into {_expr(s.target)}"
    raise TypeError(f"only update statements may appear in return: {s!r}")


def _statement(s) -> str:
    if isinstance(s, Let):
        return f"let ${s.var} := {_expr(s.expr)}"
    if isinstance(s, For):
        return f"for ${s.var} in {_expr(s.expr)}"
    if isinstance(s, Return):
        if len(s.statements) == 1:
            return "return " + _update(s.statements[0])
        return "return (" + ", ".join(_update(x) for x in s.statements) + ")"
    return _update(s)


def _referenced_vars(node):
    if isinstance(node, VarRef):
        yield node.name
    elif isinstance(node, PathExpr):
        if isinstance(node.root, VarRoot):
            yield node.root.name
    elif isinstance(node, Sequence):
        for item in node.items:
            yield from _referenced_vars(item)
    elif isinstance(node, ElemConstructor):
        if isinstance(node.content, StringOf):
            yield from _referenced_vars(node.content.path)
    elif isinstance(node, (Let, For)):
        yield from _referenced_vars(node.expr)
    elif isinstance(node, DeleteNodes):
        yield from _referenced_vars(node.target)
    elif isinstance(node, InsertNodesInto):
        yield from _referenced_vars(node.data)
        yield from _referenced_vars(node.target)
    elif isinstance(node, Return):
        for s in node.statements:
            yield from _referenced_vars(s)


def check_scope(program: XQueryProgram) -> None:
    """Raise ScopeError for a variable used before any binding in its FLWOR block."""
    for block in program.blocks():
        bound = set()
        for stmt in block:
            for name in _referenced_vars(stmt):
                if name not in bound:
                    raise ScopeError(name)
            if isinstance(stmt, (Let, For)):
                bound.add(stmt.var)


def serialize(program: XQueryProgram) -> str:
    check_scope(program)
    return "\n".join(_statement(s) for s in program.statements)


# -- tokenizer -------------------------------------------------------------

_EXPR_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"]|"")*"|'(?:[^']|'')*')
  | (?P<endtag></[A-Za-z_][\w.\-]*\s*>)
  | (?P<starttag><[A-Za-z_][\w.\-]*\s*>)
  | (?P<assign>:=)
  | (?P<var>\$[A-Za-z_][\w.\-]*)
  | (?P<name>[A-Za-z_][\w\-]*(?:\.[\w\-]+)*(?::[A-Za-z_][\w\-]*(?:\.[\w\-]+)*)?)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<char>.)
""", re.VERBOSE | re.DOTALL)

_CONTENT = re.compile(r"(?:[^<{}]|\{\{|\}\})+")


def tokenize(text: str) -> list[str]:
    """Whitespace-insensitive lexical tokens of XQuery subset text.

    Element content between tags is one token, kept verbatim; characters outside the subset
    come back as single-character tokens.
    """
    tokens: list[str] = []
    # stack of modes: "expr" or "content"
    modes = ["expr"]
    pos = 0
    while pos < len(text):
        if modes[-1] == "content":
            m = _CONTENT.match(text, pos)
            if m:
                tokens.append(m.group())
                pos = m.end()
                continue
            ch = text[pos]
            if ch == "{":
                tokens.append("{")
                modes.append("expr")
                pos += 1
                continue
            m = _EXPR_TOKEN.match(text, pos)
            if m.lastgroup == "endtag":
                tokens.append(re.sub(r"\s+", "", m.group()))
                modes.pop()
            elif m.lastgroup == "starttag":
                tokens.append(re.sub(r"\s+", "", m.group()))
                modes.append("content")
            else:
                tokens.append(text[pos])
                m = None
            pos = m.end() if m else pos + 1
            continue
        m = _EXPR_TOKEN.match(text, pos)
        kind = m.lastgroup
        pos = m.end()
        if kind == "ws":
            continue
        tok = m.group()
        if kind in ("starttag", "endtag"):
            tok = re.sub(r"\s+", "", tok)
        tokens.append(tok)
        if kind == "starttag":
            modes.append("content")
        elif kind == "endtag" and len(modes) > 1:
            modes.pop()
        elif tok == "}" and len(modes) > 1:
            modes.pop()
    return tokens

