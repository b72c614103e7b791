"""In-memory XML documents and an executor for the XQuery Update subset.

Updates follow snapshot semantics: every expression in a program is evaluated
against the document as it was before the program started, the resulting
update primitives are collected in a :class:`PendingUpdateList`, and only
then applied (insertions first, then deletions, so a node that is both a
deletion victim and an insertion target ends up absent).
"""

from __future__ import annotations

import copy
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional, Union
from xml.sax.saxutils import escape

from .errors import (ExecutionError, UnboundVariable, UnknownCollection,
                     UpdateTargetError, XmlSyntaxError)
from .xquery import (AttrEq, AttrExists, ChildEq, ChildExists, Collection,
                     DeleteNodes, ElemConstructor, For, InsertNodesInto, Let,
                     LiteralText, PathExpr, Return, SelfEq, Sequence,
                     VarRef, VarRoot, XQueryProgram, check_scope)


@dataclass(eq=False)
class Text:
    value: str
    parent: Optional["Element"] = field(default=None, repr=False)


@dataclass(eq=False)
class Element:
    name: str
    attributes: dict = field(default_factory=dict)
    children: list = field(default_factory=list)
    parent: Optional["Element"] = field(default=None, repr=False)

    def append(self, node: "XmlNode") -> "XmlNode":
        node.parent = self
        self.children.append(node)
        return node

    def elements(self, name: Optional[str] = None) -> list["Element"]:
        return [c for c in self.children
                if isinstance(c, Element) and (name is None or c.name == name)]

    def iter(self):
        """Pre-order traversal of this element and its descendant elements."""
        yield self
        for c in self.children:
            if isinstance(c, Element):
                yield from c.iter()


XmlNode = Union[Element, Text]


class AttrNode:
    """Reference to the attribute ``name`` of ``owner``; identity is the pair."""

    __slots__ = ("owner", "name")

    def __init__(self, owner: Element, name: str):
        self.owner = owner
        self.name = name

    def __eq__(self, other):
        return isinstance(other, AttrNode) and other.owner is self.owner and other.name == self.name

    def __hash__(self):
        return hash((id(self.owner), self.name))

    def __repr__(self):
        return f"AttrNode({self.owner.name}/@{self.name})"


class _DocumentNode:
    """The document node returned by ``collection(...)``; its only child is the root."""

    def __init__(self, root: Element):
        self.root = root


def string_value(item) -> str:
    if isinstance(item, Text):
        return item.value
    if isinstance(item, AttrNode):
        return item.owner.attributes.get(item.name, "")
    if isinstance(item, _DocumentNode):
        item = item.root
    parts = []
    stack = [item]
    while stack:
        node = stack.pop()
        if isinstance(node, Text):
            parts.append(node.value)
        else:
            stack.extend(reversed(node.children))
    return "".join(parts)


# -- parsing / serialization -----------------------------------------------

def _convert(et_elem, parent=None) -> Element:
    if "{" in et_elem.tag:
        raise XmlSyntaxError(0, "namespaces are not supported")
    elem = Element(et_elem.tag, dict(et_elem.attrib), [], parent)
    if et_elem.text:
        elem.append(Text(et_elem.text))
    for child in et_elem:
        if not isinstance(child.tag, str):
            continue
        elem.append(_convert(child, elem))
        if child.tail:
            elem.append(Text(child.tail))
    return elem


def parse_xml(text: Union[str, bytes]) -> Element:
    """Parse an XML document into an :class:`Element` tree (the document element)."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line = exc.position[0] if getattr(exc, "position", None) else 0
        raise XmlSyntaxError(line, str(exc)) from None
    return _convert(root)


def serialize_xml(node: XmlNode) -> str:
    if isinstance(node, Text):
        return escape(node.value)
    attrs = "".join(f' {k}="{escape(v, {chr(34): "&quot;"})}"' for k, v in node.attributes.items())
    if not node.children:
        return f"<{node.name}{attrs}/>"
    inner = "".join(serialize_xml(c) for c in node.children)
    return f"<{node.name}{attrs}>{inner}</{node.name}>"


# -- path evaluation -------------------------------------------------------

def _matches(item, pred) -> bool:
    if isinstance(pred, SelfEq):
        return string_value(item) == pred.value
    if not isinstance(item, Element):
        return False
    if isinstance(pred, AttrEq):
        return item.attributes.get(pred.name) == pred.value
    if isinstance(pred, AttrExists):
        return pred.name in item.attributes
    if isinstance(pred, ChildEq):
        return any(string_value(c) == pred.value for c in item.elements(pred.name))
    if isinstance(pred, ChildExists):
        return bool(item.elements(pred.name))
    raise TypeError(f"unknown predicate {pred!r}")


def _document_order(items, doc):
    if len(items) < 2:
        return items
    order = {}
    for i, el in enumerate(doc.iter()):
        order[id(el)] = i

    def key(item):
        if isinstance(item, AttrNode):
            return (order.get(id(item.owner), -1), 1, list(item.owner.attributes).index(item.name)
                    if item.name in item.owner.attributes else 0)
        return (order.get(id(item), -1), 0, 0)
    return sorted(items, key=key)


def eval_path(p: PathExpr, doc: Element, env: Optional[dict] = None,
              collection: Optional[str] = None, context=None) -> list:
    """Evaluate a subset path; returns items in document order without duplicates."""
    env = env or {}
    root = p.root
    if isinstance(root, Collection):
        if collection is not None and root.uri != collection:
            raise UnknownCollection(root.uri)
        items = [_DocumentNode(doc)]
    elif isinstance(root, VarRoot):
        if root.name not in env:
            raise UnboundVariable(root.name)
        items = list(env[root.name])
    else:
        items = [] if context is None else [context]
    for pred in p.root_predicates:
        items = [it for it in items if _matches(it, pred)]
    for step in p.steps:
        out, seen = [], set()
        for it in items:
            if isinstance(it, _DocumentNode):
                candidates = [it.root] if not step.attribute and it.root.name == step.name else []
            elif isinstance(it, Element):
                if step.attribute:
                    candidates = [AttrNode(it, step.name)] if step.name in it.attributes else []
                else:
                    candidates = it.elements(step.name)
            else:
                candidates = []
            for c in candidates:
                key = c if isinstance(c, AttrNode) else id(c)
                if key not in seen:
                    seen.add(key)
                    out.append(c)
        for pred in step.predicates:
            out = [c for c in out if _matches(c, pred)]
        items = _document_order(out, doc) if len(items) > 1 else out
    return items


# -- pending update list and execution -------------------------------------

@dataclass
class PendingUpdateList:
    inserts: list = field(default_factory=list)   # (target element, [nodes])
    deletes: list = field(default_factory=list)   # nodes / AttrNodes

    def apply(self) -> None:
        for target, nodes in self.inserts:
            for node in nodes:
                target.append(copy.deepcopy(node))
        for victim in self.deletes:
            if isinstance(victim, AttrNode):
                victim.owner.attributes.pop(victim.name, None)
                continue
            parent = victim.parent
            if parent is None:
                continue
            for i, child in enumerate(parent.children):
                if child is victim:
                    del parent.children[i]
                    break
            victim.parent = None


def _attached(node, doc) -> bool:
    if isinstance(node, AttrNode):
        node = node.owner
    while node is not None:
        if node is doc:
            return True
        node = node.parent
    return False


class _Evaluator:
    def __init__(self, doc: Element, collection: Optional[str]):
        self.doc = doc
        self.collection = collection
        self.pul = PendingUpdateList()

    def expr(self, e, env) -> list:
        if isinstance(e, PathExpr):
            return eval_path(e, self.doc, env, self.collection)
        if isinstance(e, VarRef):
            if e.name not in env:
                raise UnboundVariable(e.name)
            return list(env[e.name])
        if isinstance(e, Sequence):
            out = []
            for item in e.items:
                out.extend(self.expr(item, env))
            return out
        if isinstance(e, ElemConstructor):
            elem = Element(e.name)
            if isinstance(e.content, LiteralText):
                text = e.content.text
            else:
                values = eval_path(e.content.path, self.doc, env, self.collection)
                if len(values) > 1:
                    raise ExecutionError("fn:string() applied to a sequence of more than one item")
                text = string_value(values[0]) if values else ""
            if text:
                elem.append(Text(text))
            return [elem]
        raise TypeError(f"unknown expression {e!r}")

    def update(self, stmt, env) -> None:
        if isinstance(stmt, DeleteNodes):
            for node in self.expr(stmt.target, env):
                if isinstance(node, _DocumentNode) or node is self.doc:
                    raise ExecutionError("cannot delete the document element")
                if _attached(node, self.doc):
                    self.pul.deletes.append(node)
        elif isinstance(stmt, InsertNodesInto):
            data = self.expr(stmt.data, env)
            if any(isinstance(n, (AttrNode, _DocumentNode)) for n in data):
                raise ExecutionError("only element and text nodes can be inserted")
            targets = self.expr(stmt.target, env)
            if len(targets) != 1 or not isinstance(targets[0], Element):
                raise UpdateTargetError(
                    f"insert target must be exactly one element, got {len(targets)} item(s)")
            self.pul.inserts.append((targets[0], data))
        else:
            raise TypeError(f"not an update statement: {stmt!r}")

    def block(self, clauses, env) -> None:
        if not clauses:
            return
        head, rest = clauses[0], clauses[1:]
        if isinstance(head, Let):
            self.block(rest, {**env, head.var: self.expr(head.expr, env)})
        elif isinstance(head, For):
            for item in self.expr(head.expr, env):
                self.block(rest, {**env, head.var: [item]})
        elif isinstance(head, Return):
            for stmt in head.statements:
                self.update(stmt, env)
        else:
            self.update(head, env)


def execute(program: XQueryProgram, doc: Element, collection: Optional[str] = None) -> Element:
    """Run ``program`` against a copy of ``doc`` and return the updated copy.

    ``doc`` itself is never modified, so a failing program leaves it intact.
    When ``collection`` is given, ``collection(uri)`` roots must name it.
    """
    check_scope(program)
    work = copy.deepcopy(doc)
    ev = _Evaluator(work, collection)
    for block in program.blocks():
        ev.block(block, {})
    ev.pul.apply()
    return work


class XmlStore:
    """A single document registered under a collection URI."""

    def __init__(self, collection: str, document: Element):
        self.collection = collection
        self.document = document

    @classmethod
    def from_file(cls, collection: str, path) -> "XmlStore":
        with open(path, encoding="utf-8") as f:
            return cls(collection, parse_xml(f.read()))

    def execute(self, program: XQueryProgram) -> Element:
        self.document = execute(program, self.document, self.collection)
        return self.document

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(serialize_xml(self.document) + "\n")
