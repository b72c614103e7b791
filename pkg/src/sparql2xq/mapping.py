"""RDF-to-XML mapping model and its JSON loader.

A mapping file looks like::

    {"collection": "http://xml.gr",
     "namespaces": {"ns": "http://ns.gr/#"},
     "class_mappings": [{"class": "ns:Student", "xml_type": "Student_type",
                         "path": "/Persons/Student"}],
     "property_mappings": [{"property": "ns:FName", "class": "ns:Student",
                            "xml": "FirstName", "kind": "element"}],
     "instance_mappings": [{"iri": "http://rdf.gr/person1209",
                            "path": "/Persons/Student[@SSN=1209]"}]}
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from typing import Optional

from .errors import (AmbiguousClass, MappingConsistencyError, MappingFormatError,
                     UnmappedInstance, UnmappedProperty)
from .rdf import Iri, Variable

NCNAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")
_CHILD_PATH = re.compile(r"(?:/[A-Za-z_][A-Za-z0-9_.\-]*)+\Z")
_INSTANCE_STEP = re.compile(
    r"/(?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)"
    r"(?P<preds>(?:\[@[A-Za-z_][A-Za-z0-9_.\-]*=(?:\"[^\"]*\"|'[^']*'|[^\]\"'\s]+)\])*)")
_INSTANCE_PRED = re.compile(
    r"\[@(?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)=(?:\"(?P<dq>[^\"]*)\"|'(?P<sq>[^']*)'|(?P<bare>[^\]\"'\s]+))\]")
_SCHEME = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:")


class PropertyKind(enum.Enum):
    ELEMENT = "element"
    ATTRIBUTE = "attribute"


@dataclass(frozen=True)
class InstanceStep:
    """One ``/name[@a=v]...`` step of an instance path."""
    name: str
    attributes: tuple[tuple[str, str], ...] = ()
    quoted: tuple[bool, ...] = ()


@dataclass(frozen=True)
class ClassMapping:
    class_iri: str
    xml_path: str
    xml_type_name: str = ""

    @property
    def steps(self) -> tuple[str, ...]:
        return tuple(self.xml_path.strip("/").split("/"))

    @property
    def local_name(self) -> str:
        return re.split(r"[#/:]", self.class_iri.rstrip("#/"))[-1] or "node"


@dataclass(frozen=True)
class PropertyMapping:
    property_iri: str
    class_iri: str
    xml_name: str
    kind: PropertyKind = PropertyKind.ELEMENT


@dataclass(frozen=True)
class InstanceMapping:
    iri: str
    xml_path: str

    @property
    def steps(self) -> tuple[InstanceStep, ...]:
        return parse_instance_path(self.xml_path)

    @property
    def class_path(self) -> str:
        return "".join("/" + s.name for s in self.steps)


@dataclass(frozen=True)
class MappingSet:
    collection_iri: str
    class_mappings: tuple[ClassMapping, ...] = ()
    property_mappings: tuple[PropertyMapping, ...] = ()
    instance_mappings: tuple[InstanceMapping, ...] = ()

    def __post_init__(self):
        for attr in ("class_mappings", "property_mappings", "instance_mappings"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        validate(self)

    def class_by_iri(self, class_iri: str) -> Optional[ClassMapping]:
        for cm in self.class_mappings:
            if cm.class_iri == class_iri:
                return cm
        return None

    def class_by_path(self, path: str) -> Optional[ClassMapping]:
        for cm in self.class_mappings:
            if cm.xml_path == path:
                return cm
        return None

    def properties_of(self, class_iri: str) -> list[PropertyMapping]:
        return [pm for pm in self.property_mappings if pm.class_iri == class_iri]


def parse_instance_path(path: str) -> tuple[InstanceStep, ...]:
    """Split ``/Persons/Student[@SSN=1209]`` into steps; raise ValueError if malformed."""
    steps = []
    pos = 0
    while pos < len(path):
        m = _INSTANCE_STEP.match(path, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"malformed instance path {path!r}")
        attrs, quoted = [], []
        for pm in _INSTANCE_PRED.finditer(m.group("preds")):
            if pm.group("bare") is not None:
                attrs.append((pm.group("name"), pm.group("bare")))
                quoted.append(False)
            else:
                value = pm.group("dq") if pm.group("dq") is not None else pm.group("sq")
                attrs.append((pm.group("name"), value))
                quoted.append(True)
        steps.append(InstanceStep(m.group("name"), tuple(attrs), tuple(quoted)))
        pos = m.end()
    if not steps:
        raise ValueError(f"malformed instance path {path!r}")
    return tuple(steps)


def validate(ms: MappingSet) -> None:
    """Check the cross-reference invariants of a mapping set."""
    class_iris = set()
    for cm in ms.class_mappings:
        if not _CHILD_PATH.match(cm.xml_path):
            raise MappingConsistencyError(
                f"class path {cm.xml_path!r} must be absolute with child steps only")
        if cm.class_iri in class_iris:
            raise MappingConsistencyError(f"class <{cm.class_iri}> mapped twice")
        class_iris.add(cm.class_iri)
    seen = set()
    for pm in ms.property_mappings:
        if pm.class_iri not in class_iris:
            raise MappingConsistencyError(
                f"property <{pm.property_iri}> references undeclared class <{pm.class_iri}>")
        if not NCNAME.match(pm.xml_name):
            raise MappingConsistencyError(f"{pm.xml_name!r} is not a valid XML name")
        key = (pm.property_iri, pm.class_iri)
        if key in seen:
            raise MappingConsistencyError(
                f"property <{pm.property_iri}> mapped twice for class <{pm.class_iri}>")
        seen.add(key)
    class_paths = {cm.xml_path for cm in ms.class_mappings}
    for im in ms.instance_mappings:
        try:
            prefix = im.class_path
        except ValueError as exc:
            raise MappingConsistencyError(str(exc)) from None
        if prefix not in class_paths:
            raise MappingConsistencyError(
                f"instance <{im.iri}> path {im.xml_path!r} matches no class path")


def _expand(value, namespaces, where) -> str:
    if not isinstance(value, str) or not value:
        raise MappingFormatError(where, "expected a non-empty string")
    label, sep, local = value.partition(":")
    if sep and label in namespaces:
        value = namespaces[label] + local
    elif not _SCHEME.match(value):
        raise MappingFormatError(where, f"{value!r} is neither an absolute IRI nor a known prefixed name")
    try:
        Iri(value)
    except ValueError as exc:
        raise MappingFormatError(where, str(exc)) from None
    return value


def _string(entry, key, where) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise MappingFormatError(f"{where}.{key}", "expected a non-empty string")
    return value


def _entries(doc, key):
    value = doc.get(key, [])
    if not isinstance(value, list):
        raise MappingFormatError(f"$.{key}", "expected a list")
    for i, entry in enumerate(value):
        if not isinstance(entry, dict):
            raise MappingFormatError(f"$.{key}[{i}]", "expected an object")
        yield f"$.{key}[{i}]", entry


def load_mappings(text: str) -> MappingSet:
    """Parse and validate a JSON mapping document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MappingFormatError("$", f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise MappingFormatError("$", "expected a JSON object")
    collection = doc.get("collection")
    if not isinstance(collection, str) or not collection:
        raise MappingFormatError("$.collection", "expected a non-empty string")
    namespaces = doc.get("namespaces", {})
    if not isinstance(namespaces, dict) or not all(
            isinstance(v, str) and v for v in namespaces.values()):
        raise MappingFormatError("$.namespaces", "expected an object of prefix -> IRI strings")

    classes = []
    for where, entry in _entries(doc, "class_mappings"):
        classes.append(ClassMapping(
            class_iri=_expand(entry.get("class"), namespaces, f"{where}.class"),
            xml_path=_string(entry, "path", where),
            xml_type_name=entry.get("xml_type", "") or ""))
    properties = []
    for where, entry in _entries(doc, "property_mappings"):
        kind = entry.get("kind", "element")
        try:
            kind = PropertyKind(kind)
        except ValueError:
            raise MappingFormatError(f"{where}.kind", "expected 'element' or 'attribute'") from None
        properties.append(PropertyMapping(
            property_iri=_expand(entry.get("property"), namespaces, f"{where}.property"),
            class_iri=_expand(entry.get("class"), namespaces, f"{where}.class"),
            xml_name=_string(entry, "xml", where),
            kind=kind))
    instances = []
    for where, entry in _entries(doc, "instance_mappings"):
        instances.append(InstanceMapping(
            iri=_expand(entry.get("iri"), namespaces, f"{where}.iri"),
            xml_path=_string(entry, "path", where)))
    return MappingSet(collection, classes, properties, instances)


def dump_mappings(ms: MappingSet) -> str:
    """Serialize to the JSON format read by :func:`load_mappings` (IRIs written in full)."""
    doc = {
        "collection": ms.collection_iri,
        "namespaces": {},
        "class_mappings": [
            {"class": cm.class_iri, "xml_type": cm.xml_type_name, "path": cm.xml_path}
            for cm in ms.class_mappings],
        "property_mappings": [
            {"property": pm.property_iri, "class": pm.class_iri, "xml": pm.xml_name,
             "kind": pm.kind.value}
            for pm in ms.property_mappings],
        "instance_mappings": [
            {"iri": im.iri, "path": im.xml_path} for im in ms.instance_mappings],
    }
    return json.dumps(doc, indent=2)


def resolve_property(ms: MappingSet, property_iri: str, class_iri: str) -> PropertyMapping:
    for pm in ms.property_mappings:
        if pm.property_iri == property_iri and pm.class_iri == class_iri:
            return pm
    raise UnmappedProperty(property_iri, class_iri)


def resolve_instance(ms: MappingSet, iri: str) -> InstanceMapping:
    for im in ms.instance_mappings:
        if im.iri == iri:
            return im
    raise UnmappedInstance(iri)


def class_of_instance(ms: MappingSet, im: InstanceMapping) -> ClassMapping:
    cm = ms.class_by_path(im.class_path)
    assert cm is not None, "validated mapping sets always have a class for each instance"
    return cm


def class_of_variable(gp, var: str, ms: MappingSet) -> ClassMapping:
    """The single mapped class owning every predicate used with ``?var`` as subject."""
    candidates = None
    for tp in gp:
        if tp.subject != Variable(var):
            continue
        owners = {pm.class_iri for pm in ms.property_mappings
                  if pm.property_iri == tp.predicate.value}
        if not owners:
            raise UnmappedProperty(tp.predicate.value)
        candidates = owners if candidates is None else candidates & owners
    if not candidates:
        raise AmbiguousClass(var, "no mapped class owns all of its predicates"
                             if candidates is not None else "no predicates constrain it")
    if len(candidates) > 1:
        raise AmbiguousClass(var, "predicates belong to several classes: "
                             + ", ".join(sorted(candidates)))
    (class_iri,) = candidates
    return ms.class_by_iri(class_iri)
