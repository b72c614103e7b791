"""Seeded random (update, mapping, document) instances within the supported subset.

Used by the randomized equivalence check: at most 5 subjects, at most 4
mapped properties and at most 3 triples or patterns per clause.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .mapping import ClassMapping, InstanceMapping, MappingSet, PropertyKind, PropertyMapping
from .oracle import project
from .rdf import (DeleteData, DeleteInsertWhere, GraphPattern, InsertData, Iri, Literal,
                  Triple, TriplePattern, UpdateOperation, Variable)
from .xmlstore import Element, Text

NS = "http://ns.gr/#"
STUDENT = NS + "Student"
COLLECTION = "http://xml.gr"
# (RDF property local name, XML element name)
PROPERTIES = [("FName", "FirstName"), ("E-mail", "Email"),
              ("Department", "Dept"), ("GivenName", "GivenName")]
VALUES = ["John", "Mary", "CS", "EE"]

MAX_SUBJECTS = 5
MAX_PATTERNS = 3


@dataclass(frozen=True)
class Case:
    op: UpdateOperation
    mapping: MappingSet
    document: Element


def random_mapping(rng: random.Random, ssns) -> MappingSet:
    props = rng.sample(PROPERTIES, rng.randint(1, len(PROPERTIES)))
    instances = [InstanceMapping(f"http://rdf.gr/person{ssn}", f"/Persons/Student[@SSN={ssn}]")
                 for ssn in ssns if rng.random() < 0.7]
    return MappingSet(
        COLLECTION,
        [ClassMapping(STUDENT, "/Persons/Student", "Student_type")],
        [PropertyMapping(NS + local, STUDENT, xml, PropertyKind.ELEMENT) for local, xml in props],
        instances)


def random_document(rng: random.Random, ssns) -> Element:
    root = Element("Persons")
    for ssn in ssns:
        student = root.append(Element("Student", {"SSN": str(ssn)}))
        children = []
        for _, xml in PROPERTIES:
            for _ in range(rng.choice([0, 1, 1, 1, 2])):
                children.append((xml, rng.choice(VALUES)))
        if rng.random() < 0.2:
            children.append(("Note", rng.choice(VALUES)))
        rng.shuffle(children)
        for name, value in children:
            student.append(Element(name)).append(Text(value))
        if rng.random() < 0.1:
            root.append(Element("Staff")).append(Element("FirstName")).append(Text("John"))
    return root


def _object(rng, var_names=()):
    if var_names and rng.random() < 0.5:
        return Variable(rng.choice(var_names))
    return Literal(rng.choice(VALUES))


def random_data_triples(rng, ms: MappingSet, doc: Element, existing_bias: float):
    subjects = [im.iri for im in ms.instance_mappings]
    existing = sorted((t for t in project(doc, ms) if t.subject.value in subjects),
                      key=lambda t: (t.subject.value, t.predicate.value, t.object.lexical))
    triples = []
    for _ in range(rng.randint(0, MAX_PATTERNS)):
        if existing and rng.random() < existing_bias:
            triples.append(rng.choice(existing))
        else:
            pm = rng.choice(ms.property_mappings)
            triples.append(Triple(Iri(rng.choice(subjects)), Iri(pm.property_iri),
                                  Literal(rng.choice(VALUES))))
    return triples


def random_where_op(rng, ms: MappingSet, with_delete: bool, with_insert: bool) -> DeleteInsertWhere:
    subject = Variable("s")
    where, columns = [], {}
    for i in range(rng.randint(1, MAX_PATTERNS)):
        pm = rng.choice(ms.property_mappings)
        if rng.random() < 0.5:
            name = f"v{i}"
            columns[name] = pm.property_iri
            obj = Variable(name)
        else:
            obj = Literal(rng.choice(VALUES))
        where.append(TriplePattern(subject, Iri(pm.property_iri), obj))
    delete = insert = None
    if with_delete:
        delete = []
        for _ in range(rng.randint(1, MAX_PATTERNS)):
            pm = rng.choice(ms.property_mappings)
            same_column = [v for v, p in columns.items() if p == pm.property_iri]
            delete.append(TriplePattern(subject, Iri(pm.property_iri), _object(rng, same_column)))
    if with_insert:
        insert = []
        for _ in range(rng.randint(1, MAX_PATTERNS)):
            pm = rng.choice(ms.property_mappings)
            insert.append(TriplePattern(subject, Iri(pm.property_iri),
                                        _object(rng, sorted(columns))))
    return DeleteInsertWhere(delete, insert, GraphPattern(where))


def random_case(rng: random.Random) -> Case:
    n = rng.randint(1, MAX_SUBJECTS)
    ssns = rng.sample(range(1000, 1100), n)
    ms = random_mapping(rng, ssns)
    doc = random_document(rng, ssns)
    kinds = ["delete_where", "insert_where", "delete_insert_where"]
    if ms.instance_mappings:
        kinds += ["delete_data", "insert_data"]
    kind = rng.choice(kinds)
    if kind == "delete_data":
        op = DeleteData(random_data_triples(rng, ms, doc, existing_bias=0.6))
    elif kind == "insert_data":
        op = InsertData(random_data_triples(rng, ms, doc, existing_bias=0.2))
    else:
        op = random_where_op(rng, ms, kind != "insert_where", kind != "delete_where")
    return Case(op, ms, doc)


def random_cases(seed: int, count: int):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_case(rng)
