"""Compile SPARQL update operations into XQuery Update programs.

DELETE DATA becomes one ``delete nodes`` per triple, INSERT DATA builds the
new elements with ``let`` clauses, groups them per subject and inserts each
group into its instance node.  DELETE/INSERT ... WHERE compiles the WHERE
pattern into a filtered class path bound to ``$where_gp`` and derives the
deletion targets or inserted elements from it.

Deletion removes the property elements a template matches, never the subject
element itself, and variables in templates iterate over every value the
subject carries, so the XML result always projects to the same triples as the
SPARQL result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ObjectIsIri, TranslationUnsupported
from .mapping import (MappingSet, PropertyKind, PropertyMapping, class_of_instance,
                      class_of_variable, parse_instance_path, resolve_instance,
                      resolve_property)
from .rdf import (DeleteData, DeleteInsertWhere, GraphPattern, InsertData, Iri,
                  Literal, UpdateOperation, Variable)
from .xquery import (AttrEq, AttrExists, ChildEq, ChildExists, Collection,
                     DeleteNodes, ElemConstructor, For, InsertNodesInto, Let,
                     LiteralText, PathExpr, Return, SelfEq, Sequence, StringOf,
                     VarRef, VarRoot, XQueryProgram)

WHERE_VAR = "where_gp"
DELETE_VAR = "delete_gp"


@dataclass(frozen=True)
class WhereCompilation:
    subject: str
    class_iri: str
    path: PathExpr
    # SPARQL variable -> property mapping whose values it ranges over
    var_columns: dict = field(default_factory=dict)
    binding_var: str = WHERE_VAR


def _instance_path(ms: MappingSet, iri: str) -> PathExpr:
    """collection(...) followed by the instance's mapped location path."""
    p = PathExpr(Collection(ms.collection_iri))
    for step in parse_instance_path(resolve_instance(ms, iri).xml_path):
        p = p.child(step.name, *(AttrEq(n, v) for n, v in step.attributes))
    return p


def _subject_class(ms: MappingSet, subject: Iri) -> str:
    return class_of_instance(ms, resolve_instance(ms, subject.value)).class_iri


def _value_step(base: PathExpr, pm: PropertyMapping, *predicates) -> PathExpr:
    if pm.kind is PropertyKind.ATTRIBUTE:
        return base.attribute(pm.xml_name, *predicates)
    return base.child(pm.xml_name, *predicates)


def _literal_object(term, where: str) -> str:
    if isinstance(term, Iri):
        raise ObjectIsIri(f"{where}: object {term} is an IRI; only datatype properties are mapped")
    return term.lexical


def translate_delete_data(triples, ms: MappingSet) -> XQueryProgram:
    statements = []
    for t in triples:
        pm = resolve_property(ms, t.predicate.value, _subject_class(ms, t.subject))
        value = _literal_object(t.object, "DELETE DATA")
        target = _value_step(_instance_path(ms, t.subject.value), pm, SelfEq(value))
        statements.append(DeleteNodes(target))
    return XQueryProgram(statements)


def translate_insert_data(triples, ms: MappingSet) -> XQueryProgram:
    if not triples:
        return XQueryProgram()
    lets = []
    groups: dict = {}
    for i, t in enumerate(triples, start=1):
        pm = resolve_property(ms, t.predicate.value, _subject_class(ms, t.subject))
        if pm.kind is PropertyKind.ATTRIBUTE:
            raise TranslationUnsupported(f"inserting attribute values ({pm.xml_name})")
        value = _literal_object(t.object, "INSERT DATA")
        lets.append(Let(f"n{i}", ElemConstructor(pm.xml_name, LiteralText(value))))
        groups.setdefault(t.subject.value, []).append(f"n{i}")
    data_lets, location_lets, inserts = [], [], []
    for j, (subject, members) in enumerate(groups.items(), start=1):
        data_lets.append(Let(f"data{j}", Sequence(VarRef(m) for m in members)))
        location_lets.append(Let(f"insert_location{j}", _instance_path(ms, subject)))
        inserts.append(InsertNodesInto(VarRef(f"data{j}"), VarRef(f"insert_location{j}")))
    return XQueryProgram(lets + data_lets + location_lets + [Return(inserts)])


def compile_where(gp: GraphPattern, ms: MappingSet) -> WhereCompilation:
    """Translate a single-subject basic graph pattern into a filtered class path."""
    subjects = {tp.subject for tp in gp}
    if any(isinstance(s, Iri) for s in subjects):
        raise TranslationUnsupported("subject is constant in WHERE")
    if len(subjects) != 1:
        raise TranslationUnsupported("multi-subject graph pattern")
    (subject,) = subjects
    cm = class_of_variable(gp, subject.name, ms)
    path = PathExpr(Collection(ms.collection_iri))
    for name in cm.steps:
        path = path.child(name)
    columns = {}
    for tp in gp:
        pm = resolve_property(ms, tp.predicate.value, cm.class_iri)
        obj = tp.object
        if isinstance(obj, Iri):
            raise TranslationUnsupported("IRI object")
        attr = pm.kind is PropertyKind.ATTRIBUTE
        if isinstance(obj, Literal):
            pred = AttrEq(pm.xml_name, obj.lexical) if attr else ChildEq(pm.xml_name, obj.lexical)
        else:
            if obj == subject:
                raise TranslationUnsupported("subject variable used as object")
            if obj.name in columns:
                raise TranslationUnsupported(f"variable ?{obj.name} joins two values")
            columns[obj.name] = pm
            pred = AttrExists(pm.xml_name) if attr else ChildExists(pm.xml_name)
        path = path.where(pred)
    return WhereCompilation(subject.name, cm.class_iri, path, columns)


def _check_template(template, wc: WhereCompilation, ms: MappingSet):
    """Yield (pattern, property mapping) pairs after checking subject/object shapes."""
    for tp in template:
        if tp.subject != Variable(wc.subject):
            raise TranslationUnsupported(f"template subject {tp.subject} is not bound by WHERE")
        pm = resolve_property(ms, tp.predicate.value, wc.class_iri)
        if isinstance(tp.object, Iri):
            raise ObjectIsIri(f"template object {tp.object} is an IRI")
        if isinstance(tp.object, Variable) and tp.object.name not in wc.var_columns:
            raise TranslationUnsupported(f"template variable ?{tp.object.name} has no value in WHERE")
        yield tp, pm


def translate_delete_where(template, wc: WhereCompilation, ms: MappingSet) -> XQueryProgram:
    where = VarRoot(wc.binding_var)
    targets = []
    for tp, pm in _check_template(template, wc, ms):
        if isinstance(tp.object, Literal):
            targets.append(_value_step(PathExpr(where), pm, SelfEq(tp.object.lexical)))
        else:
            source = wc.var_columns[tp.object.name]
            if source != pm:
                # would need a value join between two different properties
                raise TranslationUnsupported(
                    f"?{tp.object.name} is bound by {source.xml_name} but deleted from {pm.xml_name}")
            targets.append(_value_step(PathExpr(where), pm))
    target = targets[0] if len(targets) == 1 else Sequence(targets)
    return XQueryProgram([
        Let(wc.binding_var, wc.path),
        Let(DELETE_VAR, target),
        Return([DeleteNodes(VarRef(DELETE_VAR))]),
    ])


def translate_insert_where(template, wc: WhereCompilation, ms: MappingSet) -> XQueryProgram:
    checked = list(_check_template(template, wc, ms))
    it = "it1"
    statements = [
        Let(wc.binding_var, wc.path),
        Let("insert_location1", VarRef(wc.binding_var)),
        For(it, VarRef("insert_location1")),
    ]
    # one nested loop per template variable, in order of first use
    loop_vars = {}
    for tp, _ in checked:
        if isinstance(tp.object, Variable) and tp.object.name not in loop_vars:
            loop_var = "v_" + tp.object.name
            loop_vars[tp.object.name] = loop_var
            statements.append(For(loop_var, _value_step(PathExpr(VarRoot(it)),
                                                        wc.var_columns[tp.object.name])))
    names = []
    for i, (tp, pm) in enumerate(checked, start=1):
        if pm.kind is PropertyKind.ATTRIBUTE:
            raise TranslationUnsupported(f"inserting attribute values ({pm.xml_name})")
        if isinstance(tp.object, Literal):
            content = LiteralText(tp.object.lexical)
        else:
            content = StringOf(PathExpr(VarRoot(loop_vars[tp.object.name])))
        names.append(f"insert_gp{i}")
        statements.append(Let(names[-1], ElemConstructor(pm.xml_name, content)))
    data = VarRef(names[0]) if len(names) == 1 else Sequence(VarRef(n) for n in names)
    statements.append(Return([InsertNodesInto(data, VarRef(it))]))
    return XQueryProgram(statements)


def translate_delete_insert_where(op: DeleteInsertWhere, ms: MappingSet) -> XQueryProgram:
    wc = compile_where(op.where, ms)
    program = XQueryProgram()
    if op.delete_template:
        program += translate_delete_where(op.delete_template, wc, ms)
    if op.insert_template:
        program += translate_insert_where(op.insert_template, wc, ms)
    return program


def translate(op: UpdateOperation, ms: MappingSet) -> XQueryProgram:
    if isinstance(op, DeleteData):
        return translate_delete_data(op.triples, ms)
    if isinstance(op, InsertData):
        return translate_insert_data(op.triples, ms)
    if isinstance(op, DeleteInsertWhere):
        return translate_delete_insert_where(op, ms)
    raise TypeError(f"not an update operation: {op!r}")
