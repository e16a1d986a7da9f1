"""Closed-world constraint checks over a :class:`TopologyModel`."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Callable, Iterable, Optional

from .model import (
    APPLICATION_DIRECTIONS,
    COLLECTION_CLASSES,
    DESCRIPTION_LEVELS,
    ELEMENT_KINDS,
    KNOWN_CLASSES,
    KNOWN_PREDICATES,
    NAVIGABILITY,
    OBJECT_PROPERTIES,
    T,
    TopologyError,
    TopologyModel,
    dangling_references,
    element_end,
)
from .rdf import RDF, XSD_INTEGER, IRI, Literal, Node, Term, term_key
from .turtle import CollectionError, expand_collection

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Rule:
    rule_id: str
    description: str
    severity: str


_CATALOG = (
    Rule("AGG-ACYCLIC", "part-of relation over composition elements has no cycle", ERROR),
    Rule("APPDIR-ENUM", "applicationDirection is one of normal, reverse, both", ERROR),
    Rule("CARD-1", "single-valued required property present exactly once", ERROR),
    Rule("CARD-MIN", "required multi-valued property present at least once", ERROR),
    Rule("COMP-INV-FUNC", "a part belongs to at most one collection, a collection to at most one whole", ERROR),
    Rule("COORD-RANGE", "intrinsicCoord is a number in [0.0, 1.0]", ERROR),
    Rule("DISJOINT", "no resource has two sibling element or collection classes", ERROR),
    Rule("END-COORDS", "linear elements used by relations have coordinates at 0.0 and 1.0", ERROR),
    Rule("IRREFLEX", "no object property or relation links a resource to itself", ERROR),
    Rule("LEVEL-ENUM", "descriptionLevel is one of micro, meso, macro", ERROR),
    Rule("NAV-ENUM", "navigability is one of AB, BA, Both, None", ERROR),
    Rule("ORDERED-CONSIST", "ordered collection list is well formed and matches its elementPart set", ERROR),
    Rule("POS-ENUM", "positionOnA/positionOnB is the integer 0 or 1", ERROR),
    Rule("DANGLING-REF", "reference resolves to a resource of the expected kind", WARNING),
    Rule("UNKNOWN-TERM", "type or predicate is part of the supported vocabulary", WARNING),
)

# class -> properties that must occur exactly once
CARD_ONE: dict[IRI, tuple[IRI, ...]] = {
    T.PositionedRelation: (T.elementA, T.elementB, T.positionOnA, T.positionOnB, T.navigability),
    T.IntrinsicCoordinate: (T.intrinsicCoord,),
    T.LevelNetwork: (T.descriptionLevel,),
    T.SpotLocation: (T.netElement, T.intrinsicCoord, T.applicationDirection),
    T.OrderedCollection: (T.elementPartList,),
}
# class -> properties that must occur at least once
CARD_MIN: dict[IRI, tuple[IRI, ...]] = {
    T.Network: (T.level,),
    T.LevelNetwork: (T.networkResource,),
    T.AssociatedPositioningSystem: (T.intrinsicCoordinate,),
    T.CompositionNetElement: (T.elementCollection,),
    T.OrderedCollection: (T.elementPart,),
    T.UnorderedCollection: (T.elementPart,),
    T.LocatedNetEntity: (T.spotLocation,),
}


def rule_catalog() -> list[Rule]:
    return list(_CATALOG)


_RULES = {r.rule_id: r for r in _CATALOG}


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: str
    subject: str
    message: str
    detail: tuple[str, ...] = ()

    def sort_key(self):
        return (self.rule_id, self.subject, self.message, self.detail)


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)
    summary: dict[str, int] = field(default_factory=dict)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == WARNING]

    @property
    def counts(self) -> dict[str, int]:
        return {ERROR: len(self.errors), WARNING: len(self.warnings)}

    @property
    def ok(self) -> bool:
        return not self.errors

    def by_rule(self, rule_id: str) -> list[Finding]:
        return [f for f in self.findings if f.rule_id == rule_id]

    def to_dict(self) -> dict:
        return {
            "counts": self.counts,
            "summary": self.summary,
            "findings": [
                {
                    "ruleId": f.rule_id,
                    "severity": f.severity,
                    "subject": f.subject,
                    "message": f.message,
                    "detail": list(f.detail),
                }
                for f in self.findings
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = []
        for f in self.findings:
            line = f"{f.severity.upper():7} {f.rule_id:15} {f.subject}: {f.message}"
            if f.detail:
                line += " [" + ", ".join(f.detail) + "]"
            lines.append(line)
        parts = [f"{n} {k}" for k, n in self.summary.items() if n]
        lines.append("model: " + (", ".join(parts) if parts else "empty"))
        e, w = self.counts[ERROR], self.counts[WARNING]
        lines.append(f"{e} error{'s' if e != 1 else ''}, {w} warning{'s' if w != 1 else ''}")
        return "\n".join(lines) + "\n"


def _finding(rule_id: str, subject, message: str, detail: Iterable = ()) -> Finding:
    return Finding(rule_id, _RULES[rule_id].severity, str(subject), message, tuple(str(d) for d in detail))


def _lexical(t: Term) -> Optional[str]:
    return t.lexical if isinstance(t, Literal) else None


def _local(p: IRI) -> str:
    return p.value.rsplit("#", 1)[-1]


# -- rules ---------------------------------------------------------------------


def _subjects_of_class(model: TopologyModel, cls: IRI) -> list[Node]:
    # inferred positioning systems and coordinates count as typed
    if cls == T.IntrinsicCoordinate:
        return sorted(model.coordinates, key=term_key)
    if cls == T.AssociatedPositioningSystem:
        return sorted(model.positioning_systems, key=term_key)
    return sorted(model.triples.subjects(RDF.type, cls), key=term_key)


def check_cardinality(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    for cls, props in CARD_ONE.items():
        for s in _subjects_of_class(model, cls):
            for p in props:
                values = sorted(data.objects(s, p), key=term_key)
                if len(values) != 1:
                    out.append(
                        _finding(
                            "CARD-1", s,
                            f"{_local(cls)} requires exactly one {_local(p)}, found {len(values)}",
                            values,
                        )
                    )
    for cls, props in CARD_MIN.items():
        for s in _subjects_of_class(model, cls):
            for p in props:
                if not data.objects(s, p):
                    out.append(_finding("CARD-MIN", s, f"{_local(cls)} requires at least one {_local(p)}"))
    return out


def check_disjoint(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    for group in (ELEMENT_KINDS, COLLECTION_CLASSES):
        subjects = set()
        for cls in group:
            subjects |= data.subjects(RDF.type, cls)
        for s in sorted(subjects, key=term_key):
            classes = sorted(c for c in group if (s, RDF.type, c) in data)
            if len(classes) > 1:
                out.append(
                    _finding("DISJOINT", s, "typed with disjoint sibling classes", [_local(c) for c in classes])
                )
    return out


def check_irreflexive(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    for p in sorted(OBJECT_PROPERTIES, key=term_key):
        for t in data.triples(p=p):
            if t.subject == t.object:
                out.append(_finding("IRREFLEX", t.subject, f"{_local(p)} links the resource to itself"))
    for r in sorted(model.relations, key=term_key):
        same = data.objects(r, T.elementA) & data.objects(r, T.elementB)
        for e in sorted(same, key=term_key):
            out.append(_finding("IRREFLEX", r, "elementA and elementB are the same element", [e]))
    return out


def check_composition(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    part_of: dict[Node, set[Node]] = {}
    for c in model.collections:
        for p in data.objects(c, T.elementPart):
            part_of.setdefault(p, set()).add(c)
    for p in sorted(part_of, key=term_key):
        if len(part_of[p]) > 1:
            cols = sorted(part_of[p], key=term_key)
            out.append(_finding("COMP-INV-FUNC", p, f"part of {len(cols)} collections", cols))
    owned_by: dict[Node, set[Node]] = {}
    for t in data.triples(p=T.elementCollection):
        owned_by.setdefault(t.object, set()).add(t.subject)
    for c in sorted(owned_by, key=term_key):
        if len(owned_by[c]) > 1:
            wholes = sorted(owned_by[c], key=term_key)
            out.append(_finding("COMP-INV-FUNC", c, f"collection owned by {len(wholes)} wholes", wholes))
    return out


def part_of_graph(model: TopologyModel) -> dict[Node, set[Node]]:
    """whole -> direct parts, through element part collections."""
    data = model.triples
    graph: dict[Node, set[Node]] = {}
    for t in data.triples(p=T.elementCollection):
        for p in data.objects(t.object, T.elementPart):
            graph.setdefault(t.subject, set()).add(p)
    return graph


def strongly_connected(graph: dict[Node, set[Node]]) -> list[list[Node]]:
    """Tarjan's algorithm, iterative."""
    index: dict[Node, int] = {}
    low: dict[Node, int] = {}
    on_stack: set[Node] = set()
    stack: list[Node] = []
    comps: list[list[Node]] = []
    counter = 0
    nodes = set(graph) | {v for vs in graph.values() for v in vs}
    for root in sorted(nodes, key=term_key):
        if root in index:
            continue
        work = [(root, iter(sorted(graph.get(root, ()), key=term_key)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            w = next(it, None)
            if w is not None:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(graph.get(w, ()), key=term_key))))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp, key=term_key))
    return comps


def check_acyclic(model: TopologyModel) -> list[Finding]:
    graph = part_of_graph(model)
    out = []
    for comp in strongly_connected(graph):
        if len(comp) > 1 or comp[0] in graph.get(comp[0], ()):
            out.append(_finding("AGG-ACYCLIC", comp[0], "element is (transitively) part of itself", comp))
    return out


def _number(t: Term) -> Optional[Decimal]:
    if isinstance(t, Literal) and t.is_numeric:
        try:
            return Decimal(t.lexical)
        except InvalidOperation:
            return None
    return None


def check_enumerations(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    for rule, prop, allowed in (
        ("NAV-ENUM", T.navigability, NAVIGABILITY),
        ("LEVEL-ENUM", T.descriptionLevel, DESCRIPTION_LEVELS),
        ("APPDIR-ENUM", T.applicationDirection, APPLICATION_DIRECTIONS),
    ):
        for t in sorted(data.triples(p=prop), key=lambda t: term_key(t.subject)):
            if _lexical(t.object) not in allowed:
                out.append(
                    _finding(rule, t.subject, f"{_local(prop)} {t.object} not in {{{', '.join(allowed)}}}", [t.object])
                )
    for prop in (T.positionOnA, T.positionOnB):
        for t in data.triples(p=prop):
            value = _number(t.object)
            if not (isinstance(t.object, Literal) and t.object.datatype == XSD_INTEGER and value in (0, 1)):
                out.append(_finding("POS-ENUM", t.subject, f"{_local(prop)} {t.object} is not the integer 0 or 1"))
    for t in data.triples(p=T.intrinsicCoord):
        value = _number(t.object)
        if value is None or not (0 <= value <= 1):
            out.append(_finding("COORD-RANGE", t.subject, f"intrinsicCoord {t.object} outside [0.0, 1.0]"))
    return out


def check_ordered(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    for c in sorted(data.subjects(RDF.type, T.OrderedCollection), key=term_key):
        parts = data.objects(c, T.elementPart)
        for head in sorted(data.objects(c, T.elementPartList), key=term_key):
            try:
                members = expand_collection(data, head)
            except CollectionError as exc:
                out.append(_finding("ORDERED-CONSIST", c, f"malformed elementPartList: {exc}"))
                continue
            if len(set(members)) != len(members):
                out.append(_finding("ORDERED-CONSIST", c, "elementPartList repeats a member", members))
            elif set(members) != parts:
                diff = sorted(set(members) ^ parts, key=term_key)
                out.append(_finding("ORDERED-CONSIST", c, "elementPartList members differ from elementPart set", diff))
    return out


def check_end_coordinates(model: TopologyModel) -> list[Finding]:
    data = model.triples
    used: set[Node] = set()
    for r in model.relations:
        used |= data.objects(r, T.elementA) | data.objects(r, T.elementB)
    out = []
    for e in sorted(used, key=term_key):
        el = model.elements.get(e)
        if el is None or el.kind != "linear":
            continue
        problems = []
        for end in (0, 1):
            try:
                element_end(model, e, end)
            except TopologyError as exc:
                problems.append(str(exc))
        if problems:
            out.append(_finding("END-COORDS", e, "end coordinates not resolvable", problems))
    return out


def check_references(model: TopologyModel) -> list[Finding]:
    return [
        _finding("DANGLING-REF", s, f"{prop} refers to {target}, which is not a known {kind}")
        for s, target, kind, prop in dangling_references(model)
    ]


def check_vocabulary(model: TopologyModel) -> list[Finding]:
    data = model.triples
    out = []
    types = {t.object for t in data.triples(p=RDF.type)}
    for cls in sorted(types - KNOWN_CLASSES, key=term_key):
        out.append(_finding("UNKNOWN-TERM", cls, "unknown type", sorted(data.subjects(RDF.type, cls), key=term_key)))
    for p in sorted({t.predicate for t in data} - KNOWN_PREDICATES, key=term_key):
        n = sum(1 for _ in data.triples(p=p))
        out.append(_finding("UNKNOWN-TERM", p, f"unknown predicate used in {n} triple{'s' if n != 1 else ''}"))
    return out


CHECKS: tuple[Callable[[TopologyModel], list[Finding]], ...] = (
    check_cardinality,
    check_disjoint,
    check_irreflexive,
    check_composition,
    check_acyclic,
    check_enumerations,
    check_ordered,
    check_end_coordinates,
    check_references,
    check_vocabulary,
)


def validate(model: TopologyModel) -> ValidationReport:
    findings: list[Finding] = []
    for check in CHECKS:
        findings.extend(check(model))
    findings = sorted(set(findings), key=Finding.sort_key)
    return ValidationReport(findings, model.summary())
