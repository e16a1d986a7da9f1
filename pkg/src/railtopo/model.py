"""Typed view over rail topology instance data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Optional

from .rdf import (
    RDF,
    RDF_NS,
    RDFS_NS,
    TOPO_NS,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    BNode,
    IRI,
    Literal,
    Node,
    Term,
    Triple,
    TripleSet,
    term_key,
    topo,
)
from .turtle import CollectionError, build_collection, expand_collection


class T:
    """RTO vocabulary used by this package."""

    # classes
    Network = topo("Network")
    LevelNetwork = topo("LevelNetwork")
    LinearElement = topo("LinearElement")
    NonLinearElement = topo("NonLinearElement")
    CompositionNetElement = topo("CompositionNetElement")
    PositionedRelation = topo("PositionedRelation")
    AssociatedPositioningSystem = topo("AssociatedPositioningSystem")
    IntrinsicCoordinate = topo("IntrinsicCoordinate")
    OrderedCollection = topo("OrderedCollection")
    UnorderedCollection = topo("UnorderedCollection")
    LocatedNetEntity = topo("LocatedNetEntity")
    SpotLocation = topo("SpotLocation")

    # properties
    id = topo("id")
    name = topo("name")
    longname = topo("longname")
    level = topo("level")
    descriptionLevel = topo("descriptionLevel")
    networkResource = topo("networkResource")
    elementA = topo("elementA")
    elementB = topo("elementB")
    positionOnA = topo("positionOnA")
    positionOnB = topo("positionOnB")
    navigability = topo("navigability")
    associatedPositioningSystem = topo("associatedPositioningSystem")
    intrinsicCoordinate = topo("intrinsicCoordinate")
    intrinsicCoord = topo("intrinsicCoord")
    elementCollection = topo("elementCollection")
    elementPart = topo("elementPart")
    elementPartList = topo("elementPartList")
    sequence = topo("sequence")
    spotLocation = topo("spotLocation")
    netElement = topo("netElement")
    applicationDirection = topo("applicationDirection")
    reaches = topo("reaches")


ELEMENT_KINDS = {
    T.LinearElement: "linear",
    T.NonLinearElement: "nonlinear",
    T.CompositionNetElement: "composition",
}
KIND_CLASSES = {v: k for k, v in ELEMENT_KINDS.items()}
COLLECTION_CLASSES = {T.OrderedCollection: True, T.UnorderedCollection: False}

NAVIGABILITY = ("AB", "BA", "Both", "None")
DESCRIPTION_LEVELS = ("micro", "meso", "macro")
APPLICATION_DIRECTIONS = ("normal", "reverse", "both")

KNOWN_CLASSES = frozenset(
    [
        T.Network,
        T.LevelNetwork,
        T.PositionedRelation,
        T.AssociatedPositioningSystem,
        T.IntrinsicCoordinate,
        T.LocatedNetEntity,
        T.SpotLocation,
        *ELEMENT_KINDS,
        *COLLECTION_CLASSES,
    ]
)
KNOWN_PREDICATES = frozenset(
    [RDF.type, RDF.first, RDF.rest, IRI(RDFS_NS + "label"), IRI(RDFS_NS + "comment")]
    + [v for k, v in vars(T).items() if isinstance(v, IRI) and k[0].islower()]
)

# properties whose objects must be resources
OBJECT_PROPERTIES = frozenset(
    [
        T.level,
        T.networkResource,
        T.elementA,
        T.elementB,
        T.associatedPositioningSystem,
        T.intrinsicCoordinate,
        T.elementCollection,
        T.elementPart,
        T.elementPartList,
        T.spotLocation,
        T.netElement,
        T.reaches,
    ]
)


class ModelError(ValueError):
    """Structural fault that prevents building a model at all."""


class TopologyError(LookupError):
    """A query against the model cannot be answered (missing or ambiguous data)."""


@dataclass(frozen=True)
class Identifier:
    iri: Node
    id: Optional[str] = None
    name: Optional[str] = None
    longname: Optional[str] = None


@dataclass(frozen=True)
class _Entity:
    identity: Identifier

    @property
    def iri(self) -> Node:
        return self.identity.iri

    @property
    def name(self) -> Optional[str]:
        return self.identity.name

    @property
    def label(self) -> str:
        return self.identity.name if self.identity.name is not None else str(self.identity.iri)


@dataclass(frozen=True)
class Network(_Entity):
    levels: tuple[Node, ...] = ()


@dataclass(frozen=True)
class LevelNetwork(_Entity):
    description_level: Optional[str] = None
    members: frozenset[Node] = frozenset()


@dataclass(frozen=True)
class NetElement(_Entity):
    kind: str = "linear"
    positioning: tuple[Node, ...] = ()
    collections: tuple[Node, ...] = ()


@dataclass(frozen=True)
class PositionedRelation(_Entity):
    element_a: Optional[Node] = None
    element_b: Optional[Node] = None
    position_on_a: Optional[int] = None
    position_on_b: Optional[int] = None
    navigability: Optional[str] = None


@dataclass(frozen=True)
class AssociatedPositioningSystem(_Entity):
    owner: Optional[Node] = None
    coordinates: tuple[Node, ...] = ()


@dataclass(frozen=True)
class IntrinsicCoordinate(_Entity):
    value: Optional[Decimal] = None
    parent: Optional[Node] = None


@dataclass(frozen=True)
class ElementPartCollection(_Entity):
    ordered: bool = False
    whole: Optional[Node] = None
    parts: frozenset[Node] = frozenset()
    ordered_parts: Optional[tuple[Term, ...]] = None
    sequence: Optional[int] = None


@dataclass(frozen=True)
class SpotLocation(_Entity):
    on_element: Optional[Node] = None
    coordinate: Optional[Decimal] = None
    application_direction: Optional[str] = None


@dataclass(frozen=True)
class LocatedNetEntity(_Entity):
    locations: tuple[Node, ...] = ()


@dataclass(frozen=True)
class TopologyModel:
    networks: dict[Node, Network] = field(default_factory=dict)
    levels: dict[Node, LevelNetwork] = field(default_factory=dict)
    elements: dict[Node, NetElement] = field(default_factory=dict)
    relations: dict[Node, PositionedRelation] = field(default_factory=dict)
    positioning_systems: dict[Node, AssociatedPositioningSystem] = field(default_factory=dict)
    coordinates: dict[Node, IntrinsicCoordinate] = field(default_factory=dict)
    collections: dict[Node, ElementPartCollection] = field(default_factory=dict)
    entities: dict[Node, LocatedNetEntity] = field(default_factory=dict)
    spot_locations: dict[Node, SpotLocation] = field(default_factory=dict)
    triples: TripleSet = field(default_factory=TripleSet, compare=False, repr=False)

    def summary(self) -> dict[str, int]:
        return {
            "networks": len(self.networks),
            "levels": len(self.levels),
            "elements": len(self.elements),
            "relations": len(self.relations),
            "positioning_systems": len(self.positioning_systems),
            "coordinates": len(self.coordinates),
            "collections": len(self.collections),
            "entities": len(self.entities),
            "spot_locations": len(self.spot_locations),
        }

    def elements_named(self, name: str, kind: Optional[str] = None) -> list[NetElement]:
        found = [
            e
            for e in self.elements.values()
            if e.name == name and (kind is None or e.kind == kind)
        ]
        return sorted(found, key=lambda e: term_key(e.iri))

    def label(self, node: Node) -> str:
        element = self.elements.get(node)
        if element is not None:
            return element.label
        name = self.triples.value(node, T.name)
        return str(name) if name is not None else str(node)


# -- building ----------------------------------------------------------------


def _string(data: TripleSet, s: Node, p: IRI) -> Optional[str]:
    v = data.value(s, p)
    return None if v is None else str(v)


def _integer(data: TripleSet, s: Node, p: IRI) -> Optional[int]:
    v = data.value(s, p)
    if isinstance(v, Literal):
        try:
            d = Decimal(v.lexical)
        except InvalidOperation:
            return None
        if d == d.to_integral_value():
            return int(d)
    return None


def _decimal(data: TripleSet, s: Node, p: IRI) -> Optional[Decimal]:
    v = data.value(s, p)
    if isinstance(v, Literal) and v.is_numeric:
        try:
            return Decimal(v.lexical)
        except InvalidOperation:
            return None
    return None


def _resource(data: TripleSet, s: Node, p: IRI) -> Optional[Node]:
    v = data.value(s, p)
    if isinstance(v, Literal):
        raise ModelError(f"{s} {p.value.removeprefix(TOPO_NS)}: expected a resource, found literal {v.lexical!r}")
    return v


def _resources(data: TripleSet, s: Node, p: IRI) -> list[Node]:
    out = []
    for v in data.objects(s, p):
        if isinstance(v, Literal):
            raise ModelError(f"{s} {p.value.removeprefix(TOPO_NS)}: expected a resource, found literal {v.lexical!r}")
        out.append(v)
    return sorted(out, key=term_key)


def _identity(data: TripleSet, s: Node) -> Identifier:
    return Identifier(
        iri=s,
        id=_string(data, s, T.id),
        name=_string(data, s, T.name),
        longname=_string(data, s, T.longname),
    )


def build_model(data: TripleSet) -> tuple[TopologyModel, list[str]]:
    """Index typed RTO resources in ``data``.

    Returns the model and a list of human-readable warnings for unknown
    vocabulary, dangling references and tolerated inconsistencies. Raises
    :class:`ModelError` only when a resource position holds a literal.
    """
    warnings: list[str] = []

    for p in OBJECT_PROPERTIES:
        for t in data.triples(p=p):
            if isinstance(t.object, Literal):
                raise ModelError(
                    f"{t.subject} {p.value.removeprefix(TOPO_NS)}: expected a resource, "
                    f"found literal {t.object.lexical!r}"
                )

    types: dict[Node, set[IRI]] = {}
    for s, _, o in data.triples(p=RDF.type):
        if isinstance(o, IRI):
            types.setdefault(s, set()).add(o)

    unknown_types = sorted({o for ts in types.values() for o in ts} - KNOWN_CLASSES, key=term_key)
    for o in unknown_types:
        n = len(data.subjects(RDF.type, o))
        warnings.append(f"unknown type {o} ({n} subject{'s' if n != 1 else ''})")
    unknown_preds = sorted({t.predicate for t in data} - KNOWN_PREDICATES, key=term_key)
    for p in unknown_preds:
        n = sum(1 for _ in data.triples(p=p))
        warnings.append(f"unknown predicate {p} ({n} triple{'s' if n != 1 else ''})")

    def typed(cls: IRI) -> list[Node]:
        return sorted(data.subjects(RDF.type, cls), key=term_key)

    networks = {
        s: Network(_identity(data, s), levels=tuple(_resources(data, s, T.level)))
        for s in typed(T.Network)
    }
    levels = {
        s: LevelNetwork(
            _identity(data, s),
            description_level=_string(data, s, T.descriptionLevel),
            members=frozenset(_resources(data, s, T.networkResource)),
        )
        for s in typed(T.LevelNetwork)
    }

    elements: dict[Node, NetElement] = {}
    for cls, kind in ELEMENT_KINDS.items():
        for s in typed(cls):
            if s in elements:
                warnings.append(f"{s} typed as both {elements[s].kind} and {kind}; kept {elements[s].kind}")
                continue
            elements[s] = NetElement(
                _identity(data, s),
                kind=kind,
                positioning=tuple(_resources(data, s, T.associatedPositioningSystem)),
                collections=tuple(_resources(data, s, T.elementCollection)),
            )

    relations = {}
    for s in typed(T.PositionedRelation):
        relations[s] = PositionedRelation(
            _identity(data, s),
            element_a=_resource(data, s, T.elementA),
            element_b=_resource(data, s, T.elementB),
            position_on_a=_integer(data, s, T.positionOnA),
            position_on_b=_integer(data, s, T.positionOnB),
            navigability=_string(data, s, T.navigability),
        )

    # positioning systems and coordinates are also recognised by usage
    aps_nodes = set(typed(T.AssociatedPositioningSystem))
    owners: dict[Node, list[Node]] = {}
    for t in data.triples(p=T.associatedPositioningSystem):
        aps_nodes.add(t.object)
        owners.setdefault(t.object, []).append(t.subject)
    positioning_systems = {}
    for s in sorted(aps_nodes, key=term_key):
        owner = sorted(owners.get(s, []), key=term_key)
        if len(owner) > 1:
            warnings.append(f"positioning system {s} shared by {len(owner)} elements")
        positioning_systems[s] = AssociatedPositioningSystem(
            _identity(data, s),
            owner=owner[0] if owner else None,
            coordinates=tuple(_resources(data, s, T.intrinsicCoordinate)),
        )

    coord_nodes = set(typed(T.IntrinsicCoordinate))
    parents: dict[Node, list[Node]] = {}
    for t in data.triples(p=T.intrinsicCoordinate):
        coord_nodes.add(t.object)
        parents.setdefault(t.object, []).append(t.subject)
    coordinates = {}
    for s in sorted(coord_nodes, key=term_key):
        parent = sorted(parents.get(s, []), key=term_key)
        coordinates[s] = IntrinsicCoordinate(
            _identity(data, s),
            value=_decimal(data, s, T.intrinsicCoord),
            parent=parent[0] if parent else None,
        )

    wholes: dict[Node, list[Node]] = {}
    for t in data.triples(p=T.elementCollection):
        wholes.setdefault(t.object, []).append(t.subject)
    collections = {}
    for cls, ordered in COLLECTION_CLASSES.items():
        for s in typed(cls):
            if s in collections:
                warnings.append(f"{s} typed as both ordered and unordered collection; kept ordered")
                continue
            ordered_parts = None
            head = _resource(data, s, T.elementPartList)
            if head is not None:
                try:
                    ordered_parts = tuple(expand_collection(data, head))
                except CollectionError as exc:
                    warnings.append(f"{s} elementPartList: {exc}")
            whole = sorted(wholes.get(s, []), key=term_key)
            collections[s] = ElementPartCollection(
                _identity(data, s),
                ordered=ordered,
                whole=whole[0] if whole else None,
                parts=frozenset(_resources(data, s, T.elementPart)),
                ordered_parts=ordered_parts,
                sequence=_integer(data, s, T.sequence),
            )

    spot_locations = {
        s: SpotLocation(
            _identity(data, s),
            on_element=_resource(data, s, T.netElement),
            coordinate=_decimal(data, s, T.intrinsicCoord),
            application_direction=_string(data, s, T.applicationDirection),
        )
        for s in sorted(set(typed(T.SpotLocation)) | data.subjects(T.netElement), key=term_key)
    }
    entities = {
        s: LocatedNetEntity(_identity(data, s), locations=tuple(_resources(data, s, T.spotLocation)))
        for s in typed(T.LocatedNetEntity)
    }

    model = TopologyModel(
        networks=networks,
        levels=levels,
        elements=elements,
        relations=relations,
        positioning_systems=positioning_systems,
        coordinates=coordinates,
        collections=collections,
        entities=entities,
        spot_locations=spot_locations,
        triples=data,
    )
    for net in networks.values():
        if not net.levels:
            warnings.append(f"network {net.iri} has no level")
    warnings.extend(_dangling(model))
    return model, warnings


def _dangling(model: TopologyModel) -> list[str]:
    out = []
    for ref, target, index, what in dangling_references(model):
        out.append(f"{ref} {what} refers to {target}, which is not a known {index}")
    return out


def dangling_references(model: TopologyModel) -> list[tuple[Node, Node, str, str]]:
    """(subject, referenced node, expected kind, property) for unresolved references."""
    found = []

    def check(subject, target, index, kind, prop):
        if target is not None and target not in index:
            found.append((subject, target, kind, prop))

    for net in model.networks.values():
        for lv in net.levels:
            check(net.iri, lv, model.levels, "level network", "level")
    for lv in model.levels.values():
        for m in sorted(lv.members, key=term_key):
            check(lv.iri, m, model.elements, "net element", "networkResource")
    for r in model.relations.values():
        check(r.iri, r.element_a, model.elements, "net element", "elementA")
        check(r.iri, r.element_b, model.elements, "net element", "elementB")
    for e in model.elements.values():
        for c in e.collections:
            check(e.iri, c, model.collections, "element part collection", "elementCollection")
    for c in model.collections.values():
        for p in sorted(c.parts, key=term_key):
            check(c.iri, p, model.elements, "net element", "elementPart")
    for ent in model.entities.values():
        for loc in ent.locations:
            check(ent.iri, loc, model.spot_locations, "spot location", "spotLocation")
    for loc in model.spot_locations.values():
        check(loc.iri, loc.on_element, model.elements, "net element", "netElement")
    return sorted(found, key=lambda f: (term_key(f[0]), f[3], term_key(f[1])))


# -- serialization back to triples -----------------------------------------


def _lit_str(s: str) -> Literal:
    return Literal(s, XSD_STRING)


def _lit_int(i: int) -> Literal:
    return Literal(str(i), XSD_INTEGER)


def _lit_dec(d: Decimal) -> Literal:
    text = format(d, "f")
    if "." not in text:
        text += ".0"
    return Literal(text, XSD_DECIMAL)


def model_to_triples(model: TopologyModel) -> TripleSet:
    """Triples describing every indexed entity of ``model``."""
    out: list[Triple] = []
    counter = itertools.count()

    def fresh() -> BNode:
        return BNode(f"m{next(counter)}")

    def ident(e: _Entity, cls: Optional[IRI]) -> None:
        s = e.iri
        if cls is not None:
            out.append(Triple(s, RDF.type, cls))
        i = e.identity
        for p, v in ((T.id, i.id), (T.name, i.name), (T.longname, i.longname)):
            if v is not None:
                out.append(Triple(s, p, _lit_str(v)))

    def ref(s: Node, p: IRI, o: Optional[Node]) -> None:
        if o is not None:
            out.append(Triple(s, p, o))

    for n in model.networks.values():
        ident(n, T.Network)
        for lv in n.levels:
            ref(n.iri, T.level, lv)
    for lv in model.levels.values():
        ident(lv, T.LevelNetwork)
        if lv.description_level is not None:
            out.append(Triple(lv.iri, T.descriptionLevel, _lit_str(lv.description_level)))
        for m in lv.members:
            ref(lv.iri, T.networkResource, m)
    for e in model.elements.values():
        ident(e, KIND_CLASSES[e.kind])
        for aps in e.positioning:
            ref(e.iri, T.associatedPositioningSystem, aps)
        for c in e.collections:
            ref(e.iri, T.elementCollection, c)
    for r in model.relations.values():
        ident(r, T.PositionedRelation)
        ref(r.iri, T.elementA, r.element_a)
        ref(r.iri, T.elementB, r.element_b)
        if r.position_on_a is not None:
            out.append(Triple(r.iri, T.positionOnA, _lit_int(r.position_on_a)))
        if r.position_on_b is not None:
            out.append(Triple(r.iri, T.positionOnB, _lit_int(r.position_on_b)))
        if r.navigability is not None:
            out.append(Triple(r.iri, T.navigability, _lit_str(r.navigability)))
    for aps in model.positioning_systems.values():
        ident(aps, T.AssociatedPositioningSystem)
        for c in aps.coordinates:
            ref(aps.iri, T.intrinsicCoordinate, c)
    for c in model.coordinates.values():
        ident(c, T.IntrinsicCoordinate)
        if c.value is not None:
            out.append(Triple(c.iri, T.intrinsicCoord, _lit_dec(c.value)))
    for col in model.collections.values():
        ident(col, T.OrderedCollection if col.ordered else T.UnorderedCollection)
        if col.sequence is not None:
            out.append(Triple(col.iri, T.sequence, _lit_int(col.sequence)))
        for p in col.parts:
            ref(col.iri, T.elementPart, p)
        if col.ordered_parts is not None:
            head, chain = build_collection(col.ordered_parts, fresh)
            out.append(Triple(col.iri, T.elementPartList, head))
            out.extend(chain)
    for ent in model.entities.values():
        ident(ent, T.LocatedNetEntity)
        for loc in ent.locations:
            ref(ent.iri, T.spotLocation, loc)
    for loc in model.spot_locations.values():
        ident(loc, T.SpotLocation)
        ref(loc.iri, T.netElement, loc.on_element)
        if loc.coordinate is not None:
            out.append(Triple(loc.iri, T.intrinsicCoord, _lit_dec(loc.coordinate)))
        if loc.application_direction is not None:
            out.append(Triple(loc.iri, T.applicationDirection, _lit_str(loc.application_direction)))
    return TripleSet(out, model.triples.prefixes)


# -- queries -----------------------------------------------------------------

_ZERO = Decimal(0)
_ONE = Decimal(1)


def element_end(model: TopologyModel, element: Node, end: int) -> Node:
    """The intrinsic coordinate at ``end`` (0 or 1) of ``element``."""
    if end not in (0, 1):
        raise ValueError(f"end must be 0 or 1, got {end!r}")
    e = model.elements.get(element)
    if e is None:
        raise TopologyError(f"{element}: not a net element")
    if not e.positioning:
        raise TopologyError(f"{model.label(element)}: no positioning system")
    target = _ZERO if end == 0 else _ONE
    hits = []
    for aps in e.positioning:
        ps = model.positioning_systems.get(aps)
        if ps is None:
            continue
        for c in ps.coordinates:
            coord = model.coordinates.get(c)
            if coord is not None and coord.value == target:
                hits.append(c)
    hits = sorted(set(hits), key=term_key)
    if not hits:
        raise TopologyError(f"{model.label(element)}: missing end coordinate {end}")
    if len(hits) > 1:
        raise TopologyError(
            f"{model.label(element)}: ambiguous end coordinate {end} ({', '.join(map(str, hits))})"
        )
    return hits[0]


def element_parts(
    model: TopologyModel, composition: Node
) -> tuple[frozenset[Node], Optional[tuple[Term, ...]]]:
    """Parts of a composition element, or of one of its collections, as (set, ordered list)."""
    if composition in model.collections:
        cols = [model.collections[composition]]
    else:
        e = model.elements.get(composition)
        if e is None or e.kind != "composition":
            raise TopologyError(f"{composition}: not a composition element or collection")
        cols = [model.collections[c] for c in e.collections if c in model.collections]
    parts: set[Node] = set()
    ordered: Optional[list[Term]] = None
    for col in cols:
        parts |= col.parts
        if col.ordered_parts is not None:
            if set(col.ordered_parts) != col.parts:
                raise TopologyError(
                    f"{col.iri}: ordered parts {[str(p) for p in col.ordered_parts]} "
                    f"disagree with part set {sorted(map(str, col.parts))}"
                )
            ordered = (ordered or []) + list(col.ordered_parts)
    return frozenset(parts), None if ordered is None else tuple(ordered)


def elements_of_level(model: TopologyModel, level: str) -> tuple[frozenset[Node], list[str]]:
    """Members of every level network at ``level``, with warnings."""
    warnings = []
    if level not in DESCRIPTION_LEVELS:
        warnings.append(f"unknown description level {level!r}")
        return frozenset(), warnings
    members: set[Node] = set()
    for lv in model.levels.values():
        if lv.description_level == level:
            members |= lv.members
    return frozenset(members), warnings
