"""Directed reachability between intrinsic coordinates of linear elements.

A ``reaches`` edge goes from the coordinate at which a train leaves one
linear element to the far-end coordinate of the next linear element it
enters, so the transitive closure chains whole element traversals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterator, Optional

from .model import T, TopologyError, TopologyModel, element_end
from .rdf import Node, Triple, TripleSet, term_key

ZERO_TO_ONE = "zero-to-one"
ONE_TO_ZERO = "one-to-zero"

DEFAULT_MAX_PATHS = 1000
DEFAULT_MAX_LENGTH = 10000

# navigability -> permitted crossing directions
_PERMITS = {"AB": ("AB",), "BA": ("BA",), "Both": ("AB", "BA"), "None": ()}


@dataclass(frozen=True, order=True)
class ReachesEdge:
    source: Node
    target: Node
    via: Node


@dataclass(frozen=True)
class Endpoint:
    element: Node
    end: int


@dataclass
class ReachesGraph:
    edges: frozenset[ReachesEdge] = frozenset()
    endpoints: dict[Node, Endpoint] = field(default_factory=dict)
    skipped: list[tuple[Node, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        adjacency: dict[Node, set[Node]] = {}
        for e in self.edges:
            adjacency.setdefault(e.source, set()).add(e.target)
        self._adjacency = {
            s: tuple(sorted(ts, key=term_key)) for s, ts in adjacency.items()
        }

    def successors(self, coordinate: Node) -> tuple[Node, ...]:
        return self._adjacency.get(coordinate, ())

    def pairs(self) -> set[tuple[Node, Node]]:
        return {(e.source, e.target) for e in self.edges}

    def sorted_edges(self) -> list[ReachesEdge]:
        return sorted(self.edges, key=lambda e: (term_key(e.source), term_key(e.target), term_key(e.via)))

    def closure(self, start: Node) -> set[Node]:
        """Coordinates reachable from ``start`` in one or more steps."""
        seen: set[Node] = set()
        queue = deque(self.successors(start))
        while queue:
            c = queue.popleft()
            if c in seen:
                continue
            seen.add(c)
            queue.extend(self.successors(c))
        return seen


def materialize_reaches(model: TopologyModel) -> ReachesGraph:
    """Compute every ``reaches`` edge implied by the positioned relations."""
    edges: set[ReachesEdge] = set()
    endpoints: dict[Node, Endpoint] = {}
    skipped: list[tuple[Node, str]] = []

    def end_of(element: Node, end: int) -> Node:
        c = element_end(model, element, end)
        endpoints[c] = Endpoint(element, end)
        return c

    for rel in sorted(model.relations.values(), key=lambda r: term_key(r.iri)):
        nav = rel.navigability
        if nav not in _PERMITS:
            skipped.append((rel.iri, f"invalid navigability {nav!r}"))
            continue
        if rel.element_a is None or rel.element_b is None:
            skipped.append((rel.iri, "missing elementA or elementB"))
            continue
        if rel.position_on_a not in (0, 1) or rel.position_on_b not in (0, 1):
            skipped.append((rel.iri, "position not in {0, 1}"))
            continue
        if rel.element_a == rel.element_b:
            skipped.append((rel.iri, "relation joins an element to itself"))
            continue
        ends = {
            "AB": (rel.element_a, rel.position_on_a, rel.element_b, rel.position_on_b),
            "BA": (rel.element_b, rel.position_on_b, rel.element_a, rel.position_on_a),
        }
        for direction in _PERMITS[nav]:
            src, u_src, dst, u_dst = ends[direction]
            non_linear = [
                e for e in (src, dst)
                if e not in model.elements or model.elements[e].kind != "linear"
            ]
            if non_linear:
                skipped.append((rel.iri, f"non-linear endpoint {non_linear[0]}"))
                break
            try:
                source = end_of(src, u_src)
                target = end_of(dst, 1 - u_dst)
            except TopologyError as exc:
                skipped.append((rel.iri, str(exc)))
                continue
            edges.add(ReachesEdge(source, target, rel.iri))

    return ReachesGraph(frozenset(edges), endpoints, skipped)


def reaches_to_triples(graph: ReachesGraph) -> TripleSet:
    return TripleSet(Triple(s, T.reaches, t) for s, t in graph.pairs())


def _resolve(model: TopologyModel, name: str) -> Node:
    found = model.elements_named(name, kind="linear")
    if not found:
        raise TopologyError(f"no linear element named {name!r}")
    if len(found) > 1:
        raise TopologyError(
            f"ambiguous name {name!r}: {', '.join(str(e.iri) for e in found)}"
        )
    return found[0].iri


def _owner(model: TopologyModel, graph: ReachesGraph, coordinate: Node) -> Optional[Node]:
    ep = graph.endpoints.get(coordinate)
    if ep is not None:
        return ep.element
    coord = model.coordinates.get(coordinate)
    if coord is not None and coord.parent in model.positioning_systems:
        return model.positioning_systems[coord.parent].owner
    return None


def reachable_elements(model: TopologyModel, graph: ReachesGraph, source_name: str, end: int) -> set[str]:
    """Names of elements reachable when leaving ``source_name`` at ``end``."""
    source = _resolve(model, source_name)
    start = element_end(model, source, end)
    names = set()
    for c in graph.closure(start):
        owner = _owner(model, graph, c)
        if owner is not None:
            names.add(model.label(owner))
    return names


# -- paths -------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    element: Node
    direction: str


@dataclass(frozen=True)
class Traversal:
    steps: tuple[Step, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)


@dataclass(frozen=True)
class PathResult:
    paths: list[Traversal]
    truncated: bool


def _direction(exit_end: int) -> str:
    return ZERO_TO_ONE if exit_end == 1 else ONE_TO_ZERO


def _resolve_element(model: TopologyModel, ref) -> Node:
    if isinstance(ref, str):
        return _resolve(model, ref)
    if ref not in model.elements:
        raise TopologyError(f"{ref}: not a net element")
    return ref


def enumerate_paths(
    model: TopologyModel,
    graph: ReachesGraph,
    source: tuple,
    target,
    max_paths: int = DEFAULT_MAX_PATHS,
    max_length: int = DEFAULT_MAX_LENGTH,
) -> PathResult:
    """All simple traversals from a source exit to any coordinate of ``target``.

    ``source`` is ``(element, end)``; elements may be given by IRI or name.
    A traversal starts with the source element itself and ends at the first
    arrival on ``target``; states are (element, direction) pairs and never
    repeat within one traversal. Results come in lexicographic order of
    step element IRIs; ``truncated`` is set when a limit cut the search.
    """
    src_ref, src_end = source
    src = _resolve_element(model, src_ref)
    dst = _resolve_element(model, target)
    start = element_end(model, src, src_end)

    def state(c: Node) -> tuple[Node, str]:
        ep = graph.endpoints[c]
        return (ep.element, _direction(ep.end))

    def child_key(c: Node):
        el, d = state(c)
        return (term_key(el), d, term_key(c))

    first = (src, _direction(src_end))
    paths: list[Traversal] = []
    truncated = False
    path_states = [first]
    on_path = {first}
    stack = [iter(sorted(graph.successors(start), key=child_key))]

    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(path_states.pop())
            continue
        st = state(nxt)
        if st in on_path:
            continue
        if len(path_states) + 1 > max_length:
            truncated = True
            continue
        if st[0] == dst:
            if len(paths) >= max_paths:
                truncated = True
                break
            paths.append(Traversal(tuple(Step(e, d) for e, d in path_states + [st])))
            continue
        path_states.append(st)
        on_path.add(st)
        stack.append(iter(sorted(graph.successors(nxt), key=child_key)))

    return PathResult(paths, truncated)


# -- traversal report ---------------------------------------------------------


@dataclass(frozen=True)
class LocatedHit:
    entity: Node
    location: Node
    coordinate: Optional[Decimal]
    application_direction: str


@dataclass(frozen=True)
class ReportStep:
    element: Node
    direction: str
    entities: tuple[LocatedHit, ...]


def _applies(application_direction: Optional[str], direction: str) -> bool:
    if application_direction == "both":
        return True
    if application_direction == "normal":
        return direction == ZERO_TO_ONE
    if application_direction == "reverse":
        return direction == ONE_TO_ZERO
    return False


def traversal_report(model: TopologyModel, traversal: Traversal) -> list[ReportStep]:
    """Per step, the located entities that apply in the direction of travel."""
    by_element: dict[Node, list[LocatedHit]] = {}
    for ent in model.entities.values():
        for loc_ref in ent.locations:
            loc = model.spot_locations.get(loc_ref)
            if loc is None or loc.on_element is None:
                continue
            by_element.setdefault(loc.on_element, []).append(
                LocatedHit(ent.iri, loc.iri, loc.coordinate, loc.application_direction)
            )

    report = []
    for step in traversal:
        hits = [h for h in by_element.get(step.element, []) if _applies(h.application_direction, step.direction)]
        sign = 1 if step.direction == ZERO_TO_ONE else -1
        hits.sort(
            key=lambda h: (
                h.coordinate is None,
                sign * h.coordinate if h.coordinate is not None else 0,
                term_key(h.entity),
                term_key(h.location),
            )
        )
        report.append(ReportStep(step.element, step.direction, tuple(hits)))
    return report


# -- DOT -----------------------------------------------------------------------


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def reaches_to_dot(model: TopologyModel, graph: ReachesGraph) -> str:
    """Coordinate-level digraph: both end coordinates of every linear element in a relation."""
    nodes: dict[Node, str] = {}
    for rel in model.relations.values():
        for el in (rel.element_a, rel.element_b):
            e = model.elements.get(el) if el is not None else None
            if e is None or e.kind != "linear":
                continue
            for end in (0, 1):
                try:
                    nodes[element_end(model, el, end)] = f"{e.label}@{end}"
                except TopologyError:
                    pass
    for c, ep in graph.endpoints.items():
        nodes.setdefault(c, f"{model.label(ep.element)}@{ep.end}")

    lines = ["digraph reaches {", "  rankdir=LR;"]
    for c in sorted(nodes, key=term_key):
        lines.append(f"  {_dot_id(str(c))} [label={_dot_id(nodes[c])}];")
    for s, t in sorted(graph.pairs(), key=lambda p: (term_key(p[0]), term_key(p[1]))):
        lines.append(f"  {_dot_id(str(s))} -> {_dot_id(str(t))};")
    lines.append("}")
    return "\n".join(lines) + "\n"
