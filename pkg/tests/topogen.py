"""Random topologies, Turtle rendering and a brute-force train-walk oracle.

The oracle works on the abstract topology only. It never touches the
parser, the model or the reachability code it is compared against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

NAVS = ("AB", "BA", "Both", "None")
EX = "http://example.org/gen/"


@dataclass
class Relation:
    a: int
    b: int
    pos_a: int
    pos_b: int
    nav: str


@dataclass
class Topology:
    n: int
    relations: list[Relation] = field(default_factory=list)
    nonlinear: set[int] = field(default_factory=set)
    # element -> extra intermediate coordinate values
    extras: dict[int, list[str]] = field(default_factory=dict)

    def linear(self, i: int) -> bool:
        return i not in self.nonlinear


def random_topology(rng: random.Random, max_elements: int = 20, nonlinear: bool = False) -> Topology:
    n = rng.randint(1, max_elements)
    topo = Topology(n)
    for _ in range(rng.randint(0, 2 * n)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b and rng.random() < 0.9:
            continue
        topo.relations.append(Relation(a, b, rng.randint(0, 1), rng.randint(0, 1), rng.choice(NAVS)))
    if nonlinear:
        topo.nonlinear = {i for i in range(n) if rng.random() < 0.15}
    for i in range(n):
        if rng.random() < 0.3:
            topo.extras[i] = [rng.choice(["0.25", "0.5", "0.75"])]
    return topo


def random_tree(rng: random.Random, max_elements: int = 20) -> Topology:
    n = rng.randint(2, max_elements)
    topo = Topology(n)
    for i in range(1, n):
        j = rng.randrange(i)
        if rng.random() < 0.5:
            topo.relations.append(Relation(i, j, rng.randint(0, 1), rng.randint(0, 1), "Both"))
        else:
            topo.relations.append(Relation(j, i, rng.randint(0, 1), rng.randint(0, 1), "Both"))
    return topo


def coord_iri(i: int, end: int) -> str:
    return f"{EX}e{i}_c{end}"


def element_iri(i: int) -> str:
    return f"{EX}e{i}"


def to_turtle(topo: Topology, rng: random.Random | None = None) -> str:
    rng = rng or random.Random(0)
    lines = ["@prefix topo: <https://w3id.org/rail/topo#> .", f"@prefix g: <{EX}> ."]
    for i in range(topo.n):
        cls = "topo:LinearElement" if topo.linear(i) else "topo:NonLinearElement"
        lines.append(f'g:e{i} a {cls} ; topo:name "e{i}" ; topo:associatedPositioningSystem g:e{i}_aps .')
        coords = [f"g:e{i}_c0", f"g:e{i}_c1"] + [f"g:e{i}_x{k}" for k in range(len(topo.extras.get(i, [])))]
        lines.append(f"g:e{i}_aps a topo:AssociatedPositioningSystem ; topo:intrinsicCoordinate {', '.join(coords)} .")
        zero = rng.choice(["0.0", "0", "0.00"])
        one = rng.choice(["1.0", "1", "1.000"])
        lines.append(f"g:e{i}_c0 a topo:IntrinsicCoordinate ; topo:intrinsicCoord {zero} .")
        lines.append(f"g:e{i}_c1 a topo:IntrinsicCoordinate ; topo:intrinsicCoord {one} .")
        for k, v in enumerate(topo.extras.get(i, [])):
            lines.append(f"g:e{i}_x{k} a topo:IntrinsicCoordinate ; topo:intrinsicCoord {v} .")
    for k, r in enumerate(topo.relations):
        lines.append(
            f"g:r{k} a topo:PositionedRelation ; topo:elementA g:e{r.a} ; topo:positionOnA {r.pos_a} ; "
            f'topo:elementB g:e{r.b} ; topo:positionOnB {r.pos_b} ; topo:navigability "{r.nav}" .'
        )
    return "\n".join(lines) + "\n"


def train_walk_edges(topo: Topology) -> set[tuple[str, str]]:
    """Single-hop continuations of a rigid train, as (exit coordinate, next exit coordinate).

    A train leaving element ``e`` at end ``h`` crosses every relation that
    joins that end and lets it pass in its direction, enters the neighbour at
    the joined end and, without reversing, rolls to the neighbour's far end.
    """
    edges = set()
    for e in range(topo.n):
        if not topo.linear(e):
            continue
        for h in (0, 1):
            for r in topo.relations:
                if r.a == r.b:
                    continue
                moves = []
                if r.a == e and r.pos_a == h and r.nav in ("AB", "Both"):
                    moves.append((r.b, r.pos_b))
                if r.b == e and r.pos_b == h and r.nav in ("BA", "Both"):
                    moves.append((r.a, r.pos_a))
                for nxt, entered_at in moves:
                    if topo.linear(nxt):
                        edges.add((coord_iri(e, h), coord_iri(nxt, 1 - entered_at)))
    return edges


# -- generic RTO-ish documents for Turtle round trips ------------------------

_STRINGS = ["plain", 'with "quotes"', "tab\tand\nnewline", "unicodé ✓", "back\\slash", "", "semi;colon, comma."]


def random_document(rng: random.Random) -> str:
    """A Turtle document exercising most of the supported syntax."""
    topo = random_topology(rng, max_elements=6)
    text = to_turtle(topo, rng)
    lines = [text, "@prefix ex: <http://example.org/doc#> .", "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>"]
    for k in range(rng.randint(0, 3)):
        members = " ".join(f"g:e{rng.randrange(topo.n)}" for _ in range(rng.randint(0, 4)))
        parts = ", ".join(sorted({f"g:e{rng.randrange(topo.n)}" for _ in range(2)}))
        lines.append(
            f"ex:col{k} a topo:{rng.choice(['OrderedCollection', 'UnorderedCollection'])} ;\n"
            f"    topo:sequence {k} ;\n    topo:elementPartList ( {members} ) ;\n    topo:elementPart {parts} ."
        )
    for k in range(rng.randint(0, 3)):
        s = rng.choice(_STRINGS).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
        lit = rng.choice(
            [f'"{s}"', f'"{s}"@en', "true", "false", "-12", "+3.25", "1.5e3", f'"{s}"^^xsd:token', '"2"^^<http://www.w3.org/2001/XMLSchema#integer>']
        )
        lines.append(f"ex:thing{k} ex:p{k} {lit} ; ex:q [ ex:r {lit} ; ex:s ( 1 2 ( 3 ) ) ] .")
    if rng.random() < 0.5:
        lines.append("_:shared ex:loop _:shared . _:x ex:to _:shared .")
    if rng.random() < 0.5:
        lines.append("[ ex:anon ex:thing0 ] .")
    if rng.random() < 0.3:
        lines.append("( ex:a ex:b ) ex:listSubject true .")
    if rng.random() < 0.3:
        # two identical lists hanging off one subject
        lines.append("ex:twin ex:l ( ex:a ), ( ex:a ) .")
    return "\n".join(lines) + "\n"
