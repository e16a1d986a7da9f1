"""RDF terms, triples and an indexed, immutable triple set."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
TOPO_NS = "https://w3id.org/rail/topo#"

XSD_STRING = XSD_NS + "string"
XSD_INTEGER = XSD_NS + "integer"
XSD_DECIMAL = XSD_NS + "decimal"
XSD_DOUBLE = XSD_NS + "double"
XSD_BOOLEAN = XSD_NS + "boolean"
RDF_LANGSTRING = RDF_NS + "langString"

NUMERIC_DATATYPES = frozenset({XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE})

DEFAULT_PREFIXES: dict[str, str] = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "xsd": XSD_NS,
    "topo": TOPO_NS,
}


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    kind = "iri"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class BNode:
    label: str

    kind = "blank-node"

    def __str__(self) -> str:
        return "_:" + self.label


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: Optional[str] = None

    kind = "literal"

    def __str__(self) -> str:
        return self.lexical

    @property
    def is_numeric(self) -> bool:
        return self.datatype in NUMERIC_DATATYPES


Node = Union[IRI, BNode]
Term = Union[IRI, BNode, Literal]

_KIND_RANK = {"iri": 0, "blank-node": 1, "literal": 2}


def term_key(term: Term) -> tuple:
    """Total order over mixed term kinds (IRIs, then blank nodes, then literals)."""
    if isinstance(term, Literal):
        return (2, term.lexical, term.datatype, term.lang or "")
    if isinstance(term, BNode):
        return (1, term.label, "", "")
    return (0, term.value, "", "")


class Triple(NamedTuple):
    subject: Node
    predicate: IRI
    object: Term


def triple_key(t: Triple) -> tuple:
    return (term_key(t.subject), term_key(t.predicate), term_key(t.object))


class RDF:
    type = IRI(RDF_NS + "type")
    first = IRI(RDF_NS + "first")
    rest = IRI(RDF_NS + "rest")
    nil = IRI(RDF_NS + "nil")


class TripleSet:
    """An immutable set of triples with subject/predicate/object indexes.

    ``prefixes`` is carried along for serialization only; it never affects
    equality of the triple content.
    """

    __slots__ = ("_triples", "_prefixes", "_spo", "_pos")

    def __init__(
        self,
        triples: Iterable[Triple] = (),
        prefixes: Optional[Mapping[str, str]] = None,
    ) -> None:
        checked = []
        for t in triples:
            if not isinstance(t, Triple):
                t = Triple(*t)
            if not isinstance(t.predicate, IRI):
                raise TypeError(f"predicate must be an IRI, got {t.predicate!r}")
            if isinstance(t.subject, Literal):
                raise TypeError(f"subject must be an IRI or blank node, got {t.subject!r}")
            checked.append(t)
        self._triples = frozenset(checked)
        merged = dict(DEFAULT_PREFIXES)
        if prefixes:
            merged.update(prefixes)
        self._prefixes = merged
        spo: dict = defaultdict(lambda: defaultdict(set))
        pos: dict = defaultdict(lambda: defaultdict(set))
        for s, p, o in self._triples:
            spo[s][p].add(o)
            pos[p][o].add(s)
        self._spo = spo
        self._pos = pos

    @property
    def prefixes(self) -> dict[str, str]:
        return dict(self._prefixes)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple) -> bool:
        return tuple(triple) in self._triples

    def __eq__(self, other) -> bool:
        if not isinstance(other, TripleSet):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"TripleSet({len(self)} triples)"

    def sorted(self) -> list[Triple]:
        return sorted(self._triples, key=triple_key)

    def subjects(self, predicate: Optional[IRI] = None, obj: Optional[Term] = None) -> set[Node]:
        if predicate is not None and obj is not None:
            return set(self._pos.get(predicate, {}).get(obj, ()))
        if predicate is not None:
            out: set = set()
            for subs in self._pos.get(predicate, {}).values():
                out |= subs
            return out
        return {s for s, _, o in self._triples if obj is None or o == obj}

    def objects(self, subject: Node, predicate: IRI) -> set[Term]:
        return set(self._spo.get(subject, {}).get(predicate, ()))

    def predicates(self, subject: Node) -> set[IRI]:
        return set(self._spo.get(subject, {}))

    def value(self, subject: Node, predicate: IRI) -> Optional[Term]:
        """Smallest object for (subject, predicate), or None. Deterministic under duplicates."""
        objs = self._spo.get(subject, {}).get(predicate)
        if not objs:
            return None
        return min(objs, key=term_key)

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        if s is not None:
            by_p = self._spo.get(s, {})
            preds = [p] if p is not None else list(by_p)
            for pred in preds:
                for obj in by_p.get(pred, ()):
                    if o is None or obj == o:
                        yield Triple(s, pred, obj)
            return
        if p is not None:
            by_o = self._pos.get(p, {})
            objs = [o] if o is not None else list(by_o)
            for obj in objs:
                for subj in by_o.get(obj, ()):
                    yield Triple(subj, p, obj)
            return
        for t in self._triples:
            if o is None or t.object == o:
                yield t

    def union(self, *others: "TripleSet") -> "TripleSet":
        triples = set(self._triples)
        prefixes = dict(self._prefixes)
        for other in others:
            triples |= other._triples
            prefixes.update(other._prefixes)
        return TripleSet(triples, prefixes)


def topo(local: str) -> IRI:
    return IRI(TOPO_NS + local)
