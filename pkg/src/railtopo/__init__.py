"""Rail topology instance data: Turtle I/O, typed model, directed reachability and validation."""

from .model import (
    ModelError,
    TopologyError,
    TopologyModel,
    build_model,
    element_end,
    element_parts,
    elements_of_level,
    model_to_triples,
)
from .rdf import IRI, BNode, Literal, Triple, TripleSet
from .reachability import (
    ReachesGraph,
    Traversal,
    enumerate_paths,
    materialize_reaches,
    reachable_elements,
    reaches_to_dot,
    reaches_to_triples,
    traversal_report,
)
from .turtle import (
    CollectionError,
    TurtleSyntaxError,
    expand_collection,
    isomorphic,
    parse_turtle,
    serialize_turtle,
)
from .validation import ValidationReport, rule_catalog, validate

__version__ = "0.1.0"
