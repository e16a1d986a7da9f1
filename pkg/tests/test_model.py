import random
from decimal import Decimal

import pytest

from conftest import EX, clean_text, read
from topogen import random_document, random_topology, to_turtle
from railtopo.model import (
    ModelError,
    TopologyError,
    build_model,
    element_end,
    element_parts,
    elements_of_level,
    model_to_triples,
)
from railtopo.rdf import IRI, TripleSet
from railtopo.turtle import isomorphic, parse_turtle, serialize_turtle


def E(local):
    return IRI(EX + local)


def N(local):
    return IRI("http://example.org/" + local)


def test_oc1_model(oc1_text):
    model, warnings = build_model(parse_turtle(oc1_text))
    assert list(model.collections) == [N("oc1")]
    oc1 = model.collections[N("oc1")]
    assert oc1.ordered
    assert oc1.parts == {N("ne1"), N("ne2"), N("ne3")}
    assert oc1.ordered_parts == (N("ne2"), N("ne1"), N("ne3"))
    assert oc1.sequence == 1
    # the parts are never typed
    assert any("elementPart refers to" in w for w in warnings)


def test_empty_model():
    model, warnings = build_model(TripleSet())
    assert warnings == []
    assert all(n == 0 for n in model.summary().values())


def test_switch_counts(switch_net):
    assert len(switch_net.elements) == 4
    assert {e.kind for e in switch_net.elements.values()} == {"linear"}
    assert len(switch_net.coordinates) == 8
    assert len(switch_net.relations) == 3
    r = switch_net.relations[E("r_front_right")]
    assert (r.element_a, r.position_on_a, r.element_b, r.position_on_b, r.navigability) == (
        E("switch_front"), 1, E("switch_right"), 1, "Both"
    )


def test_literal_in_resource_position_aborts():
    with pytest.raises(ModelError, match="elementA"):
        build_model(parse_turtle('<r> a topo:PositionedRelation ; topo:elementA "track" .'))


def test_unknown_vocabulary_warns():
    model, warnings = build_model(parse_turtle("<x> a topo:Signal ; topo:colour 3 ; <http://other/p> 1 ."))
    assert any("unknown type https://w3id.org/rail/topo#Signal" in w for w in warnings)
    assert any("unknown predicate https://w3id.org/rail/topo#colour" in w for w in warnings)
    assert len(model.triples) == 3


def test_kind_disjointness_keeps_one_index():
    model, warnings = build_model(parse_turtle("<x> a topo:LinearElement, topo:NonLinearElement ."))
    assert model.elements[N("x")].kind == "linear"
    assert any("typed as both" in w for w in warnings)


class TestElementEnd:
    def test_switch_track_end(self, switch_net):
        c = element_end(switch_net, E("track"), 1)
        assert c == E("track_ic1")
        assert switch_net.coordinates[c].value == Decimal("1.0")
        assert element_end(switch_net, E("track"), 0) == E("track_ic0")

    def test_no_positioning(self):
        model, _ = build_model(parse_turtle("<x> a topo:LinearElement ."))
        with pytest.raises(TopologyError, match="no positioning"):
            element_end(model, N("x"), 0)

    def test_intermediate_ignored(self):
        model, _ = build_model(
            parse_turtle(
                "<x> a topo:LinearElement ; topo:associatedPositioningSystem <aps> ."
                "<aps> topo:intrinsicCoordinate <c0>, <c5>, <c1> ."
                "<c0> topo:intrinsicCoord 0.0 . <c5> topo:intrinsicCoord 0.5 . <c1> topo:intrinsicCoord 1.0 ."
            )
        )
        assert element_end(model, N("x"), 0) == N("c0")
        assert element_end(model, N("x"), 1) == N("c1")

    def test_missing_and_ambiguous(self):
        model, _ = build_model(
            parse_turtle(
                "<x> a topo:LinearElement ; topo:associatedPositioningSystem <aps> ."
                "<aps> topo:intrinsicCoordinate <a>, <b> ."
                "<a> topo:intrinsicCoord 0.0 . <b> topo:intrinsicCoord 0 ."
            )
        )
        with pytest.raises(TopologyError, match="missing end coordinate 1"):
            element_end(model, N("x"), 1)
        with pytest.raises(TopologyError, match="ambiguous"):
            element_end(model, N("x"), 0)


class TestElementParts:
    def test_oc1(self, oc1_text):
        model, _ = build_model(parse_turtle(oc1_text))
        parts, ordered = element_parts(model, N("oc1"))
        assert parts == {N("ne1"), N("ne2"), N("ne3")}
        assert ordered == (N("ne2"), N("ne1"), N("ne3"))

    def test_composition_with_unordered(self):
        model, _ = build_model(
            parse_turtle(
                "<w> a topo:CompositionNetElement ; topo:elementCollection <uc> ."
                "<uc> a topo:UnorderedCollection ; topo:elementPart <p>, <q> ."
            )
        )
        assert element_parts(model, N("w")) == (frozenset({N("p"), N("q")}), None)

    def test_mismatch(self, oc1_text):
        mutated = oc1_text.replace("<ne1>, <ne2>, <ne3>", "<ne1>, <ne2>")
        model, _ = build_model(parse_turtle(mutated))
        with pytest.raises(TopologyError, match="disagree"):
            element_parts(model, N("oc1"))


class TestLevels:
    def test_micro_level(self):
        model, _ = build_model(parse_turtle(clean_text()))
        members, warnings = elements_of_level(model, "micro")
        assert members == {E("track"), E("switch_front"), E("switch_left"), E("switch_right")}
        assert warnings == []
        assert elements_of_level(model, "macro") == (frozenset(), [])

    def test_two_micro_levels_union(self):
        model, _ = build_model(
            parse_turtle(
                '<l1> a topo:LevelNetwork ; topo:descriptionLevel "micro" ; topo:networkResource <a>, <b> .'
                '<l2> a topo:LevelNetwork ; topo:descriptionLevel "micro" ; topo:networkResource <c> .'
                '<l3> a topo:LevelNetwork ; topo:descriptionLevel "meso" ; topo:networkResource <d> .'
            )
        )
        members, _ = elements_of_level(model, "micro")
        assert members == {N("a"), N("b"), N("c")}

    def test_unknown_level(self, switch_net):
        members, warnings = elements_of_level(switch_net, "nano")
        assert members == frozenset()
        assert warnings


class TestModelToTriples:
    def test_empty(self):
        model, _ = build_model(TripleSet())
        assert len(model_to_triples(model)) == 0

    def test_oc1_isomorphic_to_source(self, oc1_text):
        ts = parse_turtle(oc1_text)
        model, _ = build_model(ts)
        assert isomorphic(model_to_triples(model), ts)

    def test_clean_fixture_round_trip(self):
        model, _ = build_model(parse_turtle(clean_text()))
        again, _ = build_model(model_to_triples(model))
        assert again == model

    @pytest.mark.parametrize("seed", range(50))
    def test_random_models_round_trip(self, seed):
        rng = random.Random(seed)
        text = to_turtle(random_topology(rng, nonlinear=True), rng) if seed % 2 else random_document(rng)
        model, _ = build_model(parse_turtle(text))
        emitted = model_to_triples(model)
        again, _ = build_model(emitted)
        assert again == model
        # and the emitted triples survive Turtle
        back, _ = build_model(parse_turtle(serialize_turtle(emitted)))
        assert back == model
