import random

import pytest

from conftest import clean_text, read
from mutants import MUTATIONS, mutant
from railtopo.model import build_model
from railtopo.turtle import parse_turtle
from railtopo.validation import ERROR, WARNING, rule_catalog, validate


def report_for(text):
    model, _ = build_model(parse_turtle(text))
    return validate(model)


def test_switch_is_clean():
    report = report_for(read("switch.ttl"))
    assert report.errors == []
    assert report.warnings == []


def test_clean_fixture_has_no_findings():
    report = report_for(clean_text())
    assert report.findings == []
    assert report.ok
    assert report.summary["elements"] == 5


def test_self_relation_is_irreflex():
    report = report_for(mutant("IRREFLEX"))
    assert [f.rule_id for f in report.errors] == ["IRREFLEX"]
    assert report.errors[0].subject == "http://example.org/rail/r_front_left"


@pytest.mark.parametrize("rule_id", sorted(MUTATIONS))
def test_mutant_detected_alone(rule_id):
    report = report_for(mutant(rule_id))
    assert [f.rule_id for f in report.errors] == [rule_id]


def test_catalog():
    catalog = rule_catalog()
    ids = [r.rule_id for r in catalog]
    assert "AGG-ACYCLIC" in ids
    assert len(ids) == len(set(ids)) == 15
    assert {r.rule_id for r in catalog if r.severity == ERROR} == set(MUTATIONS)
    assert {r.rule_id for r in catalog if r.severity == WARNING} == {"DANGLING-REF", "UNKNOWN-TERM"}


def test_findings_use_catalog_ids():
    known = {r.rule_id for r in rule_catalog()}
    for rule_id in MUTATIONS:
        assert {f.rule_id for f in report_for(mutant(rule_id)).findings} <= known


def test_deterministic_reports():
    text = mutant("AGG-ACYCLIC") + mutant("NAV-ENUM")
    a, b = report_for(text), report_for(text)
    assert a.to_json() == b.to_json()
    assert a.to_text() == b.to_text()
    keys = [(f.rule_id, f.subject) for f in a.findings]
    assert keys == sorted(keys)


def test_warnings_for_dangling_and_unknown():
    report = report_for(read("oc1.ttl") + "<x> a topo:Signal .")
    assert report.ok
    rules = {f.rule_id for f in report.warnings}
    assert rules == {"DANGLING-REF", "UNKNOWN-TERM"}
    assert report.counts == {ERROR: 0, WARNING: 4}


def test_empty():
    report = report_for("")
    assert report.findings == []
    assert "0 errors, 0 warnings" in report.to_text()
    assert "model: empty" in report.to_text()


def test_card_one_missing_property():
    report = report_for(read("switch.ttl").replace('    topo:navigability "Both" .\n\nex:r_front_left', "    .\n\nex:r_front_left"))
    assert [(f.rule_id, f.message) for f in report.errors] == [
        ("CARD-1", "PositionedRelation requires exactly one navigability, found 0")
    ]


def test_position_must_be_integer():
    report = report_for(read("switch.ttl").replace("topo:positionOnA 1 ;\n    topo:elementB ex:switch_front", "topo:positionOnA 1.0 ;\n    topo:elementB ex:switch_front"))
    assert [f.rule_id for f in report.errors] == ["POS-ENUM"]


def test_non_numeric_coordinate():
    report = report_for(read("switch.ttl").replace("ex:track_ic1 a topo:IntrinsicCoordinate ; topo:intrinsicCoord 1.0", 'ex:track_ic1 a topo:IntrinsicCoordinate ; topo:intrinsicCoord "end"'))
    assert {f.rule_id for f in report.errors} == {"COORD-RANGE", "END-COORDS"}


def _cycle_nodes_oracle(graph):
    """Nodes on some cycle: depth-first search from each node back to itself."""
    on_cycle = set()
    for start in graph:
        seen, stack = set(), list(graph[start])
        while stack:
            v = stack.pop()
            if v == start:
                on_cycle.add(start)
                break
            if v in seen:
                continue
            seen.add(v)
            stack.extend(graph.get(v, ()))
    return on_cycle


@pytest.mark.parametrize("seed", range(60))
def test_acyclic_rule_matches_dfs_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    graph = {i: {rng.randrange(n) for _ in range(rng.randint(0, 2))} for i in range(n)}
    lines = []
    for i, parts in graph.items():
        lines.append(f"<c{i}> a topo:CompositionNetElement ; topo:elementCollection <col{i}> .")
        if parts:
            lines.append(f"<col{i}> a topo:UnorderedCollection ; topo:elementPart {', '.join(f'<c{p}>' for p in sorted(parts))} .")
    report = report_for("\n".join(lines))
    flagged = set()
    for f in report.by_rule("AGG-ACYCLIC"):
        flagged |= {int(d.rsplit("c", 1)[1]) for d in f.detail}
    assert flagged == _cycle_nodes_oracle(graph)
