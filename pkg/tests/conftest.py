from pathlib import Path

import pytest

from railtopo import build_model, parse_turtle

FIXTURES = Path(__file__).parent / "fixtures"
EX = "http://example.org/rail/"


def read(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def clean_text() -> str:
    return read("switch.ttl") + read("clean_extra.ttl")


@pytest.fixture
def switch_text():
    return read("switch.ttl")


@pytest.fixture
def switch_net(switch_text):
    model, warnings = build_model(parse_turtle(switch_text))
    assert warnings == []
    return model


@pytest.fixture
def diamond():
    model, _ = build_model(parse_turtle(read("diamond.ttl")))
    return model


@pytest.fixture
def oc1_text():
    return read("oc1.ttl")
