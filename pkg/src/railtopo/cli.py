"""Command line entry point: ``railtopo validate|reaches|reachable|paths``."""

from __future__ import annotations

import hashlib
import json
import sys
from typing import Optional

import click

from .model import ModelError, TopologyError, TopologyModel, build_model
from .rdf import TripleSet
from .reachability import (
    DEFAULT_MAX_LENGTH,
    DEFAULT_MAX_PATHS,
    enumerate_paths,
    materialize_reaches,
    reachable_elements,
    reaches_to_dot,
    reaches_to_triples,
    traversal_report,
)
from .turtle import TurtleSyntaxError, parse_turtle, serialize_turtle
from .validation import validate

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INPUT = 2


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def load_inputs(paths: tuple[str, ...]) -> TripleSet:
    """Parse and merge input files; ``-`` reads standard input."""
    merged = TripleSet()
    for path in paths:
        try:
            if path == "-":
                text = sys.stdin.buffer.read().decode("utf-8")
            else:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
        except (OSError, UnicodeDecodeError) as exc:
            _fail(f"cannot read {path}: {exc}", EXIT_INPUT)
        # content-derived blank node prefix keeps merging order-independent
        prefix = "f" + hashlib.sha1(text.encode("utf-8")).hexdigest()[:8]
        try:
            merged = merged.union(parse_turtle(text, bnode_prefix=prefix))
        except TurtleSyntaxError as exc:
            _fail(f"{path}: {exc}", EXIT_INPUT)
    return merged


def load_model(paths: tuple[str, ...]) -> TopologyModel:
    data = load_inputs(paths)
    try:
        model, warnings = build_model(data)
    except ModelError as exc:
        _fail(str(exc), EXIT_INPUT)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    return model


def _write(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        click.echo(text, nl=False)
        return
    try:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        _fail(f"cannot write {output}: {exc}", EXIT_INPUT)


inputs_arg = click.argument("inputs", nargs=-1, required=True)
output_opt = click.option("--output", "-o", default=None, help="Output file (default: stdout).")


@click.group()
def main() -> None:
    """Rail topology data: validation, reachability and path queries."""


@main.command("validate")
@inputs_arg
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@output_opt
def cmd_validate(inputs, fmt, output):
    """Check constraints; exit 1 if any error is found."""
    model = load_model(inputs)
    report = validate(model)
    _write(report.to_json() if fmt == "json" else report.to_text(), output)
    sys.exit(EXIT_OK if report.ok else EXIT_DOMAIN)


@main.command("reaches")
@inputs_arg
@click.option("--format", "fmt", type=click.Choice(["turtle", "dot"]), default="turtle")
@output_opt
def cmd_reaches(inputs, fmt, output):
    """Materialize the reaches relation as Turtle or DOT."""
    model = load_model(inputs)
    graph = materialize_reaches(model)
    for rel, reason in graph.skipped:
        click.echo(f"skipped {rel}: {reason}", err=True)
    if fmt == "dot":
        _write(reaches_to_dot(model, graph), output)
    else:
        _write(serialize_turtle(reaches_to_triples(graph)), output)


@main.command("reachable")
@inputs_arg
@click.option("--from", "source", required=True, help="topo:name of the source linear element.")
@click.option("--end", type=click.IntRange(0, 1), required=True, help="End at which the train leaves the source.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@output_opt
def cmd_reachable(inputs, source, end, fmt, output):
    """List elements reachable without changing direction."""
    model = load_model(inputs)
    graph = materialize_reaches(model)
    try:
        names = sorted(reachable_elements(model, graph, source, end))
    except TopologyError as exc:
        _fail(str(exc), EXIT_DOMAIN)
    if fmt == "json":
        _write(json.dumps(names) + "\n", output)
    else:
        _write("".join(n + "\n" for n in names), output)


@main.command("paths")
@inputs_arg
@click.option("--from", "source", required=True)
@click.option("--end", type=click.IntRange(0, 1), required=True)
@click.option("--to", "target", required=True)
@click.option("--max-paths", type=click.IntRange(min=1), default=DEFAULT_MAX_PATHS, show_default=True)
@click.option("--max-length", type=click.IntRange(min=1), default=DEFAULT_MAX_LENGTH, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@output_opt
def cmd_paths(inputs, source, end, target, max_paths, max_length, fmt, output):
    """Enumerate simple paths, with orientation and applicable entities per step."""
    model = load_model(inputs)
    graph = materialize_reaches(model)
    try:
        result = enumerate_paths(model, graph, (source, end), target, max_paths, max_length)
    except TopologyError as exc:
        _fail(str(exc), EXIT_DOMAIN)

    lines = []
    for i, path in enumerate(result.paths, 1):
        report = traversal_report(model, path)
        if fmt == "json":
            for j, step in enumerate(report, 1):
                record = {
                    "path": i,
                    "step": j,
                    "element": model.label(step.element),
                    "iri": str(step.element),
                    "direction": step.direction,
                    "entities": [
                        {
                            "entity": model.label(h.entity),
                            "iri": str(h.entity),
                            "coordinate": None if h.coordinate is None else str(h.coordinate),
                            "applicationDirection": h.application_direction,
                        }
                        for h in step.entities
                    ],
                }
                lines.append(json.dumps(record, sort_keys=True))
        else:
            lines.append(f"path {i}:")
            for step in report:
                line = f"  {model.label(step.element)} {step.direction}"
                if step.entities:
                    line += " [" + ", ".join(
                        f"{model.label(h.entity)}@{h.coordinate}" for h in step.entities
                    ) + "]"
                lines.append(line)
    if fmt == "json":
        lines.append(json.dumps({"summary": {"paths": len(result.paths), "truncated": result.truncated}}, sort_keys=True))
    else:
        n = len(result.paths)
        lines.append(f"{n} path{'s' if n != 1 else ''}" + (" (truncated)" if result.truncated else ""))
    _write("\n".join(lines) + "\n", output)


if __name__ == "__main__":
    main()
