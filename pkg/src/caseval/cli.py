"""Command-line interface.

Exit codes are stable so pipelines can gate on them:
  0  success (validation clean / case closed / engines agree)
  1  case open, validation errors, or verdict failure
  2  usage or parse errors
  3  internal invariant breach (engine disagreement, inconsistent model)
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import Optional

import click

from . import load_fixture, FIXTURE_NAMES
from .aspexport import export_program, render_program
from .caseio import CaseDocument, ParseError, parse_document, render_graphviz, serialize_document
from .confidence import ConfidenceConfig, propagate_confidence
from .generate import random_case
from .model import CaseGraph, has_errors, validate_structure
from .oracle import InconsistentProgramError, oracle_assess
from .propagate import (
    DEFAULT_THRESHOLDS,
    ConfirmationThresholds,
    InvalidCaseError,
    assess,
    case_status,
)

EXIT_OK = 0
EXIT_OPEN = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3

THRESHOLDS_ENV = "CASEVAL_THRESHOLDS"


def _thresholds() -> ConfirmationThresholds:
    raw = os.environ.get(THRESHOLDS_ENV)
    if not raw:
        return DEFAULT_THRESHOLDS
    try:
        pos_text, neg_text = raw.split(",")
        return ConfirmationThresholds(t_pos=float(pos_text), t_neg=float(neg_text))
    except ValueError as exc:
        raise click.ClickException(
            f"bad {THRESHOLDS_ENV} (expected 't_pos,t_neg' with t_pos > 0 > t_neg): {exc}"
        ) from exc


def _load(path: str, strict: bool) -> CaseDocument:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc.strerror}", err=True)
        sys.exit(EXIT_USAGE)
    try:
        return parse_document(text, strict=strict)
    except ParseError as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_USAGE)


@click.group()
@click.version_option()
def main() -> None:
    """Evaluate assurance cases with defeaters."""


@main.command()
@click.argument("path", type=click.Path())
@click.option("--strict/--lenient", default=True, help="Reject unknown fields (default: strict).")
def validate(path: str, strict: bool) -> None:
    """Check structural well-formedness; exit 1 on any ERROR diagnostic."""
    document = _load(path, strict)
    diagnostics = validate_structure(document.case)
    for diagnostic in diagnostics:
        click.echo(str(diagnostic))
    if not diagnostics:
        click.echo("ok: structure is valid")
    sys.exit(EXIT_OPEN if has_errors(diagnostics) else EXIT_OK)


@main.command("assess")
@click.argument("path", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["table", "structured"]), default="table")
@click.option("--explain", is_flag=True, help="Show the rule behind each verdict.")
def assess_cmd(path: str, fmt: str, explain: bool) -> None:
    """Propagate verdicts; exit 0 only if the case is closed."""
    document = _load(path, strict=True)
    graph = document.case
    thresholds = _thresholds()
    try:
        result = assess(graph, thresholds)
    except InvalidCaseError as exc:
        for diagnostic in exc.diagnostics:
            click.echo(str(diagnostic), err=True)
        sys.exit(EXIT_OPEN)
    status = case_status(graph, result)
    if fmt == "structured":
        payload = {
            "case": graph.name,
            "verdicts": result.to_json_dict(),
            "status": status.to_json_dict(),
        }
        if explain:
            for node_id, entry in payload["verdicts"].items():
                explanation = result.trace[node_id]
                entry["inputs"] = [
                    {"node": i.node, "role": i.role, "verdict": i.verdict.value}
                    for i in explanation.inputs
                ]
                entry["attackers"] = [
                    {"node": a.node, "verdict": a.verdict.value}
                    for a in explanation.attackers
                ]
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        width = max((len(n) for n in result.assessments), default=4)
        for node_id in sorted(result.assessments):
            verdict = result.assessments[node_id]
            line = f"{node_id:<{width}}  {verdict.value:<11}"
            if explain:
                line += f"  {result.trace[node_id].effective_rule}"
            click.echo(line)
        click.echo(f"case status: {'closed' if status.closed else 'open'}")
        for reason in status.reasons:
            click.echo(f"  - {reason}")
    sys.exit(EXIT_OK if status.closed else EXIT_OPEN)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--overrides", "overrides_path", type=click.Path(), default=None,
              help="JSON file of node-id to confidence overrides.")
@click.option("--format", "fmt", type=click.Choice(["table", "structured"]), default="table")
def confidence(path: str, overrides_path: Optional[str], fmt: str) -> None:
    """Propagate confidence (sum of doubts) over the assessed case."""
    document = _load(path, strict=True)
    graph = document.case
    overrides = dict(document.overrides)
    if overrides_path:
        try:
            loaded = json.loads(Path(overrides_path).read_text("utf-8"))
            if not isinstance(loaded, dict):
                raise ValueError("override file must hold a JSON object")
            overrides.update({k: float(v) for k, v in loaded.items()})
        except (OSError, ValueError) as exc:
            click.echo(f"error: bad overrides: {exc}", err=True)
            sys.exit(EXIT_USAGE)
    try:
        result = assess(graph, _thresholds())
    except InvalidCaseError as exc:
        for diagnostic in exc.diagnostics:
            click.echo(str(diagnostic), err=True)
        sys.exit(EXIT_OPEN)
    status = case_status(graph, result)
    try:
        report = propagate_confidence(
            graph, result.assessments, overrides,
            ConfidenceConfig(thresholds=_thresholds()),
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    if not status.closed:
        click.echo("WARN: advisory confidence on open case", err=True)
    if fmt == "structured":
        click.echo(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    else:
        entries = sorted(report.entries.items(), key=lambda kv: (kv[1].confidence, kv[0]))
        for node_id, entry in entries:
            click.echo(
                f"{node_id}: confidence={entry.confidence:.4f} doubt={entry.doubt:.4f} ({entry.source.value})"
            )
        if entries:
            weakest, low = entries[0]
            click.echo(f"lowest confidence: {weakest} at {low.confidence:.4f}")
        for warning in report.warnings:
            click.echo(f"WARN: {warning}", err=True)
    sys.exit(EXIT_OK)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--to", "target", required=True, help="Export format: asp or dot.")
@click.option("-o", "--output", type=click.Path(), default=None, help="Write to file instead of stdout.")
@click.option("--atoms", "atoms_path", type=click.Path(), default=None,
              help="Also write the atom table as JSON (asp only).")
def export(path: str, target: str, output: Optional[str], atoms_path: Optional[str]) -> None:
    """Export the case as a clause program or Graphviz DOT."""
    if target not in ("asp", "dot"):
        click.echo(f"error: unknown export target {target!r} (use asp or dot)", err=True)
        sys.exit(EXIT_USAGE)
    document = _load(path, strict=True)
    graph = document.case
    try:
        if target == "asp":
            program = export_program(graph, _thresholds())
            text = render_program(program)
            if atoms_path:
                table = {
                    atom.name: {"node": atom.origin, "text": atom.text}
                    for atom in program.atom_table
                }
                Path(atoms_path).write_text(
                    json.dumps(table, indent=2, sort_keys=True) + "\n", "utf-8"
                )
        else:
            result = assess(graph, _thresholds())
            text = render_graphviz(graph, result.assessments)
    except InvalidCaseError as exc:
        for diagnostic in exc.diagnostics:
            click.echo(str(diagnostic), err=True)
        sys.exit(EXIT_OPEN)
    if output:
        Path(output).write_text(text, "utf-8")
    else:
        click.echo(text, nl=False)
    sys.exit(EXIT_OK)


def _shrink_disagreement(graph: CaseGraph, thresholds: ConfirmationThresholds) -> CaseGraph:
    """Greedily drop defeaters and blocks while the engines still disagree."""
    from dataclasses import replace

    def disagrees(candidate: CaseGraph) -> bool:
        diagnostics = validate_structure(candidate)
        if has_errors(diagnostics):
            return False
        try:
            mine = assess(candidate, thresholds).assessments
            theirs = oracle_assess(candidate, thresholds)
        except Exception:
            return True
        return mine != theirs

    changed = True
    while changed:
        changed = False
        for defeater in graph.defeaters():
            nodes = {k: v for k, v in graph.nodes.items() if k != defeater.id}
            candidate = replace(graph, nodes=nodes)
            if disagrees(candidate):
                graph = candidate
                changed = True
                break
        if changed:
            continue
        for block in graph.blocks:
            candidate = replace(graph, blocks=tuple(b for b in graph.blocks if b.id != block.id))
            if disagrees(candidate):
                graph = candidate
                changed = True
                break
        if changed:
            continue
        referenced = {graph.top}
        for block in graph.blocks:
            referenced.add(block.parent)
            referenced.update(block.subchildren)
            referenced.update(block.sideclaims)
        for defeater in graph.defeaters():
            if defeater.target:
                referenced.add(defeater.target)
        orphans = sorted(set(graph.nodes) - referenced - {d.id for d in graph.defeaters()})
        for orphan in orphans:
            nodes = {k: v for k, v in graph.nodes.items() if k != orphan}
            candidate = replace(graph, nodes=nodes)
            if disagrees(candidate):
                graph = candidate
                changed = True
                break
    return graph


@main.command("diff-oracle")
@click.argument("path", type=click.Path(), required=False)
@click.option("--random", "random_count", type=int, default=0,
              help="Also check N generated cases (max depth 8, defeater nesting <= 3, disjunctive blocks >= 2 subclaims).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--dump-dir", type=click.Path(), default=".",
              help="Where to write minimized counterexamples on failure.")
def diff_oracle(path: Optional[str], random_count: int, seed: int, dump_dir: str) -> None:
    """Check the propagation engine against the least-model oracle."""
    if not path and random_count <= 0:
        click.echo("error: give a case file and/or --random N", err=True)
        sys.exit(EXIT_USAGE)
    thresholds = _thresholds()
    cases: list[tuple[str, CaseGraph]] = []
    if path:
        cases.append((path, _load(path, strict=True).case))
    import random as random_module

    rng = random_module.Random(seed)
    for index in range(random_count):
        cases.append((f"random[{index}]", random_case(rng)))

    failures = 0
    for label, graph in cases:
        try:
            mine = assess(graph, thresholds).assessments
            theirs = oracle_assess(graph, thresholds)
        except InconsistentProgramError as exc:
            click.echo(f"FAIL {label}: {exc}")
            failures += 1
            continue
        if mine == theirs:
            continue
        failures += 1
        mismatched = sorted(n for n in mine if mine[n] != theirs.get(n))
        click.echo(f"FAIL {label}: {len(mismatched)} node(s) disagree: {', '.join(mismatched)}")
        shrunk = _shrink_disagreement(graph, thresholds)
        dump_path = Path(dump_dir) / f"counterexample_{len(list(Path(dump_dir).glob('counterexample_*.json')))}.json"
        dump_path.write_text(
            serialize_document(CaseDocument(format_version="1.0", case=shrunk)), "utf-8"
        )
        click.echo(f"  minimized counterexample written to {dump_path}")
    checked = len(cases)
    if failures:
        click.echo(f"{failures}/{checked} case(s) disagree")
        sys.exit(EXIT_INVARIANT)
    click.echo(f"ok: engines agree on {checked} case(s)")
    sys.exit(EXIT_OK)


@main.command()
@click.argument("name", type=click.Choice(list(FIXTURE_NAMES)))
@click.option("-o", "--output", type=click.Path(), default=None)
def fixture(name: str, output: Optional[str]) -> None:
    """Emit a bundled example case document."""
    text = load_fixture(name)
    if output:
        Path(output).write_text(text, "utf-8")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8044, show_default=True, type=int)
@click.option("--data-dir", type=click.Path(), default="./cases", show_default=True)
def serve(host: str, port: int, data_dir: str) -> None:
    """Run the HTTP API for interactive editing."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(Path(data_dir)), host=host, port=port)


if __name__ == "__main__":
    main()
