"""Least-model evaluation of strict-negation clause programs.

This is the independent check on the propagation engine: a case is
translated to clauses and evaluated bottom-up to a fixpoint, with no
knowledge of argument blocks or defeater rules.  Strict negation is
handled by atom doubling — ``-a`` is simply a fresh atom — followed by a
consistency scan for atoms derived in both polarities.

Evaluation is semi-naive: each clause keeps a count of body literals not
yet derived, and deriving a literal only touches the clauses whose bodies
mention it, so the fixpoint is linear in program size.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .aspexport import Atom, Clause, ClauseProgram, Literal, export_program
from .model import CaseGraph, Verdict
from .propagate import DEFAULT_THRESHOLDS, ConfirmationThresholds

__all__ = [
    "InconsistentProgramError",
    "LiteralModel",
    "ProgramSyntaxError",
    "least_model",
    "oracle_assess",
    "parse_program",
]


@dataclass(frozen=True)
class LiteralModel:
    derived: frozenset[Literal]
    consistent: bool

    def holds(self, literal: Literal) -> bool:
        return literal in self.derived


class InconsistentProgramError(ValueError):
    """The program derives both an atom and its strict negation."""


class ProgramSyntaxError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


def least_model(program: ClauseProgram) -> LiteralModel:
    """Smallest literal set closed under all clauses.

    Order-independent: permuting the clauses yields the same model.
    """
    derived: set[Literal] = set()
    watching: dict[Literal, list[int]] = {}
    pending: list[int] = []
    queue: list[Literal] = []

    for index, clause in enumerate(program.clauses):
        distinct = set(clause.body)
        pending.append(len(distinct))
        if not distinct:
            queue.append(clause.head)
        for literal in distinct:
            watching.setdefault(literal, []).append(index)

    while queue:
        literal = queue.pop()
        if literal in derived:
            continue
        derived.add(literal)
        for index in watching.get(literal, ()):
            pending[index] -= 1
            if pending[index] == 0:
                head = program.clauses[index].head
                if head not in derived:
                    queue.append(head)

    positive = {lit.atom for lit in derived if not lit.negated}
    negative = {lit.atom for lit in derived if lit.negated}
    return LiteralModel(
        derived=frozenset(derived),
        consistent=not (positive & negative),
    )


def oracle_assess(
    graph: CaseGraph,
    thresholds: ConfirmationThresholds = DEFAULT_THRESHOLDS,
) -> dict[str, Verdict]:
    """Verdicts read off the least model of the exported program.

    An atom in the model is TRUE, its strict negation FALSE, neither is
    UNSUPPORTED.  An inconsistent model signals a translation bug and is
    raised, never silently interpreted.
    """
    program = export_program(graph, thresholds)
    model = least_model(program)
    if not model.consistent:
        clashing = sorted(
            lit.atom
            for lit in model.derived
            if not lit.negated and Literal(lit.atom, True) in model.derived
        )
        raise InconsistentProgramError(
            "program derives both polarities of: " + ", ".join(clashing)
        )
    verdicts: dict[str, Verdict] = {}
    for node_id in graph.claim_bearing_ids():
        atom = program.atom_for(node_id)
        if atom is None:  # pragma: no cover - every node gets an atom
            verdicts[node_id] = Verdict.UNSUPPORTED
            continue
        if model.holds(Literal(atom)):
            verdicts[node_id] = Verdict.TRUE
        elif model.holds(Literal(atom, negated=True)):
            verdicts[node_id] = Verdict.FALSE
        else:
            verdicts[node_id] = Verdict.UNSUPPORTED
    return verdicts


_ATOM_LINE = re.compile(r"^%\s{3}(?P<atom>-?[a-z][a-z0-9_]*) = (?P<rest>.*)$")
_ATOM_NAME = re.compile(r"^[a-z][a-z0-9_]*$")


def _parse_literal(token: str, line_number: int) -> Literal:
    token = token.strip()
    negated = token.startswith("-")
    if negated:
        token = token[1:]
    if not _ATOM_NAME.match(token):
        raise ProgramSyntaxError(f"bad atom {token!r}", line_number)
    return Literal(token, negated)


def parse_program(text: str) -> ClauseProgram:
    """Parse the rendered program format back into a ClauseProgram.

    Atom-table comment lines rebuild node origins; other comments and
    blank lines are skipped.  Errors carry 1-based line numbers.
    """
    clauses: list[Clause] = []
    atoms: list[Atom] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            match = _ATOM_LINE.match(raw)
            if match:
                rest = match.group("rest")
                try:
                    origin, end = json.JSONDecoder().raw_decode(rest)
                except json.JSONDecodeError:
                    raise ProgramSyntaxError("bad atom-table entry", line_number) from None
                text_part = rest[end:]
                if text_part.startswith(": "):
                    text_part = text_part[2:]
                else:
                    text_part = text_part.lstrip(":").strip()
                atoms.append(Atom(match.group("atom"), origin, text_part))
            continue
        if not line.endswith("."):
            raise ProgramSyntaxError("clause must end with '.'", line_number)
        line = line[:-1].strip()
        if ":-" in line:
            head_text, body_text = line.split(":-", 1)
            head = _parse_literal(head_text, line_number)
            body_tokens = [t for t in body_text.split(",")]
            if any(not t.strip() for t in body_tokens):
                raise ProgramSyntaxError("empty body literal", line_number)
            body = tuple(_parse_literal(t, line_number) for t in body_tokens)
        else:
            head = _parse_literal(line, line_number)
            body = ()
        clauses.append(Clause(head, body))
    return ClauseProgram(clauses=tuple(clauses), atom_table=tuple(atoms))
