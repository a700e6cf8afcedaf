"""Translation of a case graph into a strict-negation clause program.

Every claim-bearing node becomes a ground atom; the argument's reasoning
steps become definite clauses over those atoms, with classical negation
written as a ``-`` prefix.  Doubts and undeveloped claims simply emit
nothing — an unproved atom reads back as UNSUPPORTED.  Every rule whose
head concerns a node is guarded with ``-d`` for each active exploratory
defeater pointing into that node, so an unrefuted doubt suppresses the
derivation instead of contributing a truth value.

The emitted text format (one clause per line, ``head :- lit, lit.``,
facts as ``head.``, LF endings) is parsed back by the oracle module.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .model import (
    ArgumentBlock,
    BlockKind,
    CaseGraph,
    ClaimNode,
    DecompositionMode,
    DefeatKind,
    DefeaterNode,
    DefeaterStatus,
    Designation,
    EvidenceNode,
    ExternalSubcaseRef,
    QualitativeLevel,
    Verdict,
    affected_claim,
    has_errors,
    validate_structure,
)
from .propagate import (
    DEFAULT_THRESHOLDS,
    ConfirmationThresholds,
    InvalidCaseError,
    classify_confirmation,
)

__all__ = [
    "Atom",
    "Clause",
    "ClauseProgram",
    "Literal",
    "export_program",
    "mangle_atom",
    "render_program",
]


@dataclass(frozen=True)
class Atom:
    """A ground term naming one case node (or an evidence-present flag)."""

    name: str
    origin: str  # node id this atom stands for
    text: str = ""  # original claim text, single line


@dataclass(frozen=True)
class Literal:
    atom: str
    negated: bool = False

    def __str__(self) -> str:
        return f"-{self.atom}" if self.negated else self.atom


@dataclass(frozen=True)
class Clause:
    head: Literal
    body: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(lit) for lit in self.body)}."


@dataclass(frozen=True)
class ClauseProgram:
    clauses: tuple[Clause, ...]
    atom_table: tuple[Atom, ...]

    def atom_for(self, node_id: str) -> Optional[str]:
        for atom in self.atom_table:
            if atom.origin == node_id:
                return atom.name
        return None


_SLUG_RE = re.compile(r"[^a-z0-9]+")


def _slug(text: str, limit: int = 40) -> str:
    cleaned = _SLUG_RE.sub("_", text.lower()).strip("_")
    return cleaned[:limit].rstrip("_")


def mangle_atom(node_id: str, text: str, taken: Optional[set[str]] = None) -> str:
    """Deterministic program identifier for a node.

    Slugged claim text plus a slugged id suffix keeps atoms readable and
    distinct; ``taken`` resolves residual collisions (two ids that slug to
    the same string) with a numeric suffix.
    """
    text_part = _slug(text)
    id_part = _slug(node_id, limit=20)
    base = "_".join(p for p in (text_part, id_part) if p) or "node"
    if not base[0].isalpha():
        base = "n_" + base
    if taken is None:
        return base
    candidate = base
    serial = 1
    while candidate in taken:
        serial += 1
        candidate = f"{base}_{serial}"
    taken.add(candidate)
    return candidate


def _one_line(text: str) -> str:
    return " ".join(text.split())


class _Emitter:
    def __init__(self, graph: CaseGraph) -> None:
        self.graph = graph
        self.clauses: list[Clause] = []
        taken: set[str] = set()
        self.atoms: dict[str, Atom] = {}
        for node_id in sorted(graph.nodes):
            node = graph.nodes[node_id]
            if isinstance(node, EvidenceNode):
                name = mangle_atom(node_id, "evidence_present", taken)
                self.atoms[node_id] = Atom(name, node_id, _one_line(node.description))
            elif isinstance(node, ExternalSubcaseRef):
                name = mangle_atom(node_id, node.case_ref, taken)
                self.atoms[node_id] = Atom(name, node_id, _one_line(node.case_ref))
            else:
                name = mangle_atom(node_id, node.text, taken)
                self.atoms[node_id] = Atom(name, node_id, _one_line(node.text))

    def lit(self, node_id: str, negated: bool = False) -> Literal:
        return Literal(self.atoms[node_id].name, negated)

    def emit(self, head: Literal, body: Iterable[Literal] = ()) -> None:
        self.clauses.append(Clause(head, tuple(body)))


def export_program(
    graph: CaseGraph,
    thresholds: ConfirmationThresholds = DEFAULT_THRESHOLDS,
) -> ClauseProgram:
    """Emit the clause program whose least model mirrors the assessment.

    Per construct: assumptions become guarded facts; present evidence
    becomes an ``evidence_present`` fact consumed by the measured claim's
    rule; general blocks become one rule with the children as body;
    disjunctive decompositions one rule per disjunct plus a negative rule
    that fires when every disjunct is strictly refuted; confirmation
    substitutions emit a positive or negated head for strongly positive or
    negative evidence and nothing for neutral; an active exact defeater
    replaces its target's own support with the complementary pair
    ``target :- -defeater`` / ``-target :- defeater``; residual-risk
    defeaters are stated refuted (``-d.``); addressed defeaters, doubts,
    and undeveloped claims emit nothing.
    """
    diagnostics = validate_structure(graph)
    if has_errors(diagnostics):
        raise InvalidCaseError(diagnostics)
    emitter = _Emitter(graph)

    guards: dict[str, list[str]] = {}
    for defeater in graph.defeaters():
        if (
            defeater.status is DefeaterStatus.ACTIVE
            and defeater.kind is DefeatKind.EXPLORATORY
            and defeater.target is not None
        ):
            guards.setdefault(affected_claim(graph, defeater.id), []).append(defeater.id)

    def guard_lits(node_id: str) -> list[Literal]:
        return [emitter.lit(d, negated=True) for d in sorted(guards.get(node_id, ()))]

    def emit_block(node_id: str, block: ArgumentBlock) -> None:
        head = emitter.lit(node_id)
        extra = guard_lits(node_id)
        if block.kind is BlockKind.EVIDENCE_INCORPORATION:
            evidence = graph.nodes[block.subchildren[0]]
            assert isinstance(evidence, EvidenceNode)
            emitter.emit(head, [emitter.lit(evidence.id)] + extra)
            return
        if block.kind is BlockKind.SUBSTITUTION and block.confirmation is not None:
            level = classify_confirmation(block.confirmation, thresholds)
            body = [emitter.lit(s) for s in block.sideclaims]
            body.append(emitter.lit(block.subchildren[0]))
            if level is QualitativeLevel.STRONGLY_POSITIVE:
                emitter.emit(head, body + extra)
            elif level is QualitativeLevel.STRONGLY_NEGATIVE:
                emitter.emit(Literal(head.atom, negated=True), body + extra)
            # neutral: the useful claim stays unproved
            return
        subs = [emitter.lit(s) for s in block.subchildren]
        sides = [emitter.lit(s) for s in block.sideclaims]
        if (
            block.kind is BlockKind.DECOMPOSITION
            and block.effective_mode() is DecompositionMode.DISJUNCTIVE
        ):
            for sub in subs:
                emitter.emit(head, sides + [sub] + extra)
            refuted = [Literal(s.atom, negated=True) for s in subs]
            emitter.emit(Literal(head.atom, negated=True), sides + refuted + extra)
            return
        emitter.emit(head, subs + sides + extra)

    for node_id in sorted(graph.nodes):
        node = graph.nodes[node_id]
        if isinstance(node, EvidenceNode):
            if node.present:
                emitter.emit(emitter.lit(node_id))
            continue

        exact = graph.active_exact_defeater(node_id)
        if exact is not None:
            # The exact pair supersedes whatever support the node has.
            extra = guard_lits(node_id)
            emitter.emit(emitter.lit(node_id), [emitter.lit(exact.id, negated=True)] + extra)
            emitter.emit(
                Literal(emitter.atoms[node_id].name, negated=True),
                [emitter.lit(exact.id)] + extra,
            )
            continue

        if isinstance(node, ExternalSubcaseRef):
            if node.imported_assessment is Verdict.TRUE:
                emitter.emit(emitter.lit(node_id), guard_lits(node_id))
            elif node.imported_assessment is Verdict.FALSE:
                emitter.emit(
                    Literal(emitter.atoms[node_id].name, negated=True),
                    guard_lits(node_id),
                )
            continue

        if isinstance(node, DefeaterNode):
            if node.status is DefeaterStatus.RESIDUAL_RISK:
                # Stated refuted by designation, still overridable by doubts.
                emitter.emit(
                    Literal(emitter.atoms[node_id].name, negated=True),
                    guard_lits(node_id),
                )
                continue
            if node.status is DefeaterStatus.ADDRESSED:
                continue
            block = graph.block_of(node_id)
            if block is not None:
                emit_block(node_id, block)
            continue

        assert isinstance(node, ClaimNode)
        if node.designation is Designation.ASSUMPTION:
            emitter.emit(emitter.lit(node_id), guard_lits(node_id))
            continue
        block = graph.block_of(node_id)
        if block is not None:
            emit_block(node_id, block)

    atom_table = tuple(emitter.atoms[n] for n in sorted(emitter.atoms))
    return ClauseProgram(clauses=tuple(emitter.clauses), atom_table=atom_table)


def render_program(program: ClauseProgram, include_table: bool = True) -> str:
    """Render to the canonical text form (parse_program inverts this)."""
    lines: list[str] = []
    if include_table:
        lines.append("% strict-negation clause program")
        lines.append("% atoms:")
        for atom in program.atom_table:
            lines.append(f"%   {atom.name} = {json.dumps(atom.origin)}: {atom.text}")
        lines.append("% end-atoms")
    for clause in program.clauses:
        lines.append(str(clause))
    return "\n".join(lines) + "\n"
