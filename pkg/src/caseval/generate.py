"""Seeded random case generation for differential and property testing.

Graphs are built top-down: a positive skeleton first, then defeaters
sprinkled over it, each with a fresh subcase of its own.  Defeaters only
ever point at nodes built before them and their subcases only reuse
claims from their own scope, so the support+defeat dependency relation is
acyclic by construction; every generated graph passes validation with no
errors.  All constructs are exercised: the five block kinds, conjunctive
and disjunctive decomposition, assumptions, external references,
confirmation annotations (qualitative and numeric), evidence present and
absent, exploratory and exact defeaters, and the three defeater statuses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .build import CaseBuilder
from .model import (
    BlockKind,
    CaseGraph,
    ClaimNode,
    ConfirmationAnnotation,
    ConfirmationMode,
    DecompositionMode,
    DefeatKind,
    DefeaterNode,
    DefeaterStatus,
    QualitativeLevel,
    Verdict,
)

__all__ = ["random_case", "random_positive_tree"]

MAX_DEPTH = 8
MAX_DEFEATER_DEPTH = 3


@dataclass
class _Scope:
    """One dialectical level: the ids a defeater raised here may attack."""

    level: int
    targets: list[str] = field(default_factory=list)
    finished_claims: list[str] = field(default_factory=list)


def _rng(seed_or_rng: int | random.Random) -> random.Random:
    if isinstance(seed_or_rng, random.Random):
        return seed_or_rng
    return random.Random(seed_or_rng)


def _confirmation(rng: random.Random) -> ConfirmationAnnotation:
    if rng.random() < 0.5:
        level = rng.choice(list(QualitativeLevel))
        return ConfirmationAnnotation(
            mode=ConfirmationMode.QUALITATIVE, qualitative_level=level
        )
    # Spread numeric likelihood ratios across all three strength bands.
    p_c = rng.choice([0.02, 0.1, 0.3, 0.5, 0.8, 0.9, 0.99])
    p_not_c = rng.choice([0.02, 0.1, 0.3, 0.5, 0.8, 0.9, 0.99])
    prior = rng.choice([None, 0.2, 0.5, 0.8])
    return ConfirmationAnnotation(
        mode=ConfirmationMode.NUMERIC,
        p_e_given_c=p_c,
        p_e_given_not_c=p_not_c,
        prior_c=prior,
    )


class _CaseGrower:
    """Grows a case without ever exceeding ``max_nodes`` graph nodes.

    Every leaf costs exactly one node, so recursion sites pass a
    ``reserved`` count — the committed siblings still to be created — and
    a subtree only expands when the budget covers itself plus the reserve.
    """

    def __init__(self, rng: random.Random, max_nodes: int, max_depth: int) -> None:
        self.rng = rng
        self.max_nodes = max_nodes
        self.max_depth = max_depth
        self.builder = CaseBuilder(name="random")
        self.serial = 0

    def _text(self, stem: str) -> str:
        self.serial += 1
        return f"{stem} {self.serial}"

    def _budget(self) -> int:
        return self.max_nodes - self.builder.node_count

    def claim_tree(self, depth: int, scope: _Scope, reserved: int = 0) -> str:
        """A claim plus (usually) a supporting subtree; returns the claim id."""
        rng = self.rng
        if scope.finished_claims and rng.random() < 0.08:
            # Cross-link: reuse a completed claim from this same scope.
            return rng.choice(scope.finished_claims)
        if depth >= self.max_depth or self._budget() - reserved < 3 or rng.random() < 0.22:
            claim_id = self._leaf(scope)
        else:
            claim_id = self.builder.claim(self._text("claim"))
            scope.targets.append(claim_id)
            self._support(claim_id, depth, scope, reserved)
        scope.finished_claims.append(claim_id)
        return claim_id

    def _leaf(self, scope: _Scope) -> str:
        rng = self.rng
        roll = rng.random()
        if roll < 0.35:
            node_id = self.builder.assumption(
                self._text("assumed claim"), "judged acceptable without support"
            )
        elif roll < 0.5:
            verdict = rng.choice(
                [None, Verdict.TRUE, Verdict.FALSE, Verdict.UNSUPPORTED]
            )
            confidence = rng.choice([None, 0.7, 0.9]) if verdict is Verdict.TRUE else None
            node_id = self.builder.external(
                f"cases/shared_{self.serial}.json", imported=verdict, confidence=confidence
            )
            self.serial += 1
        else:
            node_id = self.builder.claim(self._text("undeveloped claim"))
        scope.targets.append(node_id)
        return node_id

    def _support(self, parent: str, depth: int, scope: _Scope, reserved: int = 0) -> None:
        """Attach one argument block (and its children) under a claim/defeater."""
        rng = self.rng
        budget = self._budget() - reserved
        roll = rng.random()
        if roll < 0.3 or budget < 3:
            evidence_id = self.builder.evidence(
                self._text("test record"), present=rng.random() < 0.8
            )
            scope.targets.append(evidence_id)
            block_id = self.builder.incorporate_evidence(
                parent, evidence_id, justification="the record covers the claim"
            )
            scope.targets.append(block_id)
            return
        if roll < 0.45:
            measured = self.builder.claim(self._text("measured result"))
            scope.targets.append(measured)
            evidence_id = self.builder.evidence(
                self._text("measurement log"), present=rng.random() < 0.85
            )
            scope.targets.append(evidence_id)
            scope.targets.append(
                self.builder.incorporate_evidence(measured, evidence_id)
            )
            sides = (
                [self.claim_tree(depth + 2, scope, reserved)]
                if rng.random() < 0.3 and self._budget() - reserved >= 1
                else []
            )
            block_id = self.builder.block(
                BlockKind.SUBSTITUTION,
                parent,
                [measured],
                sideclaims=sides,
                confirmation=_confirmation(rng),
                justification="evidence interpreted through its confirmation strength",
            )
            scope.targets.append(block_id)
            scope.finished_claims.append(measured)
            return
        if roll < 0.62:
            kind = rng.choice(
                [BlockKind.CONCRETION, BlockKind.CALCULATION, BlockKind.SUBSTITUTION]
            )
            want_children = rng.randint(1, 2) if budget >= 3 else 1
            want_sides = 1 if rng.random() < 0.35 and budget >= want_children + 1 else 0
        else:
            kind = BlockKind.DECOMPOSITION
            want_children = rng.randint(2, 3) if budget >= 4 else 2
            want_sides = 1 if rng.random() < 0.3 and budget >= want_children + 1 else 0
        children = []
        for i in range(want_children):
            remaining = (want_children - i - 1) + want_sides
            children.append(self.claim_tree(depth + 1, scope, reserved + remaining))
        sides = [self.claim_tree(depth + 1, scope, reserved) for _ in range(want_sides)]
        if kind is BlockKind.DECOMPOSITION:
            mode = (
                DecompositionMode.DISJUNCTIVE
                if rng.random() < 0.55
                else DecompositionMode.CONJUNCTIVE
            )
            block_id = self.builder.block(
                BlockKind.DECOMPOSITION,
                parent,
                children,
                sideclaims=sides,
                mode=mode,
                justification="alternatives for the parent claim"
                if mode is DecompositionMode.DISJUNCTIVE
                else "the parts jointly establish the parent",
            )
        else:
            block_id = self.builder.block(
                kind, parent, children, sideclaims=sides,
                justification="the step is judged deductive",
            )
        scope.targets.append(block_id)

    def add_defeater(self, scope: _Scope, exact_targets: set[str]) -> _Scope | None:
        """Raise one defeater against a node in ``scope``; returns its subcase scope."""
        rng = self.rng
        if not scope.targets or self._budget() < 2:
            return None
        target: str | None = rng.choice(scope.targets)
        node = self.builder.get(target)  # block ids resolve to None
        target_is_claimlike = isinstance(node, (ClaimNode, DefeaterNode))
        kind = DefeatKind.EXPLORATORY
        if target_is_claimlike and target not in exact_targets and rng.random() < 0.3:
            kind = DefeatKind.EXACT
        if rng.random() < 0.04:
            target = None  # a defeater still being placed
        status = DefeaterStatus.ACTIVE
        residual_justification = None
        roll = rng.random()
        if roll < 0.08:
            status = DefeaterStatus.ADDRESSED
        elif roll < 0.16:
            status = DefeaterStatus.RESIDUAL_RISK
            residual_justification = "accepted: impact judged tolerable"
        defeater_id = self.builder.defeater(
            self._text("doubt"),
            target,
            kind=kind,
            status=status,
            residual_justification=residual_justification,
        )
        if kind is DefeatKind.EXACT and status is DefeaterStatus.ACTIVE and target:
            exact_targets.add(target)
        scope.targets.append(defeater_id)
        if status is DefeaterStatus.RESIDUAL_RISK:
            return None
        subcase = _Scope(level=scope.level + 1)
        subcase.targets.append(defeater_id)
        if rng.random() < 0.7 and self._budget() >= 1:
            self._support(defeater_id, 0, subcase)
        return subcase


def random_case(
    seed_or_rng: int | random.Random,
    *,
    max_nodes: int = 60,
    max_depth: int = MAX_DEPTH,
    max_defeater_depth: int = MAX_DEFEATER_DEPTH,
    max_defeaters: int = 6,
) -> CaseGraph:
    """A structurally valid random case with defeaters at up to three levels."""
    rng = _rng(seed_or_rng)
    grower = _CaseGrower(rng, max_nodes=max_nodes, max_depth=max_depth)
    main = _Scope(level=0)
    top = grower.builder.claim("the system meets its objective", id="top")
    main.targets.append(top)
    grower._support(top, 0, main)
    grower.builder.top(top)

    scopes = [main]
    exact_targets: set[str] = set()
    for _ in range(rng.randint(0, max_defeaters)):
        open_scopes = [s for s in scopes if s.level < max_defeater_depth]
        if not open_scopes:
            break
        scope = rng.choice(open_scopes)
        subcase = grower.add_defeater(scope, exact_targets)
        if subcase is not None:
            scopes.append(subcase)
    return grower.builder.finish()


def random_positive_tree(
    seed_or_rng: int | random.Random,
    *,
    max_depth: int = 4,
) -> CaseGraph:
    """A fully supported conjunctive case whose every claim assesses TRUE.

    Used for confidence properties: only strongly positive evidence,
    assumptions, and conjunctive reasoning steps appear.
    """
    rng = _rng(seed_or_rng)
    builder = CaseBuilder(name="confidence-tree")
    serial = 0

    def text(stem: str) -> str:
        nonlocal serial
        serial += 1
        return f"{stem} {serial}"

    def grow(depth: int) -> str:
        roll = rng.random()
        if depth >= max_depth or roll < 0.3:
            if rng.random() < 0.5:
                return builder.assumption(text("assumed claim"), "accepted")
            claim = builder.claim(text("measured result"))
            builder.incorporate_evidence(
                claim, builder.evidence(text("record"), present=True)
            )
            return claim
        if roll < 0.5:
            useful = builder.claim(text("useful conclusion"))
            measured = builder.claim(text("measured result"))
            builder.incorporate_evidence(
                measured, builder.evidence(text("record"), present=True)
            )
            numeric = rng.random() < 0.5
            confirmation = (
                ConfirmationAnnotation(
                    mode=ConfirmationMode.NUMERIC,
                    p_e_given_c=rng.choice([0.9, 0.95, 0.99]),
                    p_e_given_not_c=rng.choice([0.01, 0.05]),
                    prior_c=rng.choice([0.3, 0.5, 0.7]),
                )
                if numeric
                else ConfirmationAnnotation(
                    mode=ConfirmationMode.QUALITATIVE,
                    qualitative_level=QualitativeLevel.STRONGLY_POSITIVE,
                )
            )
            builder.block(
                BlockKind.SUBSTITUTION, useful, [measured], confirmation=confirmation
            )
            return useful
        parent = builder.claim(text("claim"))
        kind = rng.choice(
            [BlockKind.CONCRETION, BlockKind.CALCULATION, BlockKind.DECOMPOSITION]
        )
        children = [grow(depth + 1) for _ in range(rng.randint(2, 3))]
        sides = [grow(depth + 1)] if rng.random() < 0.3 else []
        builder.block(
            kind,
            parent,
            children,
            sideclaims=sides,
            mode=DecompositionMode.CONJUNCTIVE if kind is BlockKind.DECOMPOSITION else None,
        )
        return parent

    builder.top(grow(0))
    return builder.finish()
