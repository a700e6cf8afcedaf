"""Confidence propagation and confirmation-measure arithmetic.

Confidence is a subjective probability in [0, 1]; doubt is its dual
(1 - confidence).  Evidence contributes through the posterior likelihood
of its useful claim; interior steps aggregate by summing the doubts of
their children (clamped to 1), so a parent can never be more credible
than its least credible child.  Disjunctive steps instead take the best
supported alternative.

Confidence strictly applies to sound arguments, so only TRUE-assessed
nodes receive entries; anything else is omitted and flagged rather than
scored zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .model import (
    BlockKind,
    CaseGraph,
    ClaimNode,
    ConfirmationMode,
    DecompositionMode,
    DefeaterStatus,
    Designation,
    ExternalSubcaseRef,
    QualitativeLevel,
    Verdict,
    topological_order,
)
from .propagate import (
    DEFAULT_THRESHOLDS,
    ConfirmationThresholds,
    classify_confirmation,
)

__all__ = [
    "ConfidenceConfig",
    "ConfidenceEntry",
    "ConfidenceReport",
    "ConfidenceSource",
    "good_measure",
    "posterior_confidence",
    "propagate_confidence",
]


def good_measure(p_e_given_c: float, p_e_given_not_c: float) -> float:
    """Log10 likelihood ratio of the evidence under claim vs counter-claim.

    Positive values favor the claim; the function is antisymmetric under
    swapping its arguments.  A zero denominator with a positive numerator
    is infinitely confirming; evidence impossible under both hypotheses is
    an error.
    """
    if p_e_given_c < 0 or p_e_given_not_c < 0:
        raise ValueError("likelihoods must be non-negative")
    if p_e_given_not_c == 0.0:
        if p_e_given_c == 0.0:
            raise ValueError("evidence impossible under both hypotheses")
        return math.inf
    if p_e_given_c == 0.0:
        return -math.inf
    return math.log10(p_e_given_c / p_e_given_not_c)


def posterior_confidence(prior_c: float, p_e_given_c: float, p_e_given_not_c: float) -> float:
    """P(C|E) by Bayes from the prior and the two likelihoods."""
    if not (0.0 < prior_c < 1.0):
        raise ValueError("prior must lie in (0, 1)")
    if not (0.0 < p_e_given_c <= 1.0) or not (0.0 < p_e_given_not_c <= 1.0):
        raise ValueError("likelihoods must lie in (0, 1]")
    numerator = p_e_given_c * prior_c
    denominator = numerator + p_e_given_not_c * (1.0 - prior_c)
    if denominator == 0.0:
        raise ValueError("degenerate posterior: zero total evidence probability")
    return numerator / denominator


class ConfidenceSource(str, enum.Enum):
    EVIDENCE_POSTERIOR = "evidence_posterior"
    SUM_OF_DOUBTS = "sum_of_doubts"
    OVERRIDE = "override"
    ASSUMPTION_DEFAULT = "assumption_default"


@dataclass(frozen=True)
class ConfidenceConfig:
    """Defaults for leaves that carry no numeric evidence."""

    assumption_default: float = 0.9
    strongly_positive_default: float = 0.95
    neutral_default: float = 0.5
    strongly_negative_default: float = 0.05
    default_prior: float = 0.5
    thresholds: ConfirmationThresholds = DEFAULT_THRESHOLDS

    def qualitative_default(self, level: QualitativeLevel) -> float:
        return {
            QualitativeLevel.STRONGLY_POSITIVE: self.strongly_positive_default,
            QualitativeLevel.NEUTRAL: self.neutral_default,
            QualitativeLevel.STRONGLY_NEGATIVE: self.strongly_negative_default,
        }[level]


@dataclass(frozen=True)
class ConfidenceEntry:
    confidence: float
    source: ConfidenceSource

    @property
    def doubt(self) -> float:
        return 1.0 - self.confidence


@dataclass
class ConfidenceReport:
    entries: dict[str, ConfidenceEntry]
    warnings: list[str] = field(default_factory=list)

    def confidence(self, node_id: str) -> Optional[float]:
        entry = self.entries.get(node_id)
        return entry.confidence if entry else None

    def to_json_dict(self) -> dict:
        return {
            "entries": {
                node_id: {
                    "confidence": entry.confidence,
                    "doubt": entry.doubt,
                    "source": entry.source.value,
                }
                for node_id, entry in sorted(self.entries.items())
            },
            "warnings": list(self.warnings),
        }


def _clamp(value: float) -> float:
    return min(1.0, max(0.0, value))


def propagate_confidence(
    graph: CaseGraph,
    assessments: Mapping[str, Verdict],
    overrides: Optional[Mapping[str, float]] = None,
    config: ConfidenceConfig = ConfidenceConfig(),
) -> ConfidenceReport:
    """Assign a confidence to every TRUE-assessed claim, bottom up.

    Leaves: assumptions take the configured default; useful claims under a
    numeric confirmation take the Bayesian posterior (falling back to the
    qualitative default table when no prior is given); measured claims over
    present evidence take 1.0 (only presence was checked); external
    references take their imported confidence.  Interior nodes aggregate by
    sum of doubts, disjunctive steps by the best supported disjunct.  User
    overrides replace the computed value and feed the ancestors.

    Nodes that are not TRUE, and TRUE nodes whose support gives confidence
    no meaning (eliminative negations, unquantified imports), are omitted
    and reported in ``warnings``.
    """
    overrides = dict(overrides or {})
    for node_id, value in sorted(overrides.items()):
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"override for {node_id} must lie in [0, 1]")

    entries: dict[str, ConfidenceEntry] = {}
    warnings: list[str] = []
    skipped: set[str] = set()

    residuals = [
        d.id
        for d in graph.defeaters()
        if d.status is DefeaterStatus.RESIDUAL_RISK
    ]
    for residual in residuals:
        warnings.append(
            f"{residual}: residual risk accepted; excluded from confidence sums"
        )

    def skip(node_id: str, why: str) -> None:
        skipped.add(node_id)
        warnings.append(f"{node_id}: {why}")

    for node_id in topological_order(graph):
        node = graph.nodes[node_id]
        if not isinstance(node, (ClaimNode, ExternalSubcaseRef)):
            continue
        if assessments.get(node_id) is not Verdict.TRUE:
            continue
        if node_id in overrides:
            entries[node_id] = ConfidenceEntry(overrides[node_id], ConfidenceSource.OVERRIDE)
            continue
        if isinstance(node, ExternalSubcaseRef):
            if node.imported_confidence is None:
                skip(node_id, "external subcase delivers no confidence")
            else:
                entries[node_id] = ConfidenceEntry(
                    node.imported_confidence, ConfidenceSource.EVIDENCE_POSTERIOR
                )
            continue
        if graph.active_exact_defeater(node_id) is not None:
            skip(node_id, "established eliminatively; confidence not defined")
            continue
        if node.designation is Designation.ASSUMPTION:
            entries[node_id] = ConfidenceEntry(
                config.assumption_default, ConfidenceSource.ASSUMPTION_DEFAULT
            )
            continue
        block = graph.block_of(node_id)
        if block is None:
            skip(node_id, "no subcase to derive confidence from")
            continue
        if block.kind is BlockKind.EVIDENCE_INCORPORATION:
            # Only presence was assessed; doubt about meaning lives above.
            entries[node_id] = ConfidenceEntry(1.0, ConfidenceSource.EVIDENCE_POSTERIOR)
            continue
        if block.kind is BlockKind.SUBSTITUTION and block.confirmation is not None:
            ann = block.confirmation
            if ann.mode is ConfirmationMode.NUMERIC and ann.prior_c is not None:
                value = posterior_confidence(ann.prior_c, ann.p_e_given_c, ann.p_e_given_not_c)
            else:
                level = classify_confirmation(ann, config.thresholds)
                value = config.qualitative_default(level)
            entries[node_id] = ConfidenceEntry(value, ConfidenceSource.EVIDENCE_POSTERIOR)
            continue

        children = list(block.subchildren) + list(block.sideclaims)
        missing = [c for c in children if c not in entries]
        disjunctive = (
            block.kind is BlockKind.DECOMPOSITION
            and block.effective_mode() is DecompositionMode.DISJUNCTIVE
        )
        if disjunctive:
            sub_entries = [entries[c] for c in block.subchildren if c in entries]
            side_missing = [c for c in block.sideclaims if c not in entries]
            if not sub_entries or side_missing:
                skip(node_id, "no scored disjunct (or unscored sideclaim)")
                continue
            doubt = min(e.doubt for e in sub_entries)
            doubt += sum(entries[c].doubt for c in block.sideclaims)
            entries[node_id] = ConfidenceEntry(
                _clamp(1.0 - _clamp(doubt)), ConfidenceSource.SUM_OF_DOUBTS
            )
            continue
        if missing:
            skip(node_id, f"children without confidence: {', '.join(sorted(set(missing)))}")
            continue
        doubt = sum(entries[c].doubt for c in children)
        entries[node_id] = ConfidenceEntry(
            _clamp(1.0 - _clamp(doubt)), ConfidenceSource.SUM_OF_DOUBTS
        )

    return ConfidenceReport(entries=entries, warnings=sorted(warnings))
