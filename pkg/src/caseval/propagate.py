"""Three-valued assessment of assurance cases with defeaters.

Verdicts (TRUE, FALSE, UNSUPPORTED) are propagated upward from leaves in a
single topological pass over the union of support and defeat dependencies.
At each claim-bearing node the stages are:

1. base verdict from the node's own support:
   - assumptions are TRUE; claims with no subcase are UNSUPPORTED;
   - residual-risk defeaters are FALSE by designation; unexplored doubts
     and addressed (commentary) defeaters are UNSUPPORTED;
   - external subcase references inherit their imported verdict;
   - evidence incorporation yields TRUE iff the evidence is present;
   - general blocks (concretion, substitution, calculation, conjunctive
     decomposition) yield TRUE iff every subclaim and sideclaim is TRUE,
     otherwise UNSUPPORTED.  FALSE never crosses these blocks: inferring a
     false parent from a false antecedent would deny the antecedent;
   - disjunctive decomposition yields TRUE when the sideclaims and at
     least one subclaim are TRUE, FALSE when the sideclaims are TRUE and
     every subclaim is FALSE (the eliminative reading: all alternatives
     refuted), otherwise UNSUPPORTED;
   - a substitution carrying a confirmation annotation maps a TRUE
     measured subclaim (with TRUE sideclaims) to TRUE / UNSUPPORTED /
     FALSE for strongly positive / neutral / strongly negative evidence;
2. an active exact defeater replaces the base verdict with the negation
   of its own verdict (UNSUPPORTED stays UNSUPPORTED); the target's own
   support is ignored while the exact defeater is active;
3. active exploratory defeaters override: if every one pointing into the
   node is FALSE the node keeps its verdict, otherwise the node becomes
   UNSUPPORTED — the mere existence of an unresolved doubt suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from .model import (
    ArgumentBlock,
    BlockKind,
    CaseGraph,
    ClaimNode,
    ConfirmationAnnotation,
    ConfirmationMode,
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
    topological_order,
    validate_structure,
)

__all__ = [
    "AssessmentResult",
    "ConfirmationThresholds",
    "DEFAULT_THRESHOLDS",
    "InvalidCaseError",
    "NodeExplanation",
    "StatusReport",
    "TraceInput",
    "assess",
    "case_status",
    "classify_confirmation",
    "negate",
    "replay_trace",
]


@dataclass(frozen=True)
class ConfirmationThresholds:
    """Cutoffs (in log10 likelihood-ratio units) for confirmation strength."""

    t_pos: float = 1.0
    t_neg: float = -1.0

    def __post_init__(self) -> None:
        if not (self.t_pos > 0.0 > self.t_neg):
            raise ValueError("thresholds must satisfy t_pos > 0 > t_neg")


DEFAULT_THRESHOLDS = ConfirmationThresholds()


class InvalidCaseError(ValueError):
    """Assessment was asked for on a structurally broken graph."""

    def __init__(self, diagnostics) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


def negate(verdict: Verdict) -> Verdict:
    if verdict is Verdict.TRUE:
        return Verdict.FALSE
    if verdict is Verdict.FALSE:
        return Verdict.TRUE
    return Verdict.UNSUPPORTED


def classify_confirmation(
    annotation: ConfirmationAnnotation,
    thresholds: ConfirmationThresholds = DEFAULT_THRESHOLDS,
) -> QualitativeLevel:
    """Reduce a confirmation annotation to a qualitative strength level.

    Numeric annotations are scored with the log10 likelihood ratio
    log10(P(E|C) / P(E|not C)); at or above ``t_pos`` counts as strongly
    positive, at or below ``t_neg`` as strongly negative.  A zero
    denominator with positive numerator is treated as infinitely positive.
    """
    if annotation.mode is ConfirmationMode.QUALITATIVE:
        if annotation.qualitative_level is None:
            raise ValueError("qualitative annotation without a level")
        return annotation.qualitative_level
    p_c = annotation.p_e_given_c
    p_not_c = annotation.p_e_given_not_c
    if p_c is None or p_not_c is None:
        raise ValueError("numeric annotation requires both likelihoods")
    if p_not_c == 0.0:
        if p_c == 0.0:
            raise ValueError("evidence impossible under both hypotheses")
        return QualitativeLevel.STRONGLY_POSITIVE
    if p_c == 0.0:
        return QualitativeLevel.STRONGLY_NEGATIVE
    measure = math.log10(p_c / p_not_c)
    if measure >= thresholds.t_pos:
        return QualitativeLevel.STRONGLY_POSITIVE
    if measure <= thresholds.t_neg:
        return QualitativeLevel.STRONGLY_NEGATIVE
    return QualitativeLevel.NEUTRAL


# Rule names recorded in explanation traces.
RULE_ASSUMPTION = "assumption"
RULE_UNDEVELOPED = "undeveloped-claim"
RULE_DOUBT = "doubt"
RULE_RESIDUAL = "residual-risk"
RULE_ADDRESSED = "addressed-comment"
RULE_DETACHED = "detached-defeater"
RULE_EXTERNAL = "external-subcase"
RULE_EVIDENCE = "evidence-incorporation"
RULE_GENERAL = "general-block"
RULE_DISJUNCTIVE = "disjunctive-decomposition"
RULE_CONFIRMATION = "confirmation-substitution"
RULE_EXACT = "exact-defeater"


@dataclass(frozen=True)
class TraceInput:
    """One contribution to a node's verdict (child, evidence, or defeater)."""

    node: str
    role: str  # subclaim | sideclaim | measured | evidence | import | exact
    verdict: Verdict


@dataclass(frozen=True)
class NodeExplanation:
    rule: str
    inputs: tuple[TraceInput, ...]
    base: Verdict
    attackers: tuple[TraceInput, ...]
    verdict: Verdict
    detail: str = ""

    @property
    def overridden(self) -> bool:
        return self.verdict != self.base

    @property
    def effective_rule(self) -> str:
        return "defeater-override" if self.overridden else self.rule


@dataclass
class AssessmentResult:
    """Verdict per claim-bearing node plus the explanation trace behind it."""

    assessments: dict[str, Verdict]
    trace: dict[str, NodeExplanation]

    def to_json_dict(self) -> dict:
        return {
            node_id: {
                "verdict": self.assessments[node_id].value,
                "rule": self.trace[node_id].effective_rule,
            }
            for node_id in sorted(self.assessments)
        }


def _apply_general(inputs: list[TraceInput]) -> Verdict:
    if all(i.verdict is Verdict.TRUE for i in inputs):
        return Verdict.TRUE
    return Verdict.UNSUPPORTED


def _apply_disjunctive(inputs: list[TraceInput]) -> Verdict:
    sides = [i for i in inputs if i.role == "sideclaim"]
    subs = [i for i in inputs if i.role == "subclaim"]
    if not all(i.verdict is Verdict.TRUE for i in sides):
        return Verdict.UNSUPPORTED
    if any(i.verdict is Verdict.TRUE for i in subs):
        return Verdict.TRUE
    if subs and all(i.verdict is Verdict.FALSE for i in subs):
        return Verdict.FALSE
    return Verdict.UNSUPPORTED


def _apply_confirmation(inputs: list[TraceInput], level: QualitativeLevel) -> Verdict:
    if not all(i.verdict is Verdict.TRUE for i in inputs):
        return Verdict.UNSUPPORTED
    if level is QualitativeLevel.STRONGLY_POSITIVE:
        return Verdict.TRUE
    if level is QualitativeLevel.STRONGLY_NEGATIVE:
        return Verdict.FALSE
    return Verdict.UNSUPPORTED


def _block_rule(
    graph: CaseGraph,
    block: ArgumentBlock,
    verdicts: dict[str, Verdict],
    thresholds: ConfirmationThresholds,
) -> tuple[str, list[TraceInput], Verdict, str]:
    """Evaluate one argument block given its children's verdicts."""
    if block.kind is BlockKind.EVIDENCE_INCORPORATION:
        evidence_id = block.subchildren[0]
        evidence = graph.nodes[evidence_id]
        assert isinstance(evidence, EvidenceNode)
        present = Verdict.TRUE if evidence.present else Verdict.UNSUPPORTED
        inputs = [TraceInput(evidence_id, "evidence", present)]
        return RULE_EVIDENCE, inputs, present, ""

    if block.kind is BlockKind.SUBSTITUTION and block.confirmation is not None:
        level = classify_confirmation(block.confirmation, thresholds)
        inputs = [TraceInput(block.subchildren[0], "measured", verdicts[block.subchildren[0]])]
        inputs += [TraceInput(s, "sideclaim", verdicts[s]) for s in block.sideclaims]
        return RULE_CONFIRMATION, inputs, _apply_confirmation(inputs, level), level.value

    inputs = [TraceInput(s, "subclaim", verdicts[s]) for s in block.subchildren]
    inputs += [TraceInput(s, "sideclaim", verdicts[s]) for s in block.sideclaims]
    if block.kind is BlockKind.DECOMPOSITION and block.effective_mode() is DecompositionMode.DISJUNCTIVE:
        return RULE_DISJUNCTIVE, inputs, _apply_disjunctive(inputs), ""
    return RULE_GENERAL, inputs, _apply_general(inputs), ""


def _base_verdict(
    graph: CaseGraph,
    node_id: str,
    verdicts: dict[str, Verdict],
    thresholds: ConfirmationThresholds,
) -> tuple[str, list[TraceInput], Verdict, str]:
    node = graph.nodes[node_id]
    if isinstance(node, ExternalSubcaseRef):
        imported = node.imported_assessment or Verdict.UNSUPPORTED
        return RULE_EXTERNAL, [TraceInput(node_id, "import", imported)], imported, ""
    if isinstance(node, DefeaterNode):
        if node.status is DefeaterStatus.RESIDUAL_RISK:
            return RULE_RESIDUAL, [], Verdict.FALSE, ""
        if node.status is DefeaterStatus.ADDRESSED:
            return RULE_ADDRESSED, [], Verdict.UNSUPPORTED, ""
        block = graph.block_of(node_id)
        if block is None:
            rule = RULE_DETACHED if node.target is None else RULE_DOUBT
            return rule, [], Verdict.UNSUPPORTED, ""
        return _block_rule(graph, block, verdicts, thresholds)
    assert isinstance(node, ClaimNode)
    if node.designation is Designation.ASSUMPTION:
        return RULE_ASSUMPTION, [], Verdict.TRUE, ""
    block = graph.block_of(node_id)
    if block is None:
        return RULE_UNDEVELOPED, [], Verdict.UNSUPPORTED, ""
    return _block_rule(graph, block, verdicts, thresholds)


def assess(
    graph: CaseGraph,
    thresholds: ConfirmationThresholds = DEFAULT_THRESHOLDS,
) -> AssessmentResult:
    """Compute the verdict of every claim-bearing node.

    Requires a structurally valid graph (no ERROR diagnostics).  Pure and
    deterministic: the same graph always yields the same result.
    """
    diagnostics = validate_structure(graph)
    if has_errors(diagnostics):
        raise InvalidCaseError(d for d in diagnostics)

    # Which defeaters can override which node, resolved once up front.
    exploratory_attackers: dict[str, list[str]] = {}
    for defeater in graph.defeaters():
        if (
            defeater.status is DefeaterStatus.ACTIVE
            and defeater.kind is DefeatKind.EXPLORATORY
            and defeater.target is not None
        ):
            affected = affected_claim(graph, defeater.id)
            exploratory_attackers.setdefault(affected, []).append(defeater.id)

    verdicts: dict[str, Verdict] = {}
    trace: dict[str, NodeExplanation] = {}
    for node_id in topological_order(graph):
        node = graph.nodes[node_id]
        if isinstance(node, EvidenceNode):
            continue
        exact = graph.active_exact_defeater(node_id)
        if exact is not None:
            base = negate(verdicts[exact.id])
            rule = RULE_EXACT
            inputs: list[TraceInput] = [TraceInput(exact.id, "exact", verdicts[exact.id])]
            detail = ""
        else:
            rule, inputs, base, detail = _base_verdict(graph, node_id, verdicts, thresholds)
        attackers = tuple(
            TraceInput(d, "defeater", verdicts[d])
            for d in sorted(exploratory_attackers.get(node_id, ()))
        )
        final = base
        if any(a.verdict is not Verdict.FALSE for a in attackers):
            final = Verdict.UNSUPPORTED
        verdicts[node_id] = final
        trace[node_id] = NodeExplanation(
            rule=rule,
            inputs=tuple(inputs),
            base=base,
            attackers=attackers,
            verdict=final,
            detail=detail,
        )
    return AssessmentResult(assessments=verdicts, trace=trace)


def replay_trace(trace: dict[str, NodeExplanation]) -> dict[str, Verdict]:
    """Recompute every verdict from the recorded rules and inputs alone."""
    out: dict[str, Verdict] = {}
    for node_id, entry in trace.items():
        inputs = list(entry.inputs)
        if entry.rule == RULE_ASSUMPTION:
            base = Verdict.TRUE
        elif entry.rule in (RULE_UNDEVELOPED, RULE_DOUBT, RULE_ADDRESSED, RULE_DETACHED):
            base = Verdict.UNSUPPORTED
        elif entry.rule == RULE_RESIDUAL:
            base = Verdict.FALSE
        elif entry.rule == RULE_EXTERNAL:
            base = inputs[0].verdict
        elif entry.rule == RULE_EVIDENCE:
            base = inputs[0].verdict
        elif entry.rule == RULE_GENERAL:
            base = _apply_general(inputs)
        elif entry.rule == RULE_DISJUNCTIVE:
            base = _apply_disjunctive(inputs)
        elif entry.rule == RULE_CONFIRMATION:
            base = _apply_confirmation(inputs, QualitativeLevel(entry.detail))
        elif entry.rule == RULE_EXACT:
            base = negate(inputs[0].verdict)
        else:
            raise ValueError(f"unknown rule {entry.rule!r} in trace")
        final = base
        if any(a.verdict is not Verdict.FALSE for a in entry.attackers):
            final = Verdict.UNSUPPORTED
        out[node_id] = final
    return out


@dataclass(frozen=True)
class Reason:
    kind: str  # top_not_true | sustained_defeater | unresolved_defeater |
    #            undeveloped_claim | missing_evidence | weak_confirmation |
    #            external_unresolved
    node: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind} {self.node}: {self.message}"


@dataclass
class StatusReport:
    closed: bool
    reasons: list[Reason] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "closed": self.closed,
            "reasons": [
                {"kind": r.kind, "node": r.node, "message": r.message}
                for r in self.reasons
            ],
        }


def _relevant_nodes(graph: CaseGraph, result: AssessmentResult) -> set[str]:
    """Nodes whose state can still affect closing the case.

    Starting from the top claim, follow each node's live support: the
    exact defeater when one is active (the ignored subcase is commentary),
    otherwise the node's block children — for a TRUE disjunctive
    decomposition only the TRUE disjuncts, since unused alternatives of a
    template need no development.  Exploratory defeaters pointing into a
    relevant node are relevant; refuted ones are not followed into their
    subcases (the case is exonerated), unresolved or sustained ones are.
    Addressed defeaters and everything only they reach stay out: they are
    commentary.
    """
    relevant: set[str] = set()
    expanded: set[str] = set()
    stack: list[tuple[str, bool]] = [(graph.top, True)]
    while stack:
        node_id, expand = stack.pop()
        relevant.add(node_id)
        if not expand or node_id in expanded:
            continue
        expanded.add(node_id)
        node = graph.nodes[node_id]
        if isinstance(node, EvidenceNode):
            continue
        exact = graph.active_exact_defeater(node_id)
        if exact is not None:
            stack.append((exact.id, True))
        elif isinstance(node, (ClaimNode, DefeaterNode)):
            block = graph.block_of(node_id)
            if block is not None:
                explanation = result.trace[node_id]
                if (
                    explanation.rule == RULE_DISJUNCTIVE
                    and explanation.base is Verdict.TRUE
                ):
                    children = list(block.sideclaims) + [
                        s for s in block.subchildren
                        if result.assessments.get(s) is Verdict.TRUE
                    ]
                else:
                    children = list(block.subchildren) + list(block.sideclaims)
                stack.extend((child, True) for child in children)
        for attacker in result.trace[node_id].attackers:
            refuted = result.assessments[attacker.node] is Verdict.FALSE
            stack.append((attacker.node, not refuted))
    return relevant


def case_status(graph: CaseGraph, result: AssessmentResult) -> StatusReport:
    """Decide whether the case is closed and itemize why when it is not.

    Closed means: the top claim is TRUE, no relevant active exploratory
    defeater is sustained or unresolved, and no relevant part of the case
    is incomplete (undeveloped claims, absent evidence, weak confirmation,
    unresolved external references).  Material inside addressed or refuted
    defeater subcases, or inside subcases ignored by an active exact
    defeater, does not open the case.
    """
    relevant = _relevant_nodes(graph, result)
    reasons: list[Reason] = []

    top_verdict = result.assessments[graph.top]
    if top_verdict is not Verdict.TRUE:
        reasons.append(
            Reason("top_not_true", graph.top, f"top claim is {top_verdict.value}")
        )

    for node_id in sorted(relevant):
        node = graph.nodes.get(node_id)
        if node is None:
            continue
        explanation = result.trace.get(node_id)
        if isinstance(node, DefeaterNode):
            if node.status is DefeaterStatus.ACTIVE and node.kind is DefeatKind.EXPLORATORY:
                verdict = result.assessments[node_id]
                if verdict is Verdict.TRUE:
                    reasons.append(
                        Reason("sustained_defeater", node_id, "defeater is sustained; the case must be revised")
                    )
                elif verdict is Verdict.UNSUPPORTED:
                    reasons.append(
                        Reason("unresolved_defeater", node_id, "defeater is unresolved (doubt or incomplete subcase)")
                    )
        if explanation is None:
            continue
        if explanation.rule == RULE_UNDEVELOPED:
            reasons.append(Reason("undeveloped_claim", node_id, "claim has no subcase"))
        elif explanation.rule == RULE_EVIDENCE and explanation.base is not Verdict.TRUE:
            reasons.append(
                Reason("missing_evidence", explanation.inputs[0].node, "evidence is not present")
            )
        elif (
            explanation.rule == RULE_CONFIRMATION
            and explanation.detail == QualitativeLevel.NEUTRAL.value
            and explanation.base is Verdict.UNSUPPORTED
            and all(i.verdict is Verdict.TRUE for i in explanation.inputs)
        ):
            reasons.append(
                Reason("weak_confirmation", node_id, "evidence does not discriminate the claim")
            )
        elif explanation.rule == RULE_EXTERNAL and explanation.base is Verdict.UNSUPPORTED:
            reasons.append(
                Reason("external_unresolved", node_id, "external subcase delivers no verdict")
            )

    reasons.sort(key=lambda r: (r.kind, r.node))
    return StatusReport(closed=not reasons, reasons=reasons)
