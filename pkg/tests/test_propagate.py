import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

import caseval as cv
from caseval.model import (
    BlockKind,
    ConfirmationAnnotation,
    ConfirmationMode,
    DecompositionMode,
    DefeatKind,
    DefeaterStatus,
    QualitativeLevel,
    Verdict,
)
from caseval.propagate import (
    ConfirmationThresholds,
    classify_confirmation,
    replay_trace,
)
from caseval.generate import random_case
from gadgets import defeater_with_verdict

T, F, U = Verdict.TRUE, Verdict.FALSE, Verdict.UNSUPPORTED


class TestLeafRules:
    def test_assumption_is_true(self, minimal):
        result = cv.assess(minimal)
        assert result.assessments["top"] is T

    def test_bare_claim_is_unsupported(self):
        b = cv.CaseBuilder()
        b.top(b.claim("undeveloped", id="top"))
        assert cv.assess(b.finish()).assessments["top"] is U

    def test_residual_risk_is_false(self):
        b = cv.CaseBuilder()
        top = b.assumption("top", id="top")
        d = b.defeater(
            "accepted risk", top,
            status=DefeaterStatus.RESIDUAL_RISK,
            residual_justification="minor impact",
        )
        b.top(top)
        result = cv.assess(b.finish())
        assert result.assessments[d] is F
        assert result.assessments[top] is T  # refuted-by-designation leaves case alone

    @pytest.mark.parametrize("imported,expected", [(T, T), (F, F), (U, U), (None, U)])
    def test_external_ref_inherits(self, imported, expected):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        ref = b.external("cases/elsewhere.json", imported=imported)
        b.block(BlockKind.CONCRETION, top, [ref])
        b.top(top)
        assert cv.assess(b.finish()).assessments[ref] is expected


class TestDefeaterRules:
    def test_doubt_makes_true_claim_unsupported(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        ev = b.evidence("record", present=True)
        b.incorporate_evidence(top, ev)
        b.defeater("something seems off", top)
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is U

    def test_refuted_defeater_leaves_case_alone(self):
        b = cv.CaseBuilder()
        top = b.assumption("top", id="top")
        defeater_with_verdict(b, top, F)
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is T

    def test_addressed_defeater_is_commentary(self, lightbulb):
        nodes = dict(lightbulb.nodes)
        nodes["d_insufficient"] = dataclasses.replace(
            nodes["d_insufficient"], status=DefeaterStatus.ADDRESSED
        )
        marked = dataclasses.replace(lightbulb, nodes=nodes)
        result = cv.assess(marked)
        assert result.assessments["cases_complete"] is T
        assert result.assessments["top"] is T

    def test_defeater_on_argument_node_hits_parent(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        block = b.block(BlockKind.CONCRETION, top, [b.assumption("sub")])
        b.defeater("justification is weak", block)
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is U

    def test_defeater_on_evidence_hits_measured_claim(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        ev = b.evidence("record", present=True)
        b.incorporate_evidence(top, ev)
        b.defeater("the record is stale", ev)
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is U

    def test_exact_defeater_negates(self):
        for inner, expected in [(T, F), (F, T), (U, U)]:
            b = cv.CaseBuilder()
            top = b.claim("top", id="top")
            defeater_with_verdict(b, top, inner, kind=DefeatKind.EXACT)
            b.top(top)
            assert cv.assess(b.finish()).assessments["top"] is expected

    def test_exact_defeater_ignores_target_subcase(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        ev = b.evidence("record", present=True)
        b.incorporate_evidence(top, ev)  # would make top TRUE on its own
        b.defeater("exact negation, unexplored", top, kind=DefeatKind.EXACT)
        b.top(top)
        # The exact defeater is UNSUPPORTED, so the target is too, despite
        # the present evidence below it.
        assert cv.assess(b.finish()).assessments["top"] is U

    def test_ordinary_overrides_exact_result(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        defeater_with_verdict(b, top, F, kind=DefeatKind.EXACT)  # top := TRUE
        b.defeater("separate live doubt", top)
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is U


class TestBlocks:
    def test_conjunctive_all_true(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        b.block(
            BlockKind.DECOMPOSITION,
            top,
            [b.assumption("s1"), b.assumption("s2")],
            sideclaims=[b.assumption("side")],
            mode=DecompositionMode.CONJUNCTIVE,
        )
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is T

    def test_disjunctive_needs_one_true(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        b.block(
            BlockKind.DECOMPOSITION,
            top,
            [b.assumption("works"), b.claim("unexplored")],
            mode=DecompositionMode.DISJUNCTIVE,
        )
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is T

    def test_evidence_absent_is_unsupported(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        b.incorporate_evidence(top, b.evidence("record", present=False))
        b.top(top)
        assert cv.assess(b.finish()).assessments["top"] is U

    def test_counter_evidence_forces_false(self):
        b = cv.CaseBuilder()
        useful = b.claim("no dormant faults remain", id="top")
        measured = b.claim("tests revealed failures")
        b.incorporate_evidence(measured, b.evidence("test report", present=True))
        b.block(
            BlockKind.SUBSTITUTION,
            useful,
            [measured],
            confirmation=ConfirmationAnnotation(
                mode=ConfirmationMode.QUALITATIVE,
                qualitative_level=QualitativeLevel.STRONGLY_NEGATIVE,
            ),
        )
        b.top(useful)
        assert cv.assess(b.finish()).assessments["top"] is F


class TestClassifyConfirmation:
    def test_equal_likelihoods_neutral(self):
        ann = ConfirmationAnnotation(
            mode=ConfirmationMode.NUMERIC, p_e_given_c=0.4, p_e_given_not_c=0.4
        )
        assert classify_confirmation(ann) is QualitativeLevel.NEUTRAL

    def test_nine_to_one_is_still_neutral_at_default_thresholds(self):
        ann = ConfirmationAnnotation(
            mode=ConfirmationMode.NUMERIC, p_e_given_c=0.9, p_e_given_not_c=0.1
        )
        # log10(9) = 0.9542... < 1.0
        assert classify_confirmation(ann) is QualitativeLevel.NEUTRAL

    def test_hundred_to_one_is_strongly_positive(self):
        ann = ConfirmationAnnotation(
            mode=ConfirmationMode.NUMERIC, p_e_given_c=0.99, p_e_given_not_c=0.0099
        )
        assert classify_confirmation(ann) is QualitativeLevel.STRONGLY_POSITIVE

    def test_zero_denominator_convention(self):
        ann = ConfirmationAnnotation(
            mode=ConfirmationMode.NUMERIC, p_e_given_c=0.5, p_e_given_not_c=0.0
        )
        assert classify_confirmation(ann) is QualitativeLevel.STRONGLY_POSITIVE
        both_zero = ConfirmationAnnotation(
            mode=ConfirmationMode.NUMERIC, p_e_given_c=0.0, p_e_given_not_c=0.0
        )
        with pytest.raises(ValueError, match="impossible"):
            classify_confirmation(both_zero)

    def test_qualitative_passthrough(self):
        ann = ConfirmationAnnotation(
            mode=ConfirmationMode.QUALITATIVE,
            qualitative_level=QualitativeLevel.STRONGLY_NEGATIVE,
        )
        assert classify_confirmation(ann) is QualitativeLevel.STRONGLY_NEGATIVE

    def test_custom_thresholds(self):
        ann = ConfirmationAnnotation(
            mode=ConfirmationMode.NUMERIC, p_e_given_c=0.9, p_e_given_not_c=0.1
        )
        loose = ConfirmationThresholds(t_pos=0.5, t_neg=-0.5)
        assert classify_confirmation(ann, loose) is QualitativeLevel.STRONGLY_POSITIVE

    def test_threshold_ordering_enforced(self):
        with pytest.raises(ValueError):
            ConfirmationThresholds(t_pos=-1.0, t_neg=1.0)


class TestLightbulb:
    def test_worked_example_verdicts(self, lightbulb):
        verdicts = cv.assess(lightbulb).assessments
        assert verdicts["led_bulb"] is T
        assert verdicts["d_long_life"] is T
        assert verdicts["wears_out"] is F
        assert verdicts["d_insufficient"] is U
        assert verdicts["cases_complete"] is U
        assert verdicts["top"] is U

    def test_status_open_with_unresolved_defeater(self, lightbulb):
        result = cv.assess(lightbulb)
        status = cv.case_status(lightbulb, result)
        assert not status.closed
        kinds = {(r.kind, r.node) for r in status.reasons}
        assert ("unresolved_defeater", "d_insufficient") in kinds

    def test_unused_disjunct_is_not_a_gap(self, lightbulb):
        result = cv.assess(lightbulb)
        status = cv.case_status(lightbulb, result)
        assert all(r.node != "labeled_bulb" for r in status.reasons)


class TestEliminative:
    def test_all_disjuncts_refuted_closes_case(self, eliminative):
        result = cv.assess(eliminative)
        assert result.assessments["top"] is T
        assert result.assessments["d_faulty"] is F
        assert cv.case_status(eliminative, result).closed


class TestStatus:
    def test_minimal_closed(self, minimal):
        result = cv.assess(minimal)
        assert cv.case_status(minimal, result).closed

    def test_missing_evidence_reason(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        ev = b.evidence("record", present=False)
        b.incorporate_evidence(top, ev)
        b.top(top)
        graph = b.finish()
        status = cv.case_status(graph, cv.assess(graph))
        assert any(r.kind == "missing_evidence" and r.node == ev for r in status.reasons)

    def test_weak_confirmation_reason(self):
        b = cv.CaseBuilder()
        useful = b.claim("useful", id="top")
        measured = b.claim("measured")
        b.incorporate_evidence(measured, b.evidence("record", present=True))
        b.block(
            BlockKind.SUBSTITUTION,
            useful,
            [measured],
            confirmation=ConfirmationAnnotation(
                mode=ConfirmationMode.QUALITATIVE,
                qualitative_level=QualitativeLevel.NEUTRAL,
            ),
        )
        b.top(useful)
        graph = b.finish()
        status = cv.case_status(graph, cv.assess(graph))
        assert any(r.kind == "weak_confirmation" for r in status.reasons)

    def test_commentary_subcase_gaps_do_not_open(self, lightbulb):
        nodes = dict(lightbulb.nodes)
        nodes["d_insufficient"] = dataclasses.replace(
            nodes["d_insufficient"], status=DefeaterStatus.ADDRESSED
        )
        marked = dataclasses.replace(lightbulb, nodes=nodes)
        status = cv.case_status(marked, cv.assess(marked))
        # switch_fails / wiring_fails are undeveloped but sit inside the
        # addressed defeater's subcase.
        assert status.closed

    def test_sustained_defeater_reason(self):
        b = cv.CaseBuilder()
        top = b.assumption("top", id="top")
        defeater_with_verdict(b, top, T)
        b.top(top)
        graph = b.finish()
        status = cv.case_status(graph, cv.assess(graph))
        assert any(r.kind == "sustained_defeater" for r in status.reasons)


class TestTrace:
    def test_replay_reproduces_fixture(self, lightbulb):
        result = cv.assess(lightbulb)
        assert replay_trace(result.trace) == result.assessments

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_replay_reproduces_random(self, seed):
        graph = random_case(seed)
        result = cv.assess(graph)
        assert replay_trace(result.trace) == result.assessments

    def test_serialized_output_shape(self, lightbulb):
        payload = cv.assess(lightbulb).to_json_dict()
        assert payload["wears_out"] == {"verdict": "FALSE", "rule": "exact-defeater"}


class TestProperties:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_no_false_through_general_blocks(self, seed):
        graph = random_case(seed)
        result = cv.assess(graph)
        for explanation in result.trace.values():
            if explanation.rule == "general-block":
                assert explanation.base is not F

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_doubt_never_enlarges_true_set(self, seed):
        graph = random_case(seed)
        before = cv.assess(graph).assessments
        true_before = {n for n, v in before.items() if v is T}
        target = sorted(graph.nodes)[seed % len(graph.nodes)]
        doubt = cv.DefeaterNode(id="extra_doubt", text="hold on", target=target)
        probe = dataclasses.replace(graph, nodes={**graph.nodes, doubt.id: doubt})
        diagnostics = cv.validate_structure(probe)
        if cv.model.has_errors(diagnostics):
            return  # e.g. target was shared evidence; not a legal doubt site
        after = cv.assess(probe).assessments
        true_after = {n for n, v in after.items() if v is T and n != doubt.id}
        assert true_after <= true_before

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_assess_is_deterministic(self, seed):
        graph = random_case(seed)
        assert cv.assess(graph).assessments == cv.assess(graph).assessments

    def test_assess_rejects_invalid_graph(self):
        b = cv.CaseBuilder()
        top = b.claim("c", id="top")
        b.block(BlockKind.CONCRETION, top, [top])
        b.top(top)
        with pytest.raises(cv.InvalidCaseError):
            cv.assess(b.finish())
