import math
import random

import pytest
from hypothesis import given, settings, strategies as st

import caseval as cv
from caseval.confidence import (
    ConfidenceConfig,
    ConfidenceSource,
    good_measure,
    posterior_confidence,
    propagate_confidence,
)
from caseval.generate import random_positive_tree
from caseval.model import (
    BlockKind,
    ConfirmationAnnotation,
    ConfirmationMode,
    DecompositionMode,
    QualitativeLevel,
    Verdict,
)

# log10(9), computed independently: 9 = 3^2, log10(3) = 0.47712125471966244.
LOG10_NINE = 0.9542425094393249


class TestGoodMeasure:
    def test_equal_likelihoods_zero(self):
        for x in (0.1, 0.33, 0.5, 0.99, 1.0):
            assert good_measure(x, x) == 0.0

    def test_nine_to_one(self):
        assert good_measure(0.9, 0.1) == pytest.approx(LOG10_NINE, abs=1e-12)

    def test_antisymmetry(self):
        assert good_measure(0.1, 0.9) == pytest.approx(-LOG10_NINE, abs=1e-12)

    def test_antisymmetry_random_pairs(self):
        rng = random.Random(5)
        for _ in range(100):
            p = rng.uniform(1e-6, 1.0)
            q = rng.uniform(1e-6, 1.0)
            assert good_measure(p, q) == pytest.approx(-good_measure(q, p), abs=1e-12)

    def test_zero_denominator(self):
        assert good_measure(0.5, 0.0) == math.inf
        with pytest.raises(ValueError, match="impossible"):
            good_measure(0.0, 0.0)


class TestPosterior:
    def test_uninformative_evidence(self):
        assert posterior_confidence(0.5, 0.7, 0.7) == pytest.approx(0.5, abs=1e-12)

    def test_even_prior_strong_evidence(self):
        # 0.45 / (0.45 + 0.05)
        assert posterior_confidence(0.5, 0.9, 0.1) == pytest.approx(0.9, abs=1e-9)

    def test_skeptical_prior(self):
        # 0.18 / (0.18 + 0.08)
        assert posterior_confidence(0.2, 0.9, 0.1) == pytest.approx(0.6923, abs=1e-4)

    def test_monotone_in_likelihood_and_prior(self):
        rng = random.Random(6)
        for _ in range(200):
            prior = rng.uniform(0.05, 0.95)
            p = rng.uniform(0.05, 0.95)
            q = rng.uniform(0.05, 0.95)
            assert posterior_confidence(prior, min(p + 0.04, 1.0), q) >= posterior_confidence(prior, p, q)
            assert posterior_confidence(min(prior + 0.04, 0.99), p, q) >= posterior_confidence(prior, p, q)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            posterior_confidence(0.0, 0.5, 0.5)
        with pytest.raises(ValueError):
            posterior_confidence(0.5, 0.0, 0.5)


def _two_child_case(doubts):
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    children = []
    for i, doubt in enumerate(doubts):
        useful = b.claim(f"useful {i}")
        measured = b.claim(f"measured {i}")
        b.incorporate_evidence(measured, b.evidence(f"record {i}", present=True))
        prior = 1.0 - doubt  # posterior == prior when likelihoods are equal
        b.block(
            BlockKind.SUBSTITUTION,
            useful,
            [measured],
            confirmation=ConfirmationAnnotation(
                mode=ConfirmationMode.NUMERIC,
                p_e_given_c=0.9,
                p_e_given_not_c=0.9,
                prior_c=prior,
            ),
        )
        children.append(useful)
    b.block(BlockKind.CONCRETION, top, children)
    b.top(top)
    return b.finish()


class TestPropagation:
    def test_sum_of_doubts(self):
        # Equal likelihoods make the posterior equal the prior, so the two
        # useful claims carry doubts 0.05 and 0.10 exactly.
        graph = _two_child_case([0.05, 0.10])
        assessments = {n: Verdict.TRUE for n in graph.claim_bearing_ids()}
        # Neutral confirmation would not assess TRUE; force the map to
        # isolate the arithmetic.
        report = propagate_confidence(graph, assessments)
        assert report.entries["top"].confidence == pytest.approx(0.85, abs=1e-9)
        assert report.entries["top"].source is ConfidenceSource.SUM_OF_DOUBTS

    def test_zero_doubts_give_full_confidence(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        m1 = b.claim("m1")
        b.incorporate_evidence(m1, b.evidence("r1", present=True))
        m2 = b.claim("m2")
        b.incorporate_evidence(m2, b.evidence("r2", present=True))
        b.block(BlockKind.CONCRETION, top, [m1, m2])
        b.top(top)
        graph = b.finish()
        report = propagate_confidence(graph, cv.assess(graph).assessments)
        assert report.entries["top"].confidence == 1.0

    def test_clamping_at_one(self):
        graph = _two_child_case([0.7, 0.6])
        assessments = {n: Verdict.TRUE for n in graph.claim_bearing_ids()}
        report = propagate_confidence(graph, assessments)
        assert report.entries["top"].confidence == 0.0  # doubt clamped to 1.0

    def test_assumption_default_configurable(self, minimal):
        report = propagate_confidence(
            minimal, cv.assess(minimal).assessments,
            config=ConfidenceConfig(assumption_default=0.75),
        )
        assert report.entries["top"].confidence == 0.75
        assert report.entries["top"].source is ConfidenceSource.ASSUMPTION_DEFAULT

    def test_qualitative_defaults(self):
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
                qualitative_level=QualitativeLevel.STRONGLY_POSITIVE,
            ),
        )
        b.top(useful)
        graph = b.finish()
        report = propagate_confidence(graph, cv.assess(graph).assessments)
        assert report.entries["top"].confidence == 0.95

    def test_disjunctive_takes_best_disjunct(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        strong = b.assumption("strong alternative")
        weak = b.assumption("weak alternative")
        b.block(
            BlockKind.DECOMPOSITION, top, [strong, weak],
            mode=DecompositionMode.DISJUNCTIVE,
        )
        b.top(top)
        graph = b.finish()
        report = propagate_confidence(
            graph, cv.assess(graph).assessments, overrides={strong: 0.98, weak: 0.6},
        )
        assert report.entries["top"].confidence == pytest.approx(0.98)

    def test_override_changes_only_node_and_ancestors(self):
        graph = _two_child_case([0.05, 0.10])
        assessments = {n: Verdict.TRUE for n in graph.claim_bearing_ids()}
        base = propagate_confidence(graph, assessments)
        useful_ids = sorted(
            n for n in base.entries
            if base.entries[n].source is ConfidenceSource.EVIDENCE_POSTERIOR
            and n.startswith("c") and n != "top" and base.entries[n].confidence < 1.0
        )
        target = useful_ids[0]
        tweaked = propagate_confidence(graph, assessments, overrides={target: 0.5})
        assert tweaked.entries[target].source is ConfidenceSource.OVERRIDE
        assert tweaked.entries["top"].confidence != base.entries["top"].confidence
        unchanged = set(base.entries) - {target, "top"}
        for node in unchanged:
            assert tweaked.entries[node] == base.entries[node]

    def test_override_out_of_range_rejected(self, minimal):
        with pytest.raises(ValueError, match="override"):
            propagate_confidence(minimal, cv.assess(minimal).assessments, overrides={"top": 1.5})

    def test_non_true_nodes_absent(self, lightbulb):
        result = cv.assess(lightbulb)
        report = propagate_confidence(lightbulb, result.assessments)
        assert "wears_out" not in report.entries  # FALSE
        assert "top" not in report.entries  # UNSUPPORTED
        assert report.entries["led_bulb"].confidence == 1.0

    def test_residual_risk_flagged(self):
        b = cv.CaseBuilder()
        top = b.assumption("top", id="top")
        b.defeater(
            "accepted risk", top,
            status=cv.DefeaterStatus.RESIDUAL_RISK,
            residual_justification="tolerable",
        )
        b.top(top)
        graph = b.finish()
        report = propagate_confidence(graph, cv.assess(graph).assessments)
        assert any("residual risk" in w for w in report.warnings)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_parent_at_most_min_child(self, seed):
        graph = random_positive_tree(seed)
        result = cv.assess(graph)
        report = propagate_confidence(graph, result.assessments)
        for block in graph.blocks:
            if block.kind is BlockKind.EVIDENCE_INCORPORATION:
                continue
            parent = report.entries.get(block.parent)
            if parent is None:
                continue
            children = list(block.subchildren) + list(block.sideclaims)
            child_entries = [report.entries[c] for c in children if c in report.entries]
            if len(child_entries) != len(children):
                continue
            assert parent.confidence <= min(e.confidence for e in child_entries) + 1e-12

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_all_confidences_clamped(self, seed):
        graph = random_positive_tree(seed)
        report = propagate_confidence(graph, cv.assess(graph).assessments)
        for entry in report.entries.values():
            assert 0.0 <= entry.confidence <= 1.0
