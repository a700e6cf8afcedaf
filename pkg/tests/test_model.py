import dataclasses

import pytest

import caseval as cv
from caseval.model import (
    BlockKind,
    DefeatKind,
    DefeaterStatus,
    Severity,
    StructureError,
    has_errors,
)


def errors(graph):
    return [d for d in cv.validate_structure(graph) if d.severity is Severity.ERROR]


def test_minimal_assumption_case_is_valid(minimal):
    assert cv.validate_structure(minimal) == []


def test_lightbulb_fixture_is_valid(lightbulb):
    assert cv.validate_structure(lightbulb) == []


def test_self_support_is_a_cycle():
    b = cv.CaseBuilder()
    top = b.claim("c", id="top")
    b.block(BlockKind.CONCRETION, top, [top])
    b.top(top)
    diags = errors(b.finish())
    assert any("support cycle" in d.message for d in diags)


def test_defeat_cycle_is_rejected():
    b = cv.CaseBuilder()
    top = b.claim("top claim", id="top")
    sub = b.claim("sub")
    b.block(BlockKind.CONCRETION, top, [sub])
    d = b.defeater("doubt about sub", sub)
    # The defeater's subcase reaches back up to the top claim: cycle.
    b.block(BlockKind.CONCRETION, d, [top])
    b.top(top)
    diags = errors(b.finish())
    assert any("support cycle" in d.message for d in diags)


def test_assumption_with_block_is_invalid():
    b = cv.CaseBuilder()
    top = b.assumption("assumed", id="top")
    b.block(BlockKind.CONCRETION, top, [b.claim("sub")])
    b.top(top)
    assert any("leaf" in d.message for d in errors(b.finish()))


def test_assumption_requires_justification():
    b = cv.CaseBuilder()
    top = b.assumption("assumed", justification="", id="top")
    b.top(top)
    assert any("justification" in d.message for d in errors(b.finish()))


def test_residual_risk_requires_justification_and_no_subcase():
    b = cv.CaseBuilder()
    top = b.assumption("top", id="top")
    d = b.defeater("risk", top, status=DefeaterStatus.RESIDUAL_RISK)
    b.block(BlockKind.CONCRETION, d, [b.claim("sub")])
    b.top(top)
    messages = [d.message for d in errors(b.finish())]
    assert any("no subcase" in m for m in messages)
    assert any("justification" in m for m in messages)


def test_exact_defeater_must_target_claim_or_defeater():
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    ev = b.evidence("record")
    b.incorporate_evidence(top, ev)
    b.defeater("negation", ev, kind=DefeatKind.EXACT)
    b.top(top)
    assert any("exact defeater" in d.message for d in errors(b.finish()))


def test_second_active_exact_defeater_is_an_error():
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    b.defeater("negation one", top, kind=DefeatKind.EXACT)
    b.defeater("negation two", top, kind=DefeatKind.EXACT)
    b.top(top)
    assert any("second active exact defeater" in d.message for d in errors(b.finish()))


def test_two_blocks_for_one_parent_is_an_error():
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    b.block(BlockKind.CONCRETION, top, [b.claim("sub1")])
    b.block(BlockKind.CONCRETION, top, [b.claim("sub2")])
    b.top(top)
    assert any("already supported" in d.message for d in errors(b.finish()))


def test_evidence_outside_incorporation_is_an_error():
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    ev = b.evidence("record")
    b.block(BlockKind.CONCRETION, top, [ev])
    b.top(top)
    assert any("evidence" in d.message for d in errors(b.finish()))


def test_top_may_not_be_a_block_child():
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    other = b.claim("other")
    b.block(BlockKind.CONCRETION, other, [top])
    b.top(top)
    assert any("top claim" in d.message for d in errors(b.finish()))


def test_dangling_target_is_an_error():
    b = cv.CaseBuilder()
    top = b.assumption("top", id="top")
    b.defeater("doubt", "missing")
    b.top(top)
    assert any("unknown node" in d.message for d in errors(b.finish()))


def test_external_target_is_a_warning_not_error():
    b = cv.CaseBuilder()
    top = b.claim("top", id="top")
    ref = b.external("cases/other.json")
    b.block(BlockKind.CONCRETION, top, [ref])
    b.defeater("the external case is wrong", ref)
    b.top(top)
    diags = cv.validate_structure(b.finish())
    assert not has_errors(diags)
    assert any(d.severity is Severity.WARNING for d in diags)


def test_validate_is_pure_and_deterministic(lightbulb):
    first = cv.validate_structure(lightbulb)
    second = cv.validate_structure(lightbulb)
    assert first == second


def test_removing_addressed_defeater_keeps_validity(lightbulb):
    nodes = dict(lightbulb.nodes)
    nodes["d_insufficient"] = dataclasses.replace(
        nodes["d_insufficient"], status=DefeaterStatus.ADDRESSED
    )
    marked = dataclasses.replace(lightbulb, nodes=nodes)
    assert not has_errors(cv.validate_structure(marked))
    # Removing the defeater removes its whole subcase with it.
    subtree = {
        "d_insufficient", "wears_out", "switch_fails", "wiring_fails",
        "d_long_life", "led_bulb", "labeled_bulb", "ev_led",
    }
    removed = dataclasses.replace(
        marked,
        nodes={k: v for k, v in nodes.items() if k not in subtree},
        blocks=tuple(
            b for b in marked.blocks if b.parent not in subtree
        ),
    )
    assert not has_errors(cv.validate_structure(removed))


class TestAffectedClaim:
    def test_claim_target_is_itself(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        d = b.defeater("doubt", top)
        b.top(top)
        assert cv.affected_claim(b.finish(), d) == top

    def test_block_target_resolves_to_parent(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        block = b.block(BlockKind.CONCRETION, top, [b.claim("sub")])
        d = b.defeater("the step is unjustified", block)
        b.top(top)
        assert cv.affected_claim(b.finish(), d) == top

    def test_evidence_target_resolves_to_incorporating_parent(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        ev = b.evidence("record")
        b.incorporate_evidence(top, ev)
        d = b.defeater("the record is stale", ev)
        b.top(top)
        assert cv.affected_claim(b.finish(), d) == top

    def test_sideclaim_target_is_the_sideclaim(self, lightbulb):
        assert cv.affected_claim(lightbulb, "d_insufficient") == "cases_complete"

    def test_defeater_target_is_that_defeater(self, lightbulb):
        assert cv.affected_claim(lightbulb, "d_long_life") == "wears_out"
        b = cv.CaseBuilder()
        top = b.assumption("top", id="top")
        d1 = b.defeater("doubt", top)
        d2 = b.defeater("counter-doubt", d1)
        b.top(top)
        assert cv.affected_claim(b.finish(), d2) == d1

    def test_detached_defeater_raises(self):
        b = cv.CaseBuilder()
        top = b.assumption("top", id="top")
        d = b.defeater("floating doubt", None)
        b.top(top)
        with pytest.raises(StructureError):
            cv.affected_claim(b.finish(), d)

    def test_result_is_always_claim_bearing(self, lightbulb, eliminative):
        for graph in (lightbulb, eliminative):
            for defeater in graph.defeaters():
                affected = cv.affected_claim(graph, defeater.id)
                assert isinstance(graph.nodes[affected], cv.model.CLAIM_BEARING)


class TestAttachmentPoints:
    def test_single_claim_and_detached_defeater(self):
        b = cv.CaseBuilder()
        top = b.claim("the claim", id="top")
        d = b.defeater("a doubt", None)
        b.top(top)
        assert cv.attachment_points(b.finish(), d) == {top}

    def test_multiple_defeaters_per_node_allowed(self):
        b = cv.CaseBuilder()
        top = b.claim("the claim", id="top")
        b.defeater("first doubt", top)
        d2 = b.defeater("second doubt", None)
        b.top(top)
        assert top in cv.attachment_points(b.finish(), d2)

    def test_own_subcase_is_excluded(self):
        b = cv.CaseBuilder()
        top = b.claim("top", id="top")
        d = b.defeater("doubt", top)
        sub = b.claim("inside the doubt's subcase")
        block = b.block(BlockKind.CONCRETION, d, [sub])
        b.top(top)
        points = cv.attachment_points(b.finish(), d)
        assert sub not in points
        assert block not in points
        assert d not in points

    def test_exact_kind_restricted_to_claimlike(self, lightbulb):
        points = cv.attachment_points(lightbulb, "d_long_life")
        assert "ev_led" not in points  # evidence cannot take an exact negation
        assert "b_decomp" not in points
        assert "switch_fails" in points
