"""Space construction, the three structural rules, and validation."""

import pytest

from hypergrid.errors import SpaceError
from hypergrid.space import (
    DOMAIN_DECLARED,
    PROPAGATED,
    SHARED_SUPPORT,
    HypothesisSpace,
    validate_space,
)


def overlap_space(with_alternatives: bool = True) -> HypothesisSpace:
    """Three evidence nodes, two hypotheses sharing the middle one."""
    s = HypothesisSpace()
    s.add_hypothesis(level=0, model_size=1, prior=0.7, hid="h1")
    s.add_hypothesis(level=0, model_size=1, prior=0.1, hid="h2")
    s.add_hypothesis(level=0, model_size=1, prior=0.2, hid="h3")
    s.add_hypothesis(level=1, model_size=2, support={"h1", "h2"}, hid="H1")
    s.add_hypothesis(level=1, model_size=2, support={"h2", "h3"}, hid="H2")
    if with_alternatives:
        s.generate_all_alternatives()
    return s


class TestAddHypothesis:
    def test_evidence_gets_prior_as_accrued(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.7, hid="h1")
        node = s.node("h1")
        assert node.accrued == 0.7
        assert node.prior == 0.7
        assert node.level == 0
        assert not s.conflicts()

    def test_shared_support_conflict_auto_created(self):
        s = overlap_space(with_alternatives=False)
        edge = s.conflict_edge("H1", "H2")
        assert edge is not None
        assert edge.reason == SHARED_SUPPORT
        assert edge.level == 1
        assert len(s.conflicts()) == 1

    def test_disjoint_support_creates_no_conflict(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="b")
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        s.add_hypothesis(level=1, model_size=1, support={"b"}, hid="B")
        assert not s.conflicts()

    def test_empty_support_above_level_zero_rejected(self):
        s = overlap_space()
        with pytest.raises(SpaceError, match="nonempty support"):
            s.add_hypothesis(level=2, model_size=1, support=())

    def test_prior_above_level_zero_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        with pytest.raises(SpaceError, match="only evidence"):
            s.add_hypothesis(level=1, model_size=1, support={"a"}, prior=0.5)

    def test_evidence_requires_prior(self):
        s = HypothesisSpace()
        with pytest.raises(SpaceError, match="require a prior"):
            s.add_hypothesis(level=0, model_size=1)

    def test_evidence_takes_no_support(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        with pytest.raises(SpaceError, match="no support"):
            s.add_hypothesis(level=0, model_size=1, prior=0.5, support={"a"})

    def test_prior_out_of_range_rejected(self):
        s = HypothesisSpace()
        with pytest.raises(SpaceError, match=r"\[0, 1\]"):
            s.add_hypothesis(level=0, model_size=1, prior=1.5)

    def test_unknown_support_id_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        with pytest.raises(SpaceError, match="unknown support id"):
            s.add_hypothesis(level=1, model_size=1, support={"nope"})

    def test_support_at_wrong_level_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        with pytest.raises(SpaceError, match="expected level 1"):
            s.add_hypothesis(level=2, model_size=1, support={"a"})

    def test_support_exceeding_model_size_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="b")
        with pytest.raises(SpaceError, match="exceeding model_size"):
            s.add_hypothesis(level=1, model_size=1, support={"a", "b"})

    def test_duplicate_support_set_rejected(self):
        s = overlap_space(with_alternatives=False)
        with pytest.raises(SpaceError, match="already claims"):
            s.add_hypothesis(level=1, model_size=3, support={"h1", "h2"})

    def test_duplicate_id_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        with pytest.raises(SpaceError, match="already in use"):
            s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")

    def test_bad_level_and_model_size_rejected(self):
        s = HypothesisSpace()
        with pytest.raises(SpaceError):
            s.add_hypothesis(level=-1, model_size=1, prior=0.5)
        with pytest.raises(SpaceError):
            s.add_hypothesis(level=0, model_size=0, prior=0.5)

    def test_generated_ids_are_fresh(self):
        s = HypothesisSpace()
        first = s.add_hypothesis(level=0, model_size=1, prior=0.5)
        second = s.add_hypothesis(level=0, model_size=1, prior=0.5)
        assert first == "n1"
        assert second == "n2"


class TestDeclareConflict:
    def test_domain_declared_edge(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="b")
        edge = s.declare_conflict("a", "b")
        assert edge.reason == DOMAIN_DECLARED
        assert edge.pair == ("a", "b")

    def test_self_conflict_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        with pytest.raises(SpaceError, match="itself"):
            s.declare_conflict("a", "a")

    def test_cross_level_conflict_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        with pytest.raises(SpaceError, match="same-level"):
            s.declare_conflict("a", "A")

    def test_unknown_id_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        with pytest.raises(SpaceError, match="unknown"):
            s.declare_conflict("a", "ghost")

    def test_idempotent_redeclaration(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="b")
        first = s.declare_conflict("a", "b")
        second = s.declare_conflict("a", "b")
        assert first is second
        assert len(s.conflicts()) == 1

    def test_declaring_over_shared_support_keeps_reason(self):
        s = overlap_space(with_alternatives=False)
        before = s.conflicts()
        edge = s.declare_conflict("H1", "H2")
        assert edge.reason == SHARED_SUPPORT
        assert s.conflicts() == before

    def test_edges_are_symmetric_and_canonical(self):
        s = overlap_space(with_alternatives=False)
        assert s.conflict_edge("H2", "H1") is s.conflict_edge("H1", "H2")
        assert s.in_conflict("H2", "H1")


class TestGenerateAlternatives:
    def test_overlap_pair_produces_both_reduced_readings(self):
        s = overlap_space(with_alternatives=False)
        created = s.generate_alternatives(s.conflict_edge("H1", "H2"))
        assert created == {"H3", "H4"}
        h3, h4 = s.node("H3"), s.node("H4")
        assert h3.support == frozenset({"h1"})
        assert h4.support == frozenset({"h3"})
        # Alternatives keep the parent's model even though they observe less.
        assert h3.model_size == 2 and h4.model_size == 2
        assert h3.alternative_of == "H1" and h4.alternative_of == "H2"
        # Rule 1 fires against the new nodes too.
        assert s.in_conflict("H1", "H3")
        assert s.in_conflict("H2", "H4")
        assert not s.in_conflict("H3", "H4")

    def test_subset_support_generates_one_alternative(self):
        s = HypothesisSpace()
        for hid, prior in (("h2", 0.5), ("h3", 0.5)):
            s.add_hypothesis(level=0, model_size=1, prior=prior, hid=hid)
        s.add_hypothesis(level=1, model_size=1, support={"h2"}, hid="H1")
        s.add_hypothesis(level=1, model_size=2, support={"h2", "h3"}, hid="H2")
        created = s.generate_alternatives(s.conflict_edge("H1", "H2"))
        # H1's reduced set is empty: no evidence-free node appears.
        assert len(created) == 1
        (alt,) = created
        assert s.node(alt).support == frozenset({"h3"})
        assert len(s) == 5

    def test_existing_node_reused_instead_of_duplicated(self):
        s = overlap_space(with_alternatives=False)
        s.add_hypothesis(level=1, model_size=2, support={"h1"}, hid="solo")
        before = len(s)
        created = s.generate_alternatives(s.conflict_edge("H1", "H2"))
        assert "solo" in created
        assert len(s) == before + 1  # only H2's reduced reading was new

    def test_non_shared_support_edge_rejected(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="a")
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="b")
        edge = s.declare_conflict("a", "b")
        with pytest.raises(SpaceError, match="shared-support"):
            s.generate_alternatives(edge)

    def test_stale_edge_rejected(self):
        other = overlap_space(with_alternatives=False)
        edge = other.conflict_edge("H1", "H2")
        s = HypothesisSpace()
        with pytest.raises(SpaceError, match="not part of this space"):
            s.generate_alternatives(edge)

    def test_generate_all_is_idempotent(self):
        s = overlap_space(with_alternatives=False)
        assert s.generate_all_alternatives() == {"H3", "H4"}
        assert s.generate_all_alternatives() == set()
        assert len(s) == 7

    def test_alternatives_do_not_spawn_alternatives(self):
        # H1-H3 and H2-H4 are shared-support edges with an alternative
        # endpoint; closing over them must not add a fifth hypothesis.
        s = overlap_space()
        assert sorted(s.level_ids(1)) == ["H1", "H2", "H3", "H4"]

    def test_digitless_parent_gets_dashed_alternative_id(self):
        s = HypothesisSpace()
        for hid in ("x", "y", "z"):
            s.add_hypothesis(level=0, model_size=1, prior=0.3, hid=hid)
        s.add_hypothesis(level=1, model_size=2, support={"x", "y"}, hid="left")
        s.add_hypothesis(level=1, model_size=2, support={"y", "z"}, hid="right")
        created = s.generate_all_alternatives()
        assert created == {"left-1", "right-1"}


class TestPropagation:
    def test_conflict_free_space_adds_nothing(self):
        s = HypothesisSpace()
        for hid in ("a", "b"):
            s.add_hypothesis(level=0, model_size=1, prior=0.5, hid=hid)
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        s.add_hypothesis(level=1, model_size=1, support={"b"}, hid="B")
        assert s.propagate_conflicts_upward() == 0

    def test_top_level_conflicts_have_nowhere_to_go(self):
        s = overlap_space()
        assert s.propagate_conflicts_upward() == 0

    def test_declared_evidence_conflict_lifts_to_claimants(self):
        s = HypothesisSpace()
        for hid in ("a", "b"):
            s.add_hypothesis(level=0, model_size=1, prior=0.5, hid=hid)
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        s.add_hypothesis(level=1, model_size=1, support={"b"}, hid="B")
        s.declare_conflict("a", "b")
        assert s.propagate_conflicts_upward() == 1
        edge = s.conflict_edge("A", "B")
        assert edge is not None
        assert edge.reason == PROPAGATED
        assert edge.source == ("a", "b")

    def test_single_sweep_reaches_fixpoint_across_levels(self):
        s = HypothesisSpace()
        for hid in ("a", "b"):
            s.add_hypothesis(level=0, model_size=1, prior=0.5, hid=hid)
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        s.add_hypothesis(level=1, model_size=1, support={"b"}, hid="B")
        s.add_hypothesis(level=2, model_size=1, support={"A"}, hid="AA")
        s.add_hypothesis(level=2, model_size=1, support={"B"}, hid="BB")
        s.declare_conflict("a", "b")
        assert s.propagate_conflicts_upward() == 2
        assert s.conflict_edge("A", "B").reason == PROPAGATED
        assert s.conflict_edge("AA", "BB").reason == PROPAGATED

    def test_idempotent(self):
        s = overlap_space()
        s.propagate_conflicts_upward()
        before = [e.pair for e in s.conflicts()]
        assert s.propagate_conflicts_upward() == 0
        assert [e.pair for e in s.conflicts()] == before


class TestValidate:
    def test_closed_overlap_space_is_valid_with_fan_out_two(self):
        s = overlap_space()
        report = s.validate()
        assert report.ok
        assert report.violations == []
        assert report.fan_out == {0: 2}
        assert s.fan_out == {0: 2}

    def test_missing_alternatives_reported_as_rule2(self):
        s = overlap_space(with_alternatives=False)
        report = s.validate()
        assert not report.ok
        assert {v.rule for v in report.violations} == {"rule2", "fan-out"}
        assert s.fan_out is None

    def test_corrupted_space_reports_rule3_and_rule1(self):
        # The API refuses duplicate supports outright, so simulate a
        # corrupted store to prove validate still catches it.
        s = HypothesisSpace()
        for hid in ("a", "b"):
            s.add_hypothesis(level=0, model_size=1, prior=0.5, hid=hid)
        s.add_hypothesis(level=1, model_size=1, support={"a"}, hid="A")
        s.add_hypothesis(level=1, model_size=1, support={"b"}, hid="B")
        s.node("B").support = frozenset({"a"})
        report = validate_space(s)
        assert not report.ok
        rules = {v.rule for v in report.violations}
        assert "rule3" in rules
        assert "rule1" in rules

    def test_uneven_claim_counts_reported(self):
        s = HypothesisSpace()
        for hid in ("a", "b", "c"):
            s.add_hypothesis(level=0, model_size=1, prior=0.3, hid=hid)
        s.add_hypothesis(level=1, model_size=2, support={"a", "b"}, hid="A")
        # c is claimed by nobody: counts are 1,1,0.
        report = s.validate()
        assert not report.ok
        assert [v.rule for v in report.violations] == ["fan-out"]
        assert s.fan_out is None

    def test_mutation_clears_recorded_fan_out(self):
        s = overlap_space()
        assert s.validate().ok
        assert s.fan_out is not None
        s.add_hypothesis(level=0, model_size=1, prior=0.5, hid="fresh")
        assert s.fan_out is None

    def test_evidence_only_space_is_valid(self):
        s = HypothesisSpace()
        s.add_hypothesis(level=0, model_size=1, prior=1.0, hid="only")
        report = s.validate()
        assert report.ok
        assert report.fan_out == {}


class TestQueries:
    def test_unknown_node_errors(self):
        s = HypothesisSpace()
        with pytest.raises(SpaceError, match="unknown hypothesis"):
            s.node("ghost")

    def test_empty_space_has_no_top_level(self):
        with pytest.raises(SpaceError, match="empty"):
            HypothesisSpace().top_level()

    def test_claimants_sorted(self):
        s = overlap_space()
        assert s.claimants("h2") == ["H1", "H2"]
        assert s.claimants("h1") == ["H1", "H3"]

    def test_find_by_support(self):
        s = overlap_space()
        assert s.find_by_support(1, frozenset({"h1"})) == "H3"
        assert s.find_by_support(1, frozenset({"h1", "h3"})) is None

    def test_level_ids_sorted_and_levels_ordered(self):
        s = overlap_space()
        assert s.levels() == [0, 1]
        assert s.top_level() == 1
        assert s.level_ids(1) == ["H1", "H2", "H3", "H4"]
        assert s.level_ids(5) == []
