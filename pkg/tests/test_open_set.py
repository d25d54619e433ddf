"""Tests for open-set flows and the sweep over quota projects."""

from itertools import combinations

import pytest

from ha_quotas.config.schemas import GuardsSchema
from ha_quotas.core.errors import GuardExceededError, InstanceError, MatchingError
from ha_quotas.core.instance import (
    Instance,
    Matching,
    ProjectRecord,
    dominates,
    is_perfect,
    open_projects,
    popularity_margin,
)
from ha_quotas.generators.random_instances import gen_random, gen_random_weights
from ha_quotas.solvers.oracle import (
    enumerate_feasible_matchings,
    oracle_exists,
    oracle_max_weight,
    oracle_verify,
)
from ha_quotas.solvers.open_set import (
    OpenSet,
    dominating_with_open_set,
    m_quota,
    max_weight_fpt,
    max_weight_with_open_set,
    run_fpt,
    solve_flow,
    solve_fpt,
    subproblems,
)
from ha_quotas.solvers.weighted import WeightedInstance, unit_weights


class TestOpenSet:
    def test_iterates_sorted(self):
        assert list(OpenSet.of(["p3", "p1"])) == ["p1", "p3"]
        assert "p1" in OpenSet.of(["p1"])

    def test_unknown_project(self, example):
        with pytest.raises(InstanceError):
            OpenSet.of(["p9"]).validate(example)


class TestDominatingWithOpenSet:
    def test_example_without_p1(self, example, example_matching):
        found = dominating_with_open_set(example, example_matching, {"p2"})
        assert found == Matching({"a1": "p2", "a2": "p2", "a3": "p2"})
        assert dominates(example, found, example_matching)

    def test_example_keeping_p1_open(self, example, example_matching):
        # p1 only fits a1, and p2 cannot reach three assignees without a1
        assert dominating_with_open_set(example, example_matching, {"p1", "p2", "p3"}) is None

    def test_infeasible_reference(self, obs2):
        with pytest.raises(MatchingError):
            dominating_with_open_set(obs2, Matching({"a1": "p1"}), {"p1"})

    def test_agrees_with_restricted_oracle(self):
        for seed in range(25):
            inst = gen_random(seed, 3, 3, 2)
            feasible = list(enumerate_feasible_matchings(inst))
            M = feasible[seed % len(feasible)]
            for size in range(inst.m + 1):
                for subset in combinations(inst.project_ids, size):
                    P_open = frozenset(subset)
                    found = dominating_with_open_set(inst, M, P_open)
                    expected = oracle_verify(inst, M, "pareto", open_set=P_open)
                    assert (found is None) == (expected is None)
                    if found is not None:
                        assert open_projects(inst, found) == P_open
                        assert dominates(inst, found, M)


class TestMaxWeightWithOpenSet:
    def test_example_counts(self, example):
        winst = unit_weights(example)
        assert max_weight_with_open_set(winst, {"p2"}) == (
            3,
            Matching({"a1": "p2", "a2": "p2", "a3": "p2"}),
        )
        assert max_weight_with_open_set(winst, {"p3"})[0] == 3
        assert max_weight_with_open_set(winst, {"p3", "p4"}) == (
            4,
            Matching({"a1": "p3", "a2": "p4", "a3": "p4", "a4": "p3"}),
        )

    def test_no_matching_opens_the_set(self, example):
        # p2 needs a1, a2 and a3, leaving a4 alone under p3's lower quota
        assert max_weight_with_open_set(WeightedInstance(example), {"p2", "p3"}) is None
        assert max_weight_with_open_set(WeightedInstance(example), {"p2", "p4"}) is None

    def test_empty_set(self, example):
        assert max_weight_with_open_set(unit_weights(example), ()) == (0, Matching.empty())

    def test_agrees_with_oracle(self):
        for seed in range(20):
            winst = gen_random_weights(gen_random(seed, 3, 3, 3), seed, 3)
            for size in range(winst.base.m + 1):
                for subset in combinations(winst.base.project_ids, size):
                    got = max_weight_with_open_set(winst, subset)
                    expected = oracle_max_weight(winst, open_set=frozenset(subset))
                    assert (got is None) == (expected is None)
                    if got is not None:
                        assert got[0] == expected[0] == winst.weight_of(got[1])
                        assert open_projects(winst.base, got[1]) == frozenset(subset)


class TestFpt:
    def test_subproblem_count(self, example):
        assert m_quota(example) == 3
        found = list(subproblems(unit_weights(example)))
        assert len(found) == 8
        assert found[0] == frozenset()
        assert found[1] == frozenset({example.quota_projects[0]})

    def test_subset_guard(self, example):
        with pytest.raises(GuardExceededError):
            next(subproblems(unit_weights(example), GuardsSchema(mquota_max=2)))

    def test_run_counts_subproblems(self, example):
        run = run_fpt(unit_weights(example))
        assert run.subproblems == 8
        assert run.seconds >= 0
        assert (run.weight, run.matching) == max_weight_fpt(unit_weights(example))

    def test_one_more_quota_project_doubles_the_work(self, example):
        prefs = {**example.prefs, "a3": ("p3", "p2", "p4", "p5"), "a4": ("p3", "p5")}
        grown = Instance(example.applicants, example.projects + (ProjectRecord("p5", 2, 2),), prefs)
        before = run_fpt(unit_weights(example)).subproblems
        assert m_quota(grown) == m_quota(example) + 1
        assert run_fpt(unit_weights(grown)).subproblems == 2 * before

    def test_max_weight_agrees_with_oracle(self):
        for seed in range(40):
            winst = gen_random_weights(gen_random(seed, 4, 3, 3), seed, 4)
            weight, best = max_weight_fpt(winst)
            assert weight == winst.weight_of(best) == oracle_max_weight(winst)[0]

    def test_condorcet_unit_has_no_quota_projects(self, obs1, diag):
        assert m_quota(obs1) == 0
        witness = solve_fpt(obs1, "popv", diag)
        assert witness is not None
        assert popularity_margin(obs1, witness, diag) >= 1

    def test_lq3_instance(self, obs2):
        perpo = solve_fpt(obs2, "perpo")
        assert perpo is not None
        assert is_perfect(obs2, perpo)
        assert oracle_verify(obs2, perpo, "pareto") is None

    def test_missing_matching(self, obs1):
        with pytest.raises(MatchingError):
            solve_fpt(obs1, "popv")

    def test_solve_agrees_with_oracle(self):
        for seed in range(30):
            inst = gen_random(seed, 4, 3, 3)
            feasible = list(enumerate_feasible_matchings(inst))
            M = feasible[seed % len(feasible)]

            popv = solve_fpt(inst, "popv", M)
            assert (popv is not None) == (oracle_verify(inst, M, "popular") is not None)
            if popv is not None:
                assert popularity_margin(inst, popv, M) >= 1

            pov = solve_fpt(inst, "pov", M)
            assert (pov is not None) == (oracle_verify(inst, M, "pareto") is not None)
            if pov is not None:
                assert dominates(inst, pov, M)

            perpo = solve_fpt(inst, "perpo")
            assert (perpo is not None) == (oracle_exists(inst, "perfect_pareto") is not None)


class TestSolveFlow:
    def test_example_pareto(self, example, example_matching):
        found = solve_flow(example, "pov", example_matching)
        assert found is not None
        assert dominates(example, found, example_matching)
        assert solve_flow(example, "pov", example_matching, open_set={"p1", "p2", "p3"}) is None

    def test_condorcet_popularity(self, obs1, diag):
        witness = solve_flow(obs1, "popv", diag)
        assert popularity_margin(obs1, witness, diag) >= 1

    def test_unknown_mode(self, obs1, diag):
        with pytest.raises(ValueError):
            solve_flow(obs1, "perpo", diag)

    def test_agrees_with_oracle(self):
        for seed in range(20):
            inst = gen_random(seed, 3, 3, 3)
            for M in enumerate_feasible_matchings(inst):
                for mode, oracle_mode in (("popv", "popular"), ("pov", "pareto")):
                    found = solve_flow(inst, mode, M)
                    assert (found is None) == (oracle_verify(inst, M, oracle_mode) is None)
