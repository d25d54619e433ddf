"""Tests for the brute-force oracle."""

from itertools import permutations

import pytest

from ha_quotas.config.schemas import GuardsSchema
from ha_quotas.core.errors import GuardExceededError, MatchingError
from ha_quotas.core.instance import (
    Instance,
    Matching,
    dominates,
    is_feasible,
    popularity_margin,
)
from ha_quotas.generators.random_instances import gen_random, gen_random_weights
from ha_quotas.solvers.general_matching import GeneralGraph
from ha_quotas.solvers.oracle import (
    enumerate_feasible_matchings,
    enumerate_perfect_matchings,
    oracle_exists,
    oracle_max_weight,
    oracle_max_weight_perfect_matching,
    oracle_verify,
)
from ha_quotas.solvers.weighted import WeightedInstance, reduce_verify


def _count_injective(n_applicants: int, n_projects: int) -> int:
    """Independent count of partial injections, for unit-quota instances with full lists."""
    total = 0
    for k in range(min(n_applicants, n_projects) + 1):
        choose = len(list(permutations(range(n_applicants), k))) // len(list(permutations(range(k))))
        total += choose * len(list(permutations(range(n_projects), k)))
    return total


class TestEnumerateFeasibleMatchings:
    def test_cyclic_instance_has_four(self, obs2):
        found = list(enumerate_feasible_matchings(obs2))
        assert len(found) == 4
        assert found[0] == Matching.empty()

    def test_unit_instance_count(self, obs1):
        assert len(list(enumerate_feasible_matchings(obs1))) == 34 == _count_injective(3, 3)

    def test_no_applicants(self):
        assert list(enumerate_feasible_matchings(Instance((), ()))) == [Matching.empty()]

    def test_all_feasible_and_distinct(self):
        for seed in range(30):
            inst = gen_random(seed, 4, 3, 3)
            found = list(enumerate_feasible_matchings(inst))
            assert len(set(found)) == len(found)
            assert all(is_feasible(inst, M) for M in found)

    def test_guard(self):
        inst = gen_random(0, 9, 2, 2)
        with pytest.raises(GuardExceededError):
            next(enumerate_feasible_matchings(inst))
        next(enumerate_feasible_matchings(inst, force=True))
        next(enumerate_feasible_matchings(inst, GuardsSchema(oracle_max_applicants=9)))

    def test_open_set_restriction(self, example):
        only = list(enumerate_feasible_matchings(example, open_set=frozenset({"p3"})))
        assert only
        assert all(set(M.degrees()) == {"p3"} for M in only)


class TestOracleVerify:
    def test_diagonal_is_unpopular(self, obs1, diag):
        witness = oracle_verify(obs1, diag, "popular")
        assert witness is not None
        assert popularity_margin(obs1, witness, diag) >= 1

    def test_top_choice_single_applicant(self, make_instance):
        inst = make_instance({"a1": ("p1", "p2")}, {"p1": (1, 1), "p2": (1, 1)})
        M = Matching({"a1": "p1"})
        assert oracle_verify(inst, M, "popular") is None
        assert oracle_verify(inst, M, "pareto") is None

    def test_example_pareto_witness(self, example, example_matching):
        witness = oracle_verify(example, example_matching, "pareto")
        assert witness is not None
        assert dominates(example, witness, example_matching)

    def test_example_restricted_to_open_set(self, example, example_matching):
        # p2 needs three assignees but only a2 and a3 may move there while a1 keeps p1
        restricted = oracle_verify(
            example, example_matching, "pareto", open_set=frozenset({"p1", "p2", "p3"})
        )
        assert restricted is None

    def test_infeasible_reference(self, obs2):
        with pytest.raises(MatchingError):
            oracle_verify(obs2, Matching({"a1": "p1"}), "popular")

    def test_unknown_mode(self, obs1, diag):
        with pytest.raises(ValueError):
            oracle_verify(obs1, diag, "stable")


class TestOracleExists:
    def test_condorcet_instances_have_no_popular_matching(self, obs1, obs2):
        assert oracle_exists(obs1, "popular") is None
        assert oracle_exists(obs2, "popular") is None

    def test_removing_an_applicant_restores_popularity(self, obs1):
        smaller = obs1.without_applicant("a3")
        M = oracle_exists(smaller, "popular")
        assert M is not None
        assert set(M.assignment.values()) == {"p1", "p2"}
        assert oracle_verify(smaller, M, "popular") is None

    def test_perfect_pareto(self, obs1, obs2):
        M = oracle_exists(obs1, "perfect_pareto")
        assert M is not None and len(M) == 3
        assert oracle_verify(obs1, M, "pareto") is None
        assert oracle_exists(obs2, "perfect_pareto") is not None

    def test_no_perfect_matching(self, make_instance):
        inst = make_instance({"a1": ("p1",), "a2": ("p1",)}, {"p1": (1, 1)})
        assert oracle_exists(inst, "perfect_pareto") is None


class TestOracleMaxWeight:
    def test_zero_weights(self, obs1):
        assert oracle_max_weight(WeightedInstance(obs1)) == (0, Matching.empty())

    def test_popularity_reduction_of_diagonal(self, obs1, diag):
        reduction = reduce_verify(obs1, diag, "popv")
        weight, best = oracle_max_weight(reduction.winst)
        assert weight == 4
        assert reduction.threshold == 3
        assert reduction.winst.weight_of(Matching({"a1": "p3", "a2": "p1", "a3": "p2"})) == 4
        assert reduction.winst.weight_of(best) == 4

    def test_single_edge(self, make_instance):
        inst = make_instance({"a1": ("p1",)}, {"p1": (1, 1)})
        assert oracle_max_weight(WeightedInstance(inst, {("a1", "p1"): 7})) == (
            7,
            Matching({"a1": "p1"}),
        )

    def test_matches_enumeration(self):
        for seed in range(20):
            winst = gen_random_weights(gen_random(seed, 3, 3, 2), seed, 4)
            expected = max(winst.weight_of(M) for M in enumerate_feasible_matchings(winst.base))
            assert oracle_max_weight(winst)[0] == expected

    def test_empty_open_set_restriction(self, example):
        winst = WeightedInstance(example)
        assert oracle_max_weight(winst, open_set=frozenset()) == (0, Matching.empty())
        assert oracle_max_weight(winst, open_set=frozenset({"p2", "p4"})) is None


class TestPerfectMatchings:
    def test_square(self):
        g = GeneralGraph.from_edges([(1, 2, 1), (2, 3, 5), (3, 4, 1), (4, 1, 5)])
        assert len(list(enumerate_perfect_matchings(g))) == 2
        assert oracle_max_weight_perfect_matching(g)[0] == 10

    def test_odd_graph(self):
        g = GeneralGraph.from_edges([(1, 2, 1), (2, 3, 1)])
        assert list(enumerate_perfect_matchings(g)) == []
        assert oracle_max_weight_perfect_matching(g) is None
