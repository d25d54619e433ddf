"""Tests for the roommates-to-house-allocation transformation."""

import pytest

from ha_quotas.core.errors import InstanceError, MatchingError
from ha_quotas.core.instance import Matching, popularity_margin
from ha_quotas.generators.roommates import (
    RoommatesInstance,
    edge_project,
    gen_pop_from_roommates,
    roommates_margin,
    to_house_matching,
    to_roommates_matching,
)
from ha_quotas.solvers.oracle import enumerate_feasible_matchings, oracle_exists


@pytest.fixture
def triangle():
    """Cyclic preferences on a triangle: no popular matching."""
    return RoommatesInstance(
        ("v1", "v2", "v3"),
        {"v1": ("v2", "v3"), "v2": ("v3", "v1"), "v3": ("v1", "v2")},
    )


@pytest.fixture
def path():
    return RoommatesInstance(
        ("v1", "v2", "v3", "v4"),
        {"v1": ("v2",), "v2": ("v3", "v1"), "v3": ("v2", "v4"), "v4": ("v3",)},
    )


class TestRoommatesInstance:
    def test_asymmetric_list(self):
        with pytest.raises(InstanceError):
            RoommatesInstance(("u", "v"), {"u": ("v",)}).validate()

    def test_self_loop(self):
        with pytest.raises(InstanceError):
            RoommatesInstance(("u",), {"u": ("u",)}).validate()

    def test_enumerates_matchings(self, triangle, path):
        assert len(list(triangle.enumerate_matchings())) == 4
        assert len(list(path.enumerate_matchings())) == 5
        assert next(iter(triangle.enumerate_matchings())) == frozenset()

    def test_margin(self, triangle):
        m12 = frozenset({frozenset({"v1", "v2"})})
        m23 = frozenset({frozenset({"v2", "v3"})})
        # v2 and v3 prefer m23, v1 prefers m12
        assert roommates_margin(triangle, m23, m12) == 1


class TestTransformation:
    def test_projects_are_pair_quota(self, triangle):
        inst = gen_pop_from_roommates(triangle)
        assert inst.m == 3
        assert all((p.lower, p.upper) == (2, 2) for p in inst.projects)
        assert inst.prefs["v2"] == ("e_v2_v3", "e_v1_v2")
        assert edge_project(triangle, "v3", "v1") == "e_v1_v3"

    def test_no_popular_matching_on_triangle(self, triangle):
        assert oracle_exists(gen_pop_from_roommates(triangle), "popular") is None

    def test_single_edge(self):
        r = RoommatesInstance(("u", "v"), {"u": ("v",), "v": ("u",)})
        M = oracle_exists(gen_pop_from_roommates(r), "popular")
        assert M == Matching({"u": "e_u_v", "v": "e_u_v"})

    def test_bijection_and_margins(self, path):
        inst = gen_pop_from_roommates(path)
        house = list(enumerate_feasible_matchings(inst))
        rooms = list(path.enumerate_matchings())
        assert len(house) == len(rooms)
        assert {to_roommates_matching(path, M) for M in house} == set(rooms)
        for R2 in rooms:
            for R1 in rooms:
                M2, M1 = to_house_matching(path, R2), to_house_matching(path, R1)
                assert popularity_margin(inst, M2, M1) == roommates_margin(path, R2, R1)

    def test_half_filled_edge_project(self, path):
        with pytest.raises(MatchingError):
            to_roommates_matching(path, Matching({"v2": "e_v2_v3", "v4": "e_v3_v4"}))
