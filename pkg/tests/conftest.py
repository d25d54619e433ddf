"""Shared instances: the two Condorcet observations and the open-set example instance."""

import pytest

from ha_quotas.core.instance import Instance, Matching, ProjectRecord
from ha_quotas.generators.random_instances import gen_condorcet


@pytest.fixture
def obs1() -> Instance:
    """Three applicants with identical lists over three unit-quota projects."""
    return gen_condorcet("unit")


@pytest.fixture
def obs2() -> Instance:
    """Three applicants, three quota-3/3 projects, cyclically shifted lists."""
    return gen_condorcet("lq3")


@pytest.fixture
def diag() -> Matching:
    return Matching({"a1": "p1", "a2": "p2", "a3": "p3"})


@pytest.fixture
def example() -> Instance:
    return Instance(
        ("a1", "a2", "a3", "a4"),
        (
            ProjectRecord("p1", 1, 1),
            ProjectRecord("p2", 3, 3),
            ProjectRecord("p3", 2, 4),
            ProjectRecord("p4", 2, 2),
        ),
        {
            "a1": ("p2", "p1", "p3"),
            "a2": ("p2", "p4"),
            "a3": ("p3", "p2", "p4"),
            "a4": ("p3",),
        },
    )


@pytest.fixture
def example_matching() -> Matching:
    return Matching({"a1": "p1", "a2": "p4", "a3": "p4"})


@pytest.fixture
def make_instance():
    """Build a small instance from {applicant: list} and {project: (lower, upper)}."""

    def build(lists, projects) -> Instance:
        return Instance(
            tuple(lists),
            tuple(ProjectRecord(p, lo, up) for p, (lo, up) in projects.items()),
            lists,
        )

    return build
