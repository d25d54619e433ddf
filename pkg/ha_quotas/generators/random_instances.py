"""Seeded random instances for fuzzing, and the small Condorcet instances."""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np

from ha_quotas.core.instance import Instance, ProjectRecord
from ha_quotas.solvers.weighted import WeightedInstance


def gen_random(
    seed: int,
    n: int,
    m: int,
    quota_max: int,
    list_len_range: tuple[int, Optional[int]] = (0, None),
) -> Instance:
    """Deterministic in ``seed``: quotas uniform with ℓ ≤ u ≤ quota_max, lists drawn without replacement.

    ``list_len_range`` is inclusive; an upper end of None means m.
    """
    lo, hi = list_len_range
    hi = m if hi is None else hi
    if n < 0 or m < 1 or quota_max < 1:
        raise ValueError(f"need n ≥ 0, m ≥ 1, quota_max ≥ 1 (got n={n}, m={m}, quota_max={quota_max})")
    if not 0 <= lo <= hi <= m:
        raise ValueError(f"list lengths [{lo}, {hi}] impossible with m = {m}")

    rng = np.random.default_rng(seed)
    projects = []
    for j in range(1, m + 1):
        lower = int(rng.integers(1, quota_max + 1))
        upper = int(rng.integers(lower, quota_max + 1))
        projects.append(ProjectRecord(f"p{j}", lower, upper))

    prefs = {}
    for i in range(1, n + 1):
        k = int(rng.integers(lo, hi + 1))
        picks = rng.choice(m, size=k, replace=False)
        prefs[f"a{i}"] = tuple(f"p{int(j) + 1}" for j in picks)
    return Instance(tuple(prefs), tuple(projects), prefs)


def gen_random_weights(inst: Instance, seed: int, max_weight: int) -> WeightedInstance:
    """Integer weights uniform in [0, max_weight] on every edge."""
    rng = np.random.default_rng(seed)
    values = rng.integers(0, max_weight + 1, size=len(inst.edges))
    return WeightedInstance(inst, {e: int(w) for e, w in zip(inst.edges, values)})


def gen_condorcet(variant: Literal["unit", "lq3"]) -> Instance:
    """Three applicants and three projects with no popular matching.

    ``unit``: quotas 1/1 and identical lists p1 ≻ p2 ≻ p3.
    ``lq3``: quotas 3/3 and cyclically shifted lists.
    """
    applicants = ("a1", "a2", "a3")
    if variant == "unit":
        projects = tuple(ProjectRecord(f"p{j}", 1, 1) for j in (1, 2, 3))
        prefs = {a: ("p1", "p2", "p3") for a in applicants}
    elif variant == "lq3":
        projects = tuple(ProjectRecord(f"p{j}", 3, 3) for j in (1, 2, 3))
        prefs = {
            "a1": ("p1", "p2", "p3"),
            "a2": ("p2", "p3", "p1"),
            "a3": ("p3", "p1", "p2"),
        }
    else:
        raise ValueError(f"Unknown Condorcet variant '{variant}'. Expected unit | lq3")
    return Instance(applicants, projects, prefs)
