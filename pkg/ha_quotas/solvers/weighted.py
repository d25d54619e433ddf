"""Weighted instances, the Pareto/popularity weight reductions and the kernelization."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from types import MappingProxyType
from typing import Literal, Optional

from ha_quotas.config.schemas import DEFAULT_GUARDS, GuardsSchema
from ha_quotas.core.errors import GuardExceededError, InstanceError, MatchingError
from ha_quotas.core.instance import (
    UNMATCHED,
    Instance,
    Matching,
    assert_feasible,
    rank_of,
    unmatched_set,
    validate_instance,
)

log = logging.getLogger(__name__)

Edge = tuple[str, str]


@dataclass(frozen=True)
class WeightedInstance:
    """The bipartite graph and quotas of ``base`` with nonnegative integer edge weights.

    Edges without an explicit weight weigh 0. ``last_resorts`` maps applicants to
    their private last-resort project when those have been added.
    """

    base: Instance
    weights: Mapping[Edge, int] = field(default_factory=dict)
    last_resorts: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))
        object.__setattr__(self, "last_resorts", MappingProxyType(dict(self.last_resorts)))

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def build(cls, base: Instance, weights: Mapping[Edge, int]) -> WeightedInstance:
        winst = cls(base, weights)
        winst.validate()
        return winst

    def validate(self) -> None:
        validate_instance(self.base)
        for (a, p), w in self.weights.items():
            if not self.base.acceptable(a, p):
                raise InstanceError(f"Weighted edge ({a}, {p}) is not an edge of the instance")
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                raise InstanceError(f"Weight of ({a}, {p}) must be a nonnegative integer, got {w!r}")

    def weight(self, a: str, p: str) -> int:
        return self.weights.get((a, p), 0)

    @property
    def max_weight(self) -> int:
        return max(self.weights.values(), default=0)

    def weight_of(self, M: Matching) -> int:
        return sum(self.weight(a, p) for a, p in M.assignment.items())


def unit_weights(inst: Instance) -> WeightedInstance:
    """Every edge weighs 1, so maximum weight means maximum cardinality."""
    return WeightedInstance(inst, {e: 1 for e in inst.edges})


# ── Reductions ─────────────────────────────────────────────────────────

VerifyMode = Literal["popv", "pov"]


@dataclass(frozen=True)
class ThresholdedReduction:
    """A weighted instance in which beating ``threshold`` certifies a witness against ``reference``."""

    winst: WeightedInstance
    threshold: int
    source: VerifyMode
    reference: Matching

    def is_witness(self, M: Matching) -> bool:
        return self.winst.weight_of(M) > self.threshold


def reduce_perpo(inst: Instance) -> WeightedInstance:
    """Weights (k − i) + m·n on the i-th of k choices.

    Every maximum-weight matching is then a maximum-cardinality Pareto optimal one.
    """
    validate_instance(inst)
    offset = inst.m * inst.n
    weights: dict[Edge, int] = {}
    for a in inst.applicants:
        lst = inst.prefs[a]
        k = len(lst)
        for i, p in enumerate(lst, 1):
            weights[(a, p)] = (k - i) + offset
    return WeightedInstance(inst, weights)


def reduce_verify(inst: Instance, M: Matching, mode: VerifyMode) -> ThresholdedReduction:
    """Weights turning 'more popular than M' (popv) or 'dominates M' (pov) into 'heavier than M'.

    An applicant matched in M weighs each acceptable project by its vote against
    M(a): better / equal / worse give 2 / 1 / 0 (popv) or n+1 / n / 0 (pov).
    Edges of applicants unmatched in M weigh 1.
    """
    if mode not in ("popv", "pov"):
        raise ValueError(f"Unknown verification mode '{mode}'. Expected popv | pov")
    validate_instance(inst)
    assert_feasible(inst, M)
    n = inst.n
    better, equal = (2, 1) if mode == "popv" else (n + 1, n)

    weights: dict[Edge, int] = {}
    for a in inst.applicants:
        current = M.project_of(a)
        if current is UNMATCHED:
            for p in inst.prefs[a]:
                weights[(a, p)] = 1
            continue
        r_cur = rank_of(inst, a, current)
        for p in inst.prefs[a]:
            r = rank_of(inst, a, p)
            weights[(a, p)] = better if r < r_cur else equal if r == r_cur else 0

    matched = n - len(unmatched_set(inst, M))
    threshold = matched if mode == "popv" else n * matched
    return ThresholdedReduction(WeightedInstance(inst, weights), threshold, mode, M)


# ── Kernelization ──────────────────────────────────────────────────────

def kernel_size_bound(n: int, max_weight: int) -> int:
    """Projects surviving ``kernelize``: n markers per (A′, w′), w′ ∈ [0, |A′|·W]."""
    return n * sum(comb(n, k) * (k * max_weight + 1) for k in range(1, n + 1))


def kernelize(winst: WeightedInstance, guards: Optional[GuardsSchema] = None) -> WeightedInstance:
    """Keep at most n projects per (applicant subset, achievable weight) class.

    Subsets are visited by increasing size; within a class the first n qualifying
    projects in instance order are marked. Unmarked projects are deleted, which
    leaves the maximum matching weight unchanged.
    """
    guards = guards or DEFAULT_GUARDS
    inst = winst.base
    n = inst.n
    if n > guards.kernel_max_applicants:
        raise GuardExceededError(
            f"kernelize: n = {n} exceeds kernel guard {guards.kernel_max_applicants}"
        )
    if inst.m <= winst.max_weight * 2**n:
        return winst

    adjacency = {p: set(inst.neighbors(p)) for p in inst.project_ids}
    markers: dict[tuple[tuple[str, ...], int], int] = {}
    marked: set[str] = set()
    for size in range(1, n + 1):
        for subset in combinations(inst.applicants, size):
            for p in inst.projects:
                if not p.lower <= size <= p.upper or not adjacency[p.id].issuperset(subset):
                    continue
                key = (subset, sum(winst.weight(a, p.id) for a in subset))
                if markers.get(key, 0) < n:
                    markers[key] = markers.get(key, 0) + 1
                    marked.add(p.id)

    kept = tuple(p for p in inst.projects if p.id in marked)
    log.info("kernelize: kept %d of %d projects", len(kept), inst.m)
    base = Instance(
        inst.applicants,
        kept,
        {a: tuple(p for p in inst.prefs[a] if p in marked) for a in inst.applicants},
    )
    weights = {(a, p): w for (a, p), w in winst.weights.items() if p in marked}
    resorts = {a: p for a, p in winst.last_resorts.items() if p in marked}
    return WeightedInstance(base, weights, resorts)


def check_reference(reduction: ThresholdedReduction) -> None:
    """The reference matching sits exactly on the threshold of its own reduction."""
    weight = reduction.winst.weight_of(reduction.reference)
    if weight != reduction.threshold:
        raise MatchingError(
            f"Reference matching weighs {weight}, expected threshold {reduction.threshold}"
        )
