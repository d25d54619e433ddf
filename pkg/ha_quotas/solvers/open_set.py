"""Flow-based solvers for a prescribed set of open projects, and the sweep over quota projects."""

from __future__ import annotations

import logging
import time
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Optional

from ha_quotas.config.schemas import DEFAULT_GUARDS, GuardsSchema
from ha_quotas.core.errors import GuardExceededError, InstanceError, MatchingError
from ha_quotas.core.instance import (
    UNMATCHED,
    Instance,
    Matching,
    assert_feasible,
    is_perfect,
    rank_of,
    validate_instance,
)
from ha_quotas.solvers.flow import FlowNetwork, feasible_flow, max_cost_circulation
from ha_quotas.solvers.weighted import (
    WeightedInstance,
    check_reference,
    reduce_perpo,
    reduce_verify,
)

log = logging.getLogger(__name__)

SOURCE = ("s",)
SINK = ("t",)
BOTTOM = ("bottom",)

FptMode = Literal["popv", "pov", "perpo", "pareto"]


@dataclass(frozen=True)
class OpenSet:
    """Projects that must be open; every other project stays closed."""

    projects: frozenset[str]

    @classmethod
    def of(cls, projects: Iterable[str]) -> OpenSet:
        return cls(frozenset(projects))

    def validate(self, inst: Instance) -> None:
        unknown = self.projects - set(inst.project_ids)
        if unknown:
            raise InstanceError(f"Open set names unknown projects {sorted(unknown)}")

    def __contains__(self, pid: object) -> bool:
        return pid in self.projects

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.projects))

    def __len__(self) -> int:
        return len(self.projects)


def m_quota(inst: Instance) -> int:
    return len(inst.quota_projects)


def _as_open_set(P_open: OpenSet | Iterable[str]) -> OpenSet:
    return P_open if isinstance(P_open, OpenSet) else OpenSet.of(P_open)


# ── Domination with a fixed open set ───────────────────────────────────

def _domination_network(
    inst: Instance, M: Matching, P_open: OpenSet, designated: str
) -> Optional[tuple[FlowNetwork, dict[int, tuple[str, str]]]]:
    """Network whose feasible flows are matchings that open exactly P_open, make
    ``designated`` strictly better off and nobody worse off."""
    net = FlowNetwork(nodes=[SOURCE, SINK])
    assignment_arcs: dict[int, tuple[str, str]] = {}
    uses_bottom = False

    for x in inst.applicants:
        net.add_arc(SOURCE, ("a", x), demand=1, capacity=1)
        current = M.project_of(x)
        cutoff = rank_of(inst, x, current)
        targets = [p for p in inst.prefs[x] if p in P_open and rank_of(inst, x, p) < cutoff]
        if x == designated:
            if not targets:
                return None
        else:
            if current is not UNMATCHED and current in P_open:
                targets.append(current)
            if current is UNMATCHED:
                net.add_arc(("a", x), BOTTOM, capacity=1)
                uses_bottom = True
        for p in targets:
            assignment_arcs[net.add_arc(("a", x), ("p", p), capacity=1)] = (x, p)

    for pid in P_open:
        p = inst.project(pid)
        net.add_arc(("p", pid), SINK, demand=p.lower, capacity=p.upper)
    if uses_bottom:
        net.add_arc(BOTTOM, SINK)
    return net, assignment_arcs


def dominating_with_open_set(
    inst: Instance, M: Matching, P_open: OpenSet | Iterable[str]
) -> Optional[Matching]:
    """A matching that dominates M and opens exactly P_open, or None.

    Applicants are tried in instance order as the one who strictly improves; the
    first feasible flow wins.
    """
    validate_instance(inst)
    assert_feasible(inst, M)
    P_open = _as_open_set(P_open)
    P_open.validate(inst)

    for designated in inst.applicants:
        built = _domination_network(inst, M, P_open, designated)
        if built is None:
            continue
        net, assignment_arcs = built
        flow = feasible_flow(net, SOURCE, SINK)
        if flow is None:
            continue
        log.debug("dominating_with_open_set: %s improves", designated)
        return Matching.from_pairs(pair for i, pair in assignment_arcs.items() if flow[i])
    return None


# ── Max weight with a fixed open set ───────────────────────────────────

def _weight_network(
    winst: WeightedInstance, forced: Iterable[str], optional: Iterable[str]
) -> tuple[FlowNetwork, dict[int, tuple[str, str]]]:
    """Circulation through s: forced projects need ℓ_p units, optional ones none."""
    inst = winst.base
    forced, optional = set(forced), set(optional)
    net = FlowNetwork(nodes=[SOURCE, BOTTOM])
    assignment_arcs: dict[int, tuple[str, str]] = {}

    for x in inst.applicants:
        net.add_arc(SOURCE, ("a", x), demand=1, capacity=1)
        for p in inst.prefs[x]:
            if p in forced or p in optional:
                arc = net.add_arc(("a", x), ("p", p), capacity=1, cost=winst.weight(x, p))
                assignment_arcs[arc] = (x, p)
        net.add_arc(("a", x), BOTTOM, capacity=1)

    for p in inst.projects:
        if p.id in forced:
            net.add_arc(("p", p.id), SOURCE, demand=p.lower, capacity=p.upper)
        elif p.id in optional:
            net.add_arc(("p", p.id), SOURCE, capacity=p.upper)
    net.add_arc(BOTTOM, SOURCE, capacity=inst.n)
    return net, assignment_arcs


def _solve_weight_network(
    winst: WeightedInstance, forced: Iterable[str], optional: Iterable[str]
) -> Optional[tuple[int, Matching]]:
    net, assignment_arcs = _weight_network(winst, forced, optional)
    result = max_cost_circulation(net)
    if result is None:
        return None
    flow, cost = result
    return cost, Matching.from_pairs(pair for i, pair in assignment_arcs.items() if flow[i])


def max_weight_with_open_set(
    winst: WeightedInstance, P_open: OpenSet | Iterable[str]
) -> Optional[tuple[int, Matching]]:
    """Heaviest matching opening exactly P_open, or None if no matching does."""
    P_open = _as_open_set(P_open)
    P_open.validate(winst.base)
    return _solve_weight_network(winst, P_open.projects, ())


# ── FPT sweep ──────────────────────────────────────────────────────────

def subproblems(
    winst: WeightedInstance, guards: Optional[GuardsSchema] = None
) -> Iterator[frozenset[str]]:
    """Forced-open subsets Q of the quota projects, bit i standing for the i-th in instance order."""
    guards = guards or DEFAULT_GUARDS
    quota = winst.base.quota_projects
    if len(quota) > guards.mquota_max:
        raise GuardExceededError(
            f"m_quota = {len(quota)} exceeds subset guard {guards.mquota_max}"
        )
    for mask in range(2 ** len(quota)):
        yield frozenset(p for i, p in enumerate(quota) if mask >> i & 1)


@dataclass(frozen=True)
class FptRun:
    weight: int
    matching: Matching
    subproblems: int
    seconds: float


def run_fpt(winst: WeightedInstance, guards: Optional[GuardsSchema] = None) -> FptRun:
    """Maximum-weight matching by one circulation per subset of quota projects.

    Projects with lower quota at most 1 are optional in every subproblem; quota
    projects outside the forced subset are removed. Ties keep the first subset.
    The run records how many subproblems were solved and the wall time.
    """
    started = time.perf_counter()
    free = [p.id for p in winst.base.projects if p.lower <= 1]
    best: Optional[tuple[int, Matching]] = None
    count = 0
    for forced in subproblems(winst, guards):
        count += 1
        result = _solve_weight_network(winst, forced, free)
        if result is not None and (best is None or result[0] > best[0]):
            best = result
    seconds = time.perf_counter() - started
    log.info(
        "max_weight_fpt: %d subproblems in %.3fs, optimum %s", count, seconds, best and best[0]
    )
    assert best is not None  # Q = ∅ admits the empty matching
    return FptRun(best[0], best[1], count, seconds)


def max_weight_fpt(
    winst: WeightedInstance, guards: Optional[GuardsSchema] = None
) -> tuple[int, Matching]:
    run = run_fpt(winst, guards)
    return run.weight, run.matching


def solve_fpt(
    inst: Instance,
    mode: FptMode,
    M: Optional[Matching] = None,
    guards: Optional[GuardsSchema] = None,
) -> Optional[Matching]:
    """Same answers as ``solve_lq2`` for any lower quotas, exponential only in m_quota."""
    validate_instance(inst)
    if mode in ("popv", "pov"):
        if M is None:
            raise MatchingError(f"mode {mode} needs the matching to verify")
        reduction = reduce_verify(inst, M, mode)
        check_reference(reduction)
        weight, heavier = max_weight_fpt(reduction.winst, guards)
        return heavier if weight > reduction.threshold else None

    if mode in ("perpo", "pareto"):
        _, best = max_weight_fpt(reduce_perpo(inst), guards)
        if mode == "perpo" and not is_perfect(inst, best):
            return None
        return best

    raise ValueError(f"Unknown mode '{mode}'. Expected popv | pov | perpo | pareto")


# ── Sweep over every open set ──────────────────────────────────────────

def _open_sets(inst: Instance, guards: GuardsSchema) -> Iterator[OpenSet]:
    if inst.m > guards.mquota_max:
        raise GuardExceededError(f"m = {inst.m} exceeds subset guard {guards.mquota_max}")
    for size in range(inst.m + 1):
        for subset in combinations(inst.project_ids, size):
            yield OpenSet.of(subset)


def solve_flow(
    inst: Instance,
    mode: Literal["popv", "pov"],
    M: Matching,
    open_set: OpenSet | Iterable[str] | None = None,
    guards: Optional[GuardsSchema] = None,
) -> Optional[Matching]:
    """Witness against M among matchings opening ``open_set`` (every subset when None)."""
    validate_instance(inst)
    guards = guards or DEFAULT_GUARDS
    candidates = [_as_open_set(open_set)] if open_set is not None else _open_sets(inst, guards)

    if mode == "pov":
        for P_open in candidates:
            found = dominating_with_open_set(inst, M, P_open)
            if found is not None:
                return found
        return None

    if mode == "popv":
        reduction = reduce_verify(inst, M, "popv")
        for P_open in candidates:
            result = max_weight_with_open_set(reduction.winst, P_open)
            if result is not None and result[0] > reduction.threshold:
                return result[1]
        return None

    raise ValueError(f"Unknown mode '{mode}'. Expected popv | pov")
