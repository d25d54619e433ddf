"""Brute-force reference answers for every polynomial solver (desk scale only)."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator
from itertools import product
from typing import Literal, Optional

from ha_quotas.config.schemas import DEFAULT_GUARDS, GuardsSchema
from ha_quotas.core.errors import GuardExceededError
from ha_quotas.core.instance import (
    UNMATCHED,
    Instance,
    Matching,
    assert_feasible,
    rank_of,
)
from ha_quotas.solvers.general_matching import GeneralGraph, UEdge, matching_weight
from ha_quotas.solvers.weighted import WeightedInstance

log = logging.getLogger(__name__)

VerifyMode = Literal["popular", "pareto"]
ExistsMode = Literal["popular", "perfect_pareto"]


def _check_guard(inst: Instance, guards: Optional[GuardsSchema], force: bool) -> None:
    guards = guards or DEFAULT_GUARDS
    too_big = inst.n > guards.oracle_max_applicants or inst.m > guards.oracle_max_projects
    if not too_big:
        return
    message = (
        f"oracle guard: n = {inst.n}, m = {inst.m} exceeds "
        f"n ≤ {guards.oracle_max_applicants}, m ≤ {guards.oracle_max_projects}"
    )
    if not force:
        raise GuardExceededError(message + " (pass force=True to override)")
    log.warning("%s; continuing because force=True", message)


def _rank_vector(inst: Instance, M: Matching) -> tuple[int, ...]:
    return tuple(rank_of(inst, a, M.project_of(a)) for a in inst.applicants)


def _margin(r2: tuple[int, ...], r1: tuple[int, ...]) -> int:
    return sum((x < y) - (y < x) for x, y in zip(r2, r1))


def _dominates(r2: tuple[int, ...], r1: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(r2, r1)) and r2 != r1


# ── Enumeration ────────────────────────────────────────────────────────

def enumerate_feasible_matchings(
    inst: Instance,
    guards: Optional[GuardsSchema] = None,
    force: bool = False,
    open_set: Optional[frozenset[str]] = None,
) -> Iterator[Matching]:
    """Every feasible matching exactly once, the empty matching first.

    Applicants are expanded in instance order over (unmatched, N_a in preference
    order); quota feasibility is checked at the leaves only. With ``open_set``
    only matchings opening exactly those projects are emitted.
    """
    _check_guard(inst, guards, force)
    options = [(UNMATCHED, *inst.prefs[a]) for a in inst.applicants]
    for choice in product(*options):
        degrees = Counter(p for p in choice if p is not UNMATCHED)
        if not all(p.admits(degrees.get(p.id, 0)) for p in inst.projects):
            continue
        if open_set is not None and set(degrees) != set(open_set):
            continue
        yield Matching(dict(zip(inst.applicants, choice)))


# ── Verification / existence ───────────────────────────────────────────

def oracle_verify(
    inst: Instance,
    M: Matching,
    mode: VerifyMode,
    guards: Optional[GuardsSchema] = None,
    force: bool = False,
    open_set: Optional[frozenset[str]] = None,
) -> Optional[Matching]:
    """First matching more popular than (popular) or dominating (pareto) M, else None."""
    if mode not in ("popular", "pareto"):
        raise ValueError(f"Unknown mode '{mode}'. Expected popular | pareto")
    assert_feasible(inst, M)
    ref = _rank_vector(inst, M)
    for candidate in enumerate_feasible_matchings(inst, guards, force, open_set):
        ranks = _rank_vector(inst, candidate)
        if mode == "popular" and _margin(ranks, ref) >= 1:
            return candidate
        if mode == "pareto" and _dominates(ranks, ref):
            return candidate
    return None


def oracle_exists(
    inst: Instance,
    mode: ExistsMode,
    guards: Optional[GuardsSchema] = None,
    force: bool = False,
) -> Optional[Matching]:
    """A popular / perfect Pareto optimal matching, or None when none exists."""
    if mode not in ("popular", "perfect_pareto"):
        raise ValueError(f"Unknown mode '{mode}'. Expected popular | perfect_pareto")
    everything = [(M, _rank_vector(inst, M)) for M in enumerate_feasible_matchings(inst, guards, force)]
    log.debug("oracle_exists(%s): %d feasible matchings", mode, len(everything))

    if mode == "popular":
        for M, ranks in everything:
            if all(_margin(other, ranks) < 1 for _, other in everything):
                return M
        return None

    perfect = len(inst.applicants)
    for M, ranks in everything:
        if len(M) != perfect:
            continue
        if not any(_dominates(other, ranks) for _, other in everything):
            return M
    return None


def oracle_max_weight(
    winst: WeightedInstance,
    guards: Optional[GuardsSchema] = None,
    force: bool = False,
    open_set: Optional[frozenset[str]] = None,
) -> Optional[tuple[int, Matching]]:
    """Heaviest feasible matching (first maximizer in enumeration order).

    Without ``open_set`` the empty matching is always admissible, so the result
    is never None.
    """
    best: Optional[tuple[int, Matching]] = None
    for M in enumerate_feasible_matchings(winst.base, guards, force, open_set):
        weight = winst.weight_of(M)
        if best is None or weight > best[0]:
            best = (weight, M)
    return best


# ── General graphs ─────────────────────────────────────────────────────

def enumerate_perfect_matchings(g: GeneralGraph) -> Iterator[frozenset[UEdge]]:
    """All perfect matchings of a (small) general graph."""
    adjacency: dict = {v: [] for v in g.vertices}
    for e in g.edges:
        u, v = tuple(e)
        adjacency[u].append(v)
        adjacency[v].append(u)

    def extend(free: list, chosen: list[UEdge]) -> Iterator[frozenset[UEdge]]:
        if not free:
            yield frozenset(chosen)
            return
        v, rest = free[0], free[1:]
        for u in adjacency[v]:
            if u in rest:
                yield from extend([x for x in rest if x != u], chosen + [frozenset((u, v))])

    yield from extend(list(g.vertices), [])


def oracle_max_weight_perfect_matching(
    g: GeneralGraph,
) -> Optional[tuple[int, frozenset[UEdge]]]:
    best: Optional[tuple[int, frozenset[UEdge]]] = None
    for chosen in enumerate_perfect_matchings(g):
        weight = matching_weight(g, chosen)
        if best is None or weight > best[0]:
            best = (weight, chosen)
    return best
