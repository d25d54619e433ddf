"""Polynomial solvers for lower quotas at most 2.

A matching that is not maximum-weight can always be beaten by a heavier matching
of neighboring type: projects with lower quota 2 currently holding 0 or 2
applicants may toggle freely between 0 and 2, and besides that either a single
project moves by ±2 or two projects move by ±1. Each such type is compiled into
a general graph (copies and stubs per project) whose perfect matchings are
exactly the matchings of that type, and solved with the blossom engine.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from itertools import combinations
from typing import Literal, Optional

from ha_quotas.core.errors import InstanceError, MatchingError, QuotaShapeError
from ha_quotas.core.instance import (
    Instance,
    Matching,
    ProjectRecord,
    is_feasible,
    rank_sum,
    validate_instance,
)
from ha_quotas.solvers.general_matching import (
    GeneralGraph,
    UEdge,
    max_weight_perfect_matching,
)
from ha_quotas.solvers.weighted import (
    WeightedInstance,
    check_reference,
    reduce_verify,
    unit_weights,
)

log = logging.getLogger(__name__)

TOGGLE = frozenset({0, 2})

Lq2Mode = Literal["popv", "pov", "perpo", "pareto"]


# ── Degree lists ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class DegreeList:
    vertex: str
    allowed: frozenset[int]

    @property
    def gap(self) -> int:
        """Longest run of missing values between consecutive allowed degrees."""
        values = sorted(self.allowed)
        return max((b - a - 1 for a, b in zip(values, values[1:])), default=0)

    def admits(self, degree: int) -> bool:
        return degree in self.allowed


def degree_lists(winst: WeightedInstance) -> dict[str, DegreeList]:
    inst = winst.base
    lists = {a: DegreeList(a, frozenset({0, 1})) for a in inst.applicants}
    for p in inst.projects:
        lists[p.id] = DegreeList(p.id, frozenset({0, *range(p.lower, p.upper + 1)}))
    return lists


def _check_shape(inst: Instance) -> None:
    if inst.l_max > 2:
        raise QuotaShapeError(f"lower quotas up to 2 are supported, got l_max = {inst.l_max}")


# ── Last resorts ───────────────────────────────────────────────────────

def add_last_resorts(winst: WeightedInstance) -> WeightedInstance:
    """Give every applicant a private quota-1/1 project at weight 0, listed last."""
    inst = winst.base
    missing = [a for a in inst.applicants if a not in winst.last_resorts]
    if not missing:
        return winst

    taken = set(inst.project_ids)
    resorts = dict(winst.last_resorts)
    for a in missing:
        pid = f"__lr__{a}"
        while pid in taken:
            pid = "_" + pid
        taken.add(pid)
        resorts[a] = pid

    projects = inst.projects + tuple(ProjectRecord(resorts[a], 1, 1) for a in missing)
    prefs = {
        a: inst.prefs[a] + ((resorts[a],) if a in missing else ()) for a in inst.applicants
    }
    weights = dict(winst.weights)
    weights.update({(a, resorts[a]): 0 for a in missing})
    return WeightedInstance(Instance(inst.applicants, projects, prefs), weights, resorts)


def _complete(winst: WeightedInstance, M: Matching) -> Matching:
    """Send every applicant left unmatched by M to its last resort."""
    assignment = {a: M.project_of(a) or winst.last_resorts[a] for a in winst.base.applicants}
    return Matching(assignment)


def strip_last_resorts(winst: WeightedInstance, M: Matching) -> Matching:
    resorts = set(winst.last_resorts.values())
    return Matching({a: p for a, p in M.assignment.items() if p not in resorts})


# ── Gadget graph ───────────────────────────────────────────────────────

@dataclass
class GadgetGraph:
    graph: GeneralGraph
    backmap: dict[UEdge, tuple[str, str]] = field(default_factory=dict)

    def to_matching(self, edges: frozenset[UEdge]) -> Matching:
        return Matching.from_pairs(self.backmap[e] for e in edges if e in self.backmap)


def build_gadget_graph(
    winst: WeightedInstance,
    allowed: Mapping[str, frozenset[int]],
) -> Optional[GadgetGraph]:
    """Expand every project into copies and stubs so that perfect matchings hit ``allowed``.

    ``allowed[p]`` is a single degree {d} or the toggle {0, 2}. None when some
    fixed degree exceeds the number of applicants adjacent to the project.
    """
    inst = winst.base
    gg = GadgetGraph(GeneralGraph())
    for a in inst.applicants:
        gg.graph.add_vertex(("a", a))

    for p in inst.project_ids:
        adjacent = inst.neighbors(p)
        k = len(adjacent)
        degrees = allowed[p]
        if degrees == TOGGLE and k >= 2:
            stubs, parity = k, True
        else:
            (d,) = degrees if len(degrees) == 1 else (0,)
            if d > k:
                return None
            stubs, parity = k - d, False

        for i, a in enumerate(adjacent):
            copy = ("c", p, i)
            gg.graph.add_edge(("a", a), copy, winst.weight(a, p))
            gg.backmap[frozenset((("a", a), copy))] = (a, p)
            for j in range(stubs):
                gg.graph.add_edge(copy, ("s", p, j), 0)
        if parity:
            gg.graph.add_edge(("s", p, 0), ("s", p, 1), 0)
    return gg


# ── Neighboring types ──────────────────────────────────────────────────

def _shape(p: ProjectRecord, k: int, degree: int) -> frozenset[int]:
    if p.lower == 2 and degree in (0, 2) and k >= 2:
        return TOGGLE
    return frozenset({degree})


def neighboring_cases(
    winst: WeightedInstance, M: Matching
) -> Iterator[tuple[str, dict[str, frozenset[int]]]]:
    """Allowed-degree maps covering every neighboring type of M: base, ±2 moves, unit pairs."""
    inst = winst.base
    degrees = M.degrees()
    sizes = {p.id: len(inst.neighbors(p.id)) for p in inst.projects}
    base = {p.id: _shape(p, sizes[p.id], degrees.get(p.id, 0)) for p in inst.projects}
    yield "base", dict(base)

    def moves(step: int) -> list[tuple[str, frozenset[int]]]:
        # a toggling project may move from either of its two degrees
        out: dict[tuple[str, frozenset[int]], None] = {}
        for p in inst.projects:
            for current in sorted(base[p.id]):
                for delta in (step, -step):
                    d = current + delta
                    if 0 <= d <= sizes[p.id] and p.admits(d):
                        target = _shape(p, sizes[p.id], d)
                        if target != base[p.id]:
                            out[(p.id, target)] = None
        return list(out)

    for pid, target in moves(2):
        yield f"move2:{pid}", {**base, pid: target}

    for (p1, t1), (p2, t2) in combinations(moves(1), 2):
        if p1 != p2:
            yield f"unit:{p1}+{p2}", {**base, p1: t1, p2: t2}


def find_heavier_neighboring(winst: WeightedInstance, M: Matching) -> Optional[Matching]:
    """A feasible matching strictly heavier than M, or None when M is maximum-weight.

    ``winst`` must carry last resorts for every applicant; applicants unmatched in
    M are read as sitting on their last resort. The returned matching includes
    last-resort assignments.
    """
    inst = winst.base
    _check_shape(inst)
    if any(a not in winst.last_resorts for a in inst.applicants):
        raise InstanceError("find_heavier_neighboring needs last resorts; call add_last_resorts")
    current = _complete(winst, M)
    if not is_feasible(inst, current):
        raise MatchingError(f"Matching is not feasible: {M!r}")
    weight = winst.weight_of(current)

    for label, allowed in neighboring_cases(winst, current):
        gg = build_gadget_graph(winst, allowed)
        if gg is None:
            continue
        result = max_weight_perfect_matching(gg.graph)
        if result is None or result[0] <= weight:
            continue
        heavier = gg.to_matching(result[1])
        if not is_feasible(inst, heavier):
            raise MatchingError(f"gadget case {label} decoded to an infeasible matching")
        log.debug("find_heavier_neighboring: %s improves %d -> %d", label, weight, result[0])
        return heavier
    return None


# ── Solvers ────────────────────────────────────────────────────────────

def max_weight_lq2(
    winst: WeightedInstance, start: Optional[Matching] = None
) -> tuple[int, Matching]:
    """Maximum-weight matching by repeated neighboring-type improvement."""
    _check_shape(winst.base)
    lifted = add_last_resorts(winst)
    M = _complete(lifted, start or Matching.empty())
    rounds = 0
    while (heavier := find_heavier_neighboring(lifted, M)) is not None:
        M = heavier
        rounds += 1
    log.info("max_weight_lq2: optimum %d after %d improvements", lifted.weight_of(M), rounds)
    best = strip_last_resorts(lifted, M)
    return winst.weight_of(best), best


def _dominating(inst: Instance, M: Matching) -> Optional[Matching]:
    reduction = reduce_verify(inst, M, "pov")
    check_reference(reduction)
    lifted = add_last_resorts(reduction.winst)
    heavier = find_heavier_neighboring(lifted, M)
    return None if heavier is None else strip_last_resorts(lifted, heavier)


def _improve_to_pareto(inst: Instance, M: Matching) -> Matching:
    while (better := _dominating(inst, M)) is not None:
        if rank_sum(inst, better) >= rank_sum(inst, M):
            raise MatchingError("domination step did not decrease the rank sum")
        M = better
    return M


def solve_lq2(inst: Instance, mode: Lq2Mode, M: Optional[Matching] = None) -> Optional[Matching]:
    """popv / pov witness against M, a perfect Pareto optimal matching (perpo), or a
    maximum-cardinality Pareto optimal matching (pareto); None when there is none."""
    validate_instance(inst)
    _check_shape(inst)

    if mode in ("popv", "pov"):
        if M is None:
            raise MatchingError(f"mode {mode} needs the matching to verify")
        reduction = reduce_verify(inst, M, mode)
        check_reference(reduction)
        lifted = add_last_resorts(reduction.winst)
        heavier = find_heavier_neighboring(lifted, M)
        if heavier is None:
            return None
        witness = strip_last_resorts(lifted, heavier)
        if not reduction.is_witness(witness):
            raise MatchingError("heavier matching does not beat the reduction threshold")
        return witness

    if mode == "perpo":
        size, Mc = max_weight_lq2(unit_weights(inst))
        if size < inst.n:
            log.info("solve_lq2(perpo): maximum matching covers %d of %d", size, inst.n)
            return None
        return _improve_to_pareto(inst, Mc)

    if mode == "pareto":
        _, Mc = max_weight_lq2(unit_weights(inst))
        return _improve_to_pareto(inst, Mc)

    raise ValueError(f"Unknown mode '{mode}'. Expected popv | pov | perpo | pareto")
