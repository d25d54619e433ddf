"""Oracle cross-check sweeps over random and exhaustive instance families.

Each runner yields one record per checked case with a boolean ``agree``
field; ``run_sweep`` dispatches by name, forwards every record to the tracker
and collects them into a DataFrame.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Any, Optional

import numpy as np
import pandas as pd

from ha_quotas.config.schemas import GuardsSchema, SweepSchema
from ha_quotas.core.instance import (
    Instance,
    Matching,
    ProjectRecord,
    dominates,
    is_feasible,
    is_perfect,
    popularity_margin,
)
from ha_quotas.generators.random_instances import gen_random, gen_random_weights
from ha_quotas.generators.roommates import (
    RoommatesInstance,
    gen_pop_from_roommates,
    roommates_margin,
    to_roommates_matching,
)
from ha_quotas.generators.x3c import (
    X3CInstance,
    cover_to_popv_witness,
    gen_perpo_x3c,
    gen_pop_x3c,
    gen_popv_x3c,
    normalize_x3c,
    solve_x3c,
)
from ha_quotas.solvers.gadgets import build_gadget_graph, neighboring_cases, solve_lq2
from ha_quotas.solvers.general_matching import matching_weight
from ha_quotas.solvers.oracle import (
    enumerate_feasible_matchings,
    enumerate_perfect_matchings,
    oracle_exists,
    oracle_max_weight,
    oracle_verify,
)
from ha_quotas.solvers.open_set import (
    dominating_with_open_set,
    m_quota,
    max_weight_with_open_set,
    run_fpt,
)
from ha_quotas.solvers.weighted import kernel_size_bound, kernelize, reduce_verify
from ha_quotas.tools.wandb_tools import SweepTracker

log = logging.getLogger(__name__)

Runner = Callable[[SweepSchema, GuardsSchema], Iterator[dict[str, Any]]]


# ── Instance sampling ──────────────────────────────────────────────────

def _random_instance(cfg: SweepSchema, seed: int, l_cap: Optional[int] = None) -> Instance:
    """Sizes drawn from the sweep ranges by ``seed``; lower quotas optionally capped."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    m = int(rng.integers(cfg.m_min, cfg.m_max + 1))
    hi = None if cfg.list_len_max is None else min(cfg.list_len_max, m)
    inst = gen_random(seed, n, m, cfg.quota_max, (min(cfg.list_len_min, m), hi))
    if l_cap is None:
        return inst
    capped = tuple(ProjectRecord(p.id, min(p.lower, l_cap), p.upper) for p in inst.projects)
    return Instance(inst.applicants, capped, inst.prefs)


def _pick(items: list, seed: int) -> Any:
    return items[int(np.random.default_rng(seed).integers(len(items)))]


def _seeds(cfg: SweepSchema) -> range:
    return range(cfg.seed_offset, cfg.seed_offset + cfg.seeds)


# ── Runners ────────────────────────────────────────────────────────────

def sweep_threshold(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """Heavier-than-threshold matchings exist exactly when the oracle finds a witness."""
    for seed in _seeds(cfg):
        inst = _random_instance(cfg, seed)
        for index, M in enumerate(enumerate_feasible_matchings(inst, guards)):
            for mode, oracle_mode in (("popv", "popular"), ("pov", "pareto")):
                reduction = reduce_verify(inst, M, mode)
                best = oracle_max_weight(reduction.winst, guards)
                heavier = best is not None and best[0] > reduction.threshold
                witness = oracle_verify(inst, M, oracle_mode, guards) is not None
                yield {
                    "seed": seed,
                    "matching": index,
                    "mode": mode,
                    "n": inst.n,
                    "m": inst.m,
                    "threshold": reduction.threshold,
                    "heavier": heavier,
                    "witness": witness,
                    "agree": heavier == witness,
                }


def _lq2_witness_ok(inst: Instance, mode: str, M: Matching, W: Matching, guards) -> bool:
    if mode == "popv":
        return popularity_margin(inst, W, M) >= 1
    if mode == "pov":
        return dominates(inst, W, M)
    return is_perfect(inst, W) and oracle_verify(inst, W, "pareto", guards) is None


def sweep_lq2(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """solve_lq2 against the oracle on instances with lower quotas at most 2."""
    for seed in _seeds(cfg):
        inst = _random_instance(cfg, seed, l_cap=2)
        M = _pick(list(enumerate_feasible_matchings(inst, guards)), seed)
        expected = {
            "popv": oracle_verify(inst, M, "popular", guards) is not None,
            "pov": oracle_verify(inst, M, "pareto", guards) is not None,
            "perpo": oracle_exists(inst, "perfect_pareto", guards) is not None,
        }
        for mode, oracle_yes in expected.items():
            W = solve_lq2(inst, mode, M if mode != "perpo" else None)
            valid = W is None or _lq2_witness_ok(inst, mode, M, W, guards)
            yield {
                "seed": seed,
                "mode": mode,
                "n": inst.n,
                "m": inst.m,
                "solver": W is not None,
                "oracle": oracle_yes,
                "witness_valid": valid,
                "agree": (W is not None) == oracle_yes and valid,
            }


def sweep_gadget(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """Perfect matchings of each gadget graph project onto exactly the matchings of its type."""
    for seed in _seeds(cfg):
        inst = _random_instance(cfg, seed, l_cap=2)
        winst = gen_random_weights(inst, seed, cfg.max_weight)
        feasible = list(enumerate_feasible_matchings(inst, guards))
        M = _pick(feasible, seed)
        perfect = [X for X in feasible if is_perfect(inst, X)]
        for label, allowed in neighboring_cases(winst, M):
            of_type = {
                X for X in perfect if all(X.degrees().get(p, 0) in allowed[p] for p in allowed)
            }
            gg = build_gadget_graph(winst, allowed)
            images: set[Matching] = set()
            weights: set[int] = set()
            if gg is not None:
                for edges in enumerate_perfect_matchings(gg.graph):
                    X = gg.to_matching(edges)
                    images.add(X)
                    weights.add(matching_weight(gg.graph, edges) - winst.weight_of(X))
            yield {
                "seed": seed,
                "case": label,
                "n": inst.n,
                "m": inst.m,
                "gadget_images": len(images),
                "oracle_matchings": len(of_type),
                "agree": images == of_type and weights <= {0},
            }


def _subsets(items: tuple[str, ...]) -> Iterator[frozenset[str]]:
    for size in range(len(items) + 1):
        for subset in combinations(items, size):
            yield frozenset(subset)


def sweep_open_set(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """Fixed-open-set flow solvers against the oracle restricted to that open set."""
    for seed in _seeds(cfg):
        inst = _random_instance(cfg, seed)
        winst = gen_random_weights(inst, seed, cfg.max_weight)
        M = _pick(list(enumerate_feasible_matchings(inst, guards)), seed)
        for P_open in _subsets(inst.project_ids):
            flow_dom = dominating_with_open_set(inst, M, P_open)
            oracle_dom = oracle_verify(inst, M, "pareto", guards, open_set=P_open)
            flow_best = max_weight_with_open_set(winst, P_open)
            oracle_best = oracle_max_weight(winst, guards, open_set=P_open)
            weight_ok = (flow_best is None) == (oracle_best is None) and (
                flow_best is None or flow_best[0] == oracle_best[0]
            )
            dom_ok = (flow_dom is None) == (oracle_dom is None) and (
                flow_dom is None or dominates(inst, flow_dom, M)
            )
            yield {
                "seed": seed,
                "open": ",".join(sorted(P_open)),
                "n": inst.n,
                "m": inst.m,
                "dominating": flow_dom is not None,
                "max_weight": None if flow_best is None else flow_best[0],
                "agree": weight_ok and dom_ok,
            }


def sweep_fpt(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """run_fpt against the oracle, with the measured subproblem count and wall time."""
    for seed in _seeds(cfg):
        inst = _random_instance(cfg, seed)
        winst = gen_random_weights(inst, seed, cfg.max_weight)
        run = run_fpt(winst, guards)
        oracle_weight, _ = oracle_max_weight(winst, guards)
        yield {
            "seed": seed,
            "n": inst.n,
            "m": inst.m,
            "m_quota": m_quota(inst),
            "subproblems": run.subproblems,
            "seconds": run.seconds,
            "fpt": run.weight,
            "oracle": oracle_weight,
            "agree": run.weight == oracle_weight == winst.weight_of(run.matching),
        }


def sweep_kernel(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """Kernelization keeps the optimum and respects the marker bound."""
    for seed in _seeds(cfg):
        inst = _random_instance(cfg, seed)
        winst = gen_random_weights(inst, seed, cfg.max_weight)
        kernel = kernelize(winst, guards)
        before, _ = oracle_max_weight(winst, guards, force=True)
        after, _ = oracle_max_weight(kernel, guards, force=True)
        bound = kernel_size_bound(inst.n, winst.max_weight)
        yield {
            "seed": seed,
            "n": inst.n,
            "m": inst.m,
            "kept": kernel.base.m,
            "bound": bound,
            "before": before,
            "after": after,
            "agree": before == after and (kernel is winst or kernel.base.m <= bound),
        }


def x3c_family(size: int, max_sets: int, min_sets: int = 1) -> Iterator[X3CInstance]:
    """Every covering family of 3-subsets of {1..size} with at most three occurrences per element."""
    elements = tuple(range(1, size + 1))
    triples = [frozenset(t) for t in combinations(elements, 3)]
    for k in range(min_sets, max_sets + 1):
        for family in combinations(triples, k):
            x = X3CInstance(elements, family)
            occ = x.occurrences()
            if all(1 <= occ[e] <= 3 for e in elements):
                yield x


def normalized_x3c_family(size: int) -> Iterator[X3CInstance]:
    """Families of ``size`` triples over {1..size}, repeats allowed, each element in exactly three."""
    elements = tuple(range(1, size + 1))
    triples = [frozenset(t) for t in combinations(elements, 3)]
    for family in combinations_with_replacement(triples, size):
        x = X3CInstance(elements, family)
        if x.is_normalized():
            yield x


def _popv_row(
    x: X3CInstance, cover: Optional[tuple[int, ...]], guards: GuardsSchema
) -> dict[str, Any]:
    """popv / pop answers on a normalized x: the oracle at |X| = 3, the cover witness beyond."""
    inst, M = gen_popv_x3c(x)
    if len(x.elements) == 3:
        unpopular = oracle_verify(inst, M, "popular", guards, force=True) is not None
        no_popular = oracle_exists(gen_pop_x3c(x), "popular", guards, force=True) is None
        ok = unpopular == (cover is not None) and no_popular == (cover is not None)
        return {"popv": unpopular, "pop": no_popular, "decided": "oracle", "popv_ok": ok}
    if cover is None:
        return {"popv": None, "pop": None, "decided": "none", "popv_ok": True}
    W = cover_to_popv_witness(x, cover)
    ok = is_feasible(inst, W) and popularity_margin(inst, W, M) >= 1
    return {"popv": ok, "pop": None, "decided": "witness", "popv_ok": ok}


def _perpo_exists(x: X3CInstance, guards: GuardsSchema) -> bool:
    return oracle_exists(gen_perpo_x3c(x), "perfect_pareto", guards, force=True) is not None


def sweep_x3c(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """Cover existence against the three reductions.

    perpo is decided by the oracle on every family with |X| ≤ 6. The popularity
    gadgets take the padded family: normalized families on three elements are
    decided by the oracle, larger ones are checked through the matching built
    from a cover.
    """
    wide = guards.model_copy(update={"x3c_max_sets": max(guards.x3c_max_sets, 200)})
    for size in (3, 6):
        for x in x3c_family(size, cfg.m_max, cfg.m_min):
            cover = solve_x3c(x, guards) is not None
            perpo = _perpo_exists(x, guards)
            padded = normalize_x3c(x)
            padded_cover = solve_x3c(padded, wide)
            popv = _popv_row(padded, padded_cover, guards)
            ok = popv.pop("popv_ok") and (padded_cover is not None) == cover
            yield {
                "elements": size,
                "sets": len(x.sets),
                "normalized": False,
                "cover": cover,
                "perpo": perpo,
                **popv,
                "agree": perpo == cover and ok,
            }
    for x in normalized_x3c_family(3):
        cover = solve_x3c(x, guards)
        perpo = _perpo_exists(x, guards)
        popv = _popv_row(x, cover, guards)
        ok = popv.pop("popv_ok")
        yield {
            "elements": len(x.elements),
            "sets": len(x.sets),
            "normalized": True,
            "cover": cover is not None,
            "perpo": perpo,
            **popv,
            "agree": perpo == (cover is not None) and ok,
        }


def roommates_family(max_vertices: int) -> Iterator[RoommatesInstance]:
    """All roommates instances on 1..max_vertices vertices, every graph and every ranking."""
    for size in range(1, max_vertices + 1):
        vertices = tuple(f"v{i}" for i in range(1, size + 1))
        pairs = list(combinations(vertices, 2))
        for mask in range(2 ** len(pairs)):
            edges = [e for i, e in enumerate(pairs) if mask >> i & 1]
            adjacency = {v: [u for e in edges for u in e if v in e and u != v] for v in vertices}
            for lists in product(*(permutations(adjacency[v]) for v in vertices)):
                yield RoommatesInstance(vertices, dict(zip(vertices, lists)))


def sweep_roommates(cfg: SweepSchema, guards: GuardsSchema) -> Iterator[dict[str, Any]]:
    """Popular matchings and margins survive the roommates transformation."""
    for count, r in enumerate(roommates_family(cfg.n_max)):
        if count >= cfg.seeds:
            return
        inst = gen_pop_from_roommates(r)
        house = list(enumerate_feasible_matchings(inst, guards, force=True))
        rm = list(r.enumerate_matchings())
        images = [to_roommates_matching(r, M) for M in house]
        margins_ok = all(
            popularity_margin(inst, M2, M1) == roommates_margin(r, R2, R1)
            for M2, R2 in zip(house, images)
            for M1, R1 in zip(house, images)
        )
        popular_rm = {
            R for R in rm if all(roommates_margin(r, other, R) < 1 for other in rm)
        }
        popular_house = {
            R
            for M, R in zip(house, images)
            if all(popularity_margin(inst, other, M) < 1 for other in house)
        }
        yield {
            "instance": count,
            "vertices": len(r.vertices),
            "edges": len(r.edges),
            "matchings": len(rm),
            "popular": len(popular_rm),
            "agree": set(images) == set(rm) and margins_ok and popular_rm == popular_house,
        }


RUNNERS: dict[str, Runner] = {
    "threshold": sweep_threshold,
    "lq2": sweep_lq2,
    "gadget": sweep_gadget,
    "open_set": sweep_open_set,
    "fpt": sweep_fpt,
    "kernel": sweep_kernel,
    "x3c": sweep_x3c,
    "roommates": sweep_roommates,
}


def run_sweep(
    cfg: SweepSchema,
    guards: GuardsSchema,
    tracker: Optional[SweepTracker] = None,
) -> pd.DataFrame:
    """Run the named sweep; stops at the first disagreement when ``fail_fast`` is set."""
    runner = RUNNERS[cfg.name]
    records: list[dict[str, Any]] = []
    for record in runner(cfg, guards):
        records.append(record)
        if tracker is not None:
            tracker.log_case(record)
        if not record["agree"]:
            log.warning("sweep %s: disagreement %s", cfg.name, record)
            if cfg.fail_fast:
                break
    df = pd.DataFrame.from_records(records)
    if df.empty:
        df = pd.DataFrame({"agree": pd.Series(dtype=bool)})
    log.info("sweep %s: %d cases, %d disagreements", cfg.name, len(df), int((~df["agree"]).sum()))
    return df
