"""Exact cover by 3-sets: instances, normalization, a tiny solver, and the hardness gadgets."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from typing import Optional

from ha_quotas.config.schemas import DEFAULT_GUARDS, GuardsSchema
from ha_quotas.core.errors import GuardExceededError, X3CError
from ha_quotas.core.instance import Instance, Matching, ProjectRecord

log = logging.getLogger(__name__)

Element = Hashable

PAD_PREFIX = "~pad"
PARITY_PREFIX = "~par"

# Occurrence padding component: three "dead" sets {u_i, d, d'} that pairwise
# intersect, plus seven dummy-only sets. Every dummy occurs exactly three times,
# {d1,d4,d5}, {d2,d6,d7}, {d3,d8,d9} partition the dummies, and using a dead set
# would leave 7 dummies for 3-sets, so no exact cover ever uses one.
_DEAD = ((1, 2), (1, 3), (2, 3))
_DUMMY_ONLY = ((1, 4, 5), (2, 6, 7), (3, 8, 9), (4, 6, 8), (5, 7, 9), (4, 7, 8), (5, 6, 9))


@dataclass(frozen=True)
class X3CInstance:
    elements: tuple[Element, ...]
    sets: tuple[frozenset, ...]

    @classmethod
    def of(cls, elements: Iterable[Element], sets: Iterable[Iterable[Element]]) -> X3CInstance:
        return cls(tuple(elements), tuple(frozenset(s) for s in sets))

    def validate(self) -> None:
        if len(set(self.elements)) != len(self.elements):
            raise X3CError("duplicate elements")
        known = set(self.elements)
        for i, s in enumerate(self.sets, 1):
            if len(s) != 3:
                raise X3CError(f"set {i} has {len(s)} elements, expected 3")
            if not s <= known:
                raise X3CError(f"set {i} contains unknown elements {sorted(map(str, s - known))}")
        occ = self.occurrences()
        missing = [e for e in self.elements if occ[e] == 0]
        if missing:
            raise X3CError(f"elements in no set: {missing}")

    def occurrences(self) -> Counter:
        return Counter(e for s in self.sets for e in s)

    @property
    def cover_size(self) -> int:
        return len(self.elements) // 3

    def is_normalized(self) -> bool:
        occ = self.occurrences()
        return (
            len(self.elements) % 3 == 0
            and self.cover_size % 2 == 1
            and all(occ[e] == 3 for e in self.elements)
        )

    def sets_containing(self, e: Element) -> list[int]:
        """0-based indices of the sets holding ``e``, ascending."""
        return [j for j, s in enumerate(self.sets) if e in s]


def _check_occurrences(x: X3CInstance) -> None:
    x.validate()
    heavy = [e for e, c in x.occurrences().items() if c > 3]
    if heavy:
        raise X3CError(f"elements in more than three sets: {heavy}")


def _check_reduction_input(x: X3CInstance) -> None:
    _check_occurrences(x)
    if len(x.elements) % 3 or x.cover_size % 2 == 0:
        raise X3CError(
            f"|X| = {len(x.elements)} must be three times an odd number; run normalize_x3c"
        )
    if not x.is_normalized():
        short = [e for e, c in x.occurrences().items() if c != 3]
        raise X3CError(f"elements in fewer than three sets: {short}; run normalize_x3c")


# ── Normalization ──────────────────────────────────────────────────────

def normalize_x3c(x: X3CInstance) -> X3CInstance:
    """Pad to exactly three occurrences per element and an odd |X|/3, keeping cover existence.

    Padding elements carry the prefixes ``~pad`` / ``~par`` and padding sets are
    appended after the original ones.
    """
    _check_occurrences(x)
    elements = list(x.elements)
    sets = list(x.sets)
    components = 0

    def pad(units: list[Element]) -> None:
        nonlocal components
        for start in range(0, len(units), 3):
            components += 1
            dummy = {j: f"{PAD_PREFIX}{components}_{j}" for j in range(1, 10)}
            elements.extend(dummy.values())
            for u, (i, j) in zip(units[start:start + 3], _DEAD):
                sets.append(frozenset((u, dummy[i], dummy[j])))
            sets.extend(frozenset(dummy[j] for j in triple) for triple in _DUMMY_ONLY)

    occ = x.occurrences()
    pad([e for e in x.elements for _ in range(3 - occ[e])])

    if (len(elements) // 3) % 2 == 0:
        fresh = [f"{PARITY_PREFIX}{j}" for j in range(1, 4)]
        elements.extend(fresh)
        sets.append(frozenset(fresh))
        pad([e for e in fresh for _ in range(2)])

    out = X3CInstance(tuple(elements), tuple(sets))
    if components:
        log.info("normalize_x3c: added %d padding components", components)
    return out


# ── Solver ─────────────────────────────────────────────────────────────

def solve_x3c(x: X3CInstance, guards: Optional[GuardsSchema] = None) -> Optional[tuple[int, ...]]:
    """0-based indices of an exact cover, or None. Exhaustive over the first uncovered element."""
    x.validate()
    guards = guards or DEFAULT_GUARDS
    if len(x.sets) > guards.x3c_max_sets:
        raise GuardExceededError(f"{len(x.sets)} sets exceed the X3C guard {guards.x3c_max_sets}")
    if len(x.elements) % 3:
        return None
    holders = {e: x.sets_containing(e) for e in x.elements}

    def search(covered: frozenset, chosen: tuple[int, ...]) -> Optional[tuple[int, ...]]:
        free = next((e for e in x.elements if e not in covered), None)
        if free is None:
            return chosen
        for j in holders[free]:
            if not x.sets[j] & covered:
                found = search(covered | x.sets[j], chosen + (j,))
                if found is not None:
                    return found
        return None

    found = search(frozenset(), ())
    return None if found is None else tuple(sorted(found))


def is_exact_cover(x: X3CInstance, chosen: Iterable[int]) -> bool:
    counts = Counter(e for j in chosen for e in x.sets[j])
    return all(counts[e] == 1 for e in x.elements) and set(counts) == set(x.elements)


# ── Hardness gadgets ───────────────────────────────────────────────────

def _y_z_lists(size: int) -> dict[str, tuple[str, ...]]:
    prefs: dict[str, tuple[str, ...]] = {}
    for i in range(1, size + 1):
        prefs[f"y{i}"] = (f"e{i}", f"d{i}") if i % 2 else (f"d{i}", f"e{i}")
    for i in range(1, size + 1):
        prev = size if i == 1 else i - 1
        prefs[f"z{i}"] = (f"d{i}", f"e{prev}")
    return prefs


def _diagonal(size: int) -> Matching:
    return Matching(
        {f"{who}{i}": f"d{i}" for i in range(1, size + 1) for who in ("b", "y", "z")}
    )


def _applicants(size: int) -> tuple[str, ...]:
    return tuple(f"{who}{i}" for who in ("b", "y", "z") for i in range(1, size + 1))


def _d_e_projects(size: int) -> list[ProjectRecord]:
    return [ProjectRecord(f"d{i}", 3, 3) for i in range(1, size + 1)] + [
        ProjectRecord(f"e{i}", 2, 2) for i in range(1, size + 1)
    ]


def gen_popv_x3c(x: X3CInstance) -> tuple[Instance, Matching]:
    """Instance and matching M with M(d_i) = {b_i, y_i, z_i}; M is unpopular iff x has an exact cover."""
    _check_reduction_input(x)
    size = len(x.elements)
    projects = [ProjectRecord(f"c{j}", 3, 3) for j in range(1, len(x.sets) + 1)]
    projects += _d_e_projects(size)
    prefs = {
        f"b{i}": tuple(f"c{j + 1}" for j in x.sets_containing(e)) + (f"d{i}",)
        for i, e in enumerate(x.elements, 1)
    }
    prefs.update(_y_z_lists(size))
    return Instance(_applicants(size), tuple(projects), prefs), _diagonal(size)


def gen_pop_x3c(x: X3CInstance) -> Instance:
    """Three copies per set, listed in a cyclic block per element; popular matchings exist iff no cover."""
    _check_reduction_input(x)
    size = len(x.elements)
    order = {e: i for i, e in enumerate(x.elements)}
    projects = [
        ProjectRecord(f"c{j}{tick}", 3, 3)
        for j in range(1, len(x.sets) + 1)
        for tick in ("", "'", "''")
    ]
    projects += _d_e_projects(size)

    prefs: dict[str, tuple[str, ...]] = {}
    for i, e in enumerate(x.elements, 1):
        blocks: list[str] = []
        for j in x.sets_containing(e):
            copies = [f"c{j + 1}", f"c{j + 1}'", f"c{j + 1}''"]
            shift = sorted(x.sets[j], key=order.__getitem__).index(e)
            blocks += copies[shift:] + copies[:shift]
        prefs[f"b{i}"] = tuple(blocks) + (f"d{i}",)
    prefs.update(_y_z_lists(size))
    return Instance(_applicants(size), tuple(projects), prefs)


def gen_perpo_x3c(x: X3CInstance) -> Instance:
    """One quota-3/3 project per set; a perfect Pareto optimal matching exists iff x has a cover."""
    _check_occurrences(x)
    projects = tuple(ProjectRecord(f"t{j}", 3, 3) for j in range(1, len(x.sets) + 1))
    prefs = {
        f"a{i}": tuple(f"t{j + 1}" for j in x.sets_containing(e))
        for i, e in enumerate(x.elements, 1)
    }
    return Instance(tuple(prefs), projects, prefs)


def cover_to_popv_witness(x: X3CInstance, cover: Iterable[int]) -> Matching:
    """Matching of ``gen_popv_x3c(x)`` built from an exact cover, one vote ahead of the diagonal.

    b_i moves to the chosen set holding its element, y_i to e_i and z_i to e_{i-1}.
    """
    size = len(x.elements)
    index = {e: i for i, e in enumerate(x.elements, 1)}
    assignment = {f"b{index[e]}": f"c{j + 1}" for j in cover for e in x.sets[j]}
    for i in range(1, size + 1):
        assignment[f"y{i}"] = f"e{i}"
        assignment[f"z{i}"] = f"e{size if i == 1 else i - 1}"
    return Matching(assignment)


def cover_to_perfect_matching(x: X3CInstance, cover: Iterable[int]) -> Matching:
    """The perfect matching of ``gen_perpo_x3c(x)`` induced by an exact cover."""
    index = {e: i for i, e in enumerate(x.elements, 1)}
    return Matching({f"a{index[e]}": f"t{j + 1}" for j in cover for e in x.sets[j]})
