"""Roommates instances and their transformation into quota-2/2 house allocation."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Optional

from ha_quotas.core.errors import InstanceError, MatchingError
from ha_quotas.core.instance import Instance, Matching, ProjectRecord

Pair = frozenset  # frozenset({u, v})


@dataclass(frozen=True)
class RoommatesInstance:
    """Non-bipartite graph; each vertex ranks exactly its neighbors, best first."""

    vertices: tuple[str, ...]
    prefs: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        lists = {v: tuple(self.prefs.get(v, ())) for v in self.vertices}
        object.__setattr__(self, "prefs", MappingProxyType(lists))

    __hash__ = None  # type: ignore[assignment]

    def validate(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise InstanceError("duplicate vertices")
        known = set(self.vertices)
        for v, lst in self.prefs.items():
            if v in lst:
                raise InstanceError(f"vertex '{v}' lists itself")
            if len(set(lst)) != len(lst) or not set(lst) <= known:
                raise InstanceError(f"vertex '{v}' has a malformed list")
            for u in lst:
                if v not in self.prefs[u]:
                    raise InstanceError(f"edge {{{v}, {u}}} is not listed by '{u}'")

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        """Each edge once, oriented by vertex order."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        return tuple((u, v) for u in self.vertices for v in self.prefs[u] if pos[u] < pos[v])

    def rank(self, v: str, partner: Optional[str]) -> int:
        lst = self.prefs[v]
        return len(lst) + 1 if partner is None else lst.index(partner) + 1

    def enumerate_matchings(self) -> Iterator[frozenset[Pair]]:
        """All matchings, the empty one first."""
        edges = [frozenset(e) for e in self.edges]

        def extend(i: int, used: frozenset, chosen: tuple) -> Iterator[frozenset[Pair]]:
            if i == len(edges):
                yield frozenset(chosen)
                return
            yield from extend(i + 1, used, chosen)
            if not edges[i] & used:
                yield from extend(i + 1, used | edges[i], chosen + (edges[i],))

        yield from extend(0, frozenset(), ())


def partner_of(matching: frozenset[Pair], v: str) -> Optional[str]:
    for pair in matching:
        if v in pair:
            (other,) = pair - {v}
            return other
    return None


def roommates_margin(r: RoommatesInstance, M2: frozenset[Pair], M1: frozenset[Pair]) -> int:
    margin = 0
    for v in r.vertices:
        r2, r1 = r.rank(v, partner_of(M2, v)), r.rank(v, partner_of(M1, v))
        margin += (r2 < r1) - (r1 < r2)
    return margin


def edge_project(r: RoommatesInstance, u: str, v: str) -> str:
    pos = {x: i for i, x in enumerate(r.vertices)}
    first, second = (u, v) if pos[u] < pos[v] else (v, u)
    return f"e_{first}_{second}"


def gen_pop_from_roommates(r: RoommatesInstance) -> Instance:
    """One applicant per vertex and one quota-2/2 project per edge, ranked like the partners."""
    r.validate()
    projects = tuple(ProjectRecord(edge_project(r, u, v), 2, 2) for u, v in r.edges)
    prefs = {v: tuple(edge_project(r, v, u) for u in r.prefs[v]) for v in r.vertices}
    return Instance(r.vertices, projects, prefs)


def to_house_matching(r: RoommatesInstance, matching: frozenset[Pair]) -> Matching:
    assignment: dict[str, str] = {}
    for pair in matching:
        u, v = tuple(pair)
        assignment[u] = assignment[v] = edge_project(r, u, v)
    return Matching(assignment)


def to_roommates_matching(r: RoommatesInstance, M: Matching) -> frozenset[Pair]:
    pairs = []
    for u, v in r.edges:
        pid = edge_project(r, u, v)
        members = set(M.assignees(pid))
        if members and members != {u, v}:
            raise MatchingError(f"project {pid} holds {sorted(members)}, expected both endpoints")
        if members:
            pairs.append(frozenset((u, v)))
    return frozenset(pairs)
