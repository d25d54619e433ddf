"""Instance and matching model: feasibility, ranks, popularity margins, dominance."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Optional

from ha_quotas.core.errors import InstanceError, MatchingError

# Unmatched is never a project: |M(p)| only counts real assignments.
UNMATCHED = None

Assigned = Optional[str]


# ── Records ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ProjectRecord:
    id: str
    lower: int
    upper: int

    def normalized(self) -> ProjectRecord:
        """Lower quota 0 means the same as 1: an open project has an assignee."""
        if self.lower == 0:
            return ProjectRecord(self.id, 1, self.upper)
        return self

    def admits(self, degree: int) -> bool:
        return degree == 0 or self.lower <= degree <= self.upper


@dataclass(frozen=True)
class Instance:
    """Applicants with strict preference lists over projects with lower/upper quotas.

    ``prefs`` maps every applicant to its acceptable projects, best first.
    Construction does not validate; call ``validate_instance``.
    """

    applicants: tuple[str, ...]
    projects: tuple[ProjectRecord, ...]
    prefs: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "applicants", tuple(self.applicants))
        object.__setattr__(self, "projects", tuple(self.projects))
        lists = {a: tuple(self.prefs.get(a, ())) for a in self.applicants}
        for a, lst in self.prefs.items():
            lists.setdefault(a, tuple(lst))
        object.__setattr__(self, "prefs", MappingProxyType(lists))

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def build(
        cls,
        applicants: Iterable[str],
        projects: Iterable[ProjectRecord | tuple[str, int, int]],
        prefs: Mapping[str, Iterable[str]],
    ) -> Instance:
        """Create an instance, normalizing lower quota 0 to 1."""
        records = tuple(
            (p if isinstance(p, ProjectRecord) else ProjectRecord(*p)).normalized()
            for p in projects
        )
        return cls(tuple(applicants), records, {a: tuple(lst) for a, lst in prefs.items()})

    # ── Derived views ───────────────────────────────────────────────────

    @property
    def n(self) -> int:
        return len(self.applicants)

    @property
    def m(self) -> int:
        return len(self.projects)

    @cached_property
    def project_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.projects)

    @cached_property
    def project_map(self) -> dict[str, ProjectRecord]:
        return {p.id: p for p in self.projects}

    def project(self, pid: str) -> ProjectRecord:
        try:
            return self.project_map[pid]
        except KeyError:
            raise MatchingError(f"Unknown project '{pid}'") from None

    @cached_property
    def _ranks(self) -> dict[str, dict[str, int]]:
        return {a: {p: i for i, p in enumerate(lst, 1)} for a, lst in self.prefs.items()}

    @cached_property
    def _neighbors(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {pid: [] for pid in self.project_ids}
        for a in self.applicants:
            for p in self.prefs[a]:
                adj.setdefault(p, []).append(a)
        return {p: tuple(lst) for p, lst in adj.items()}

    def neighbors(self, pid: str) -> tuple[str, ...]:
        """Applicants that find ``pid`` acceptable, in instance order."""
        return self._neighbors.get(pid, ())

    def acceptable(self, a: str, pid: str) -> bool:
        return pid in self._ranks.get(a, {})

    @cached_property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple((a, p) for a in self.applicants for p in self.prefs[a])

    @property
    def l_max(self) -> int:
        return max((p.lower for p in self.projects), default=0)

    @property
    def u_max(self) -> int:
        return max((p.upper for p in self.projects), default=0)

    @property
    def delta_a(self) -> int:
        return max((len(self.prefs[a]) for a in self.applicants), default=0)

    @property
    def delta_p(self) -> int:
        return max((len(self.neighbors(p)) for p in self.project_ids), default=0)

    @property
    def quota_projects(self) -> tuple[str, ...]:
        """Projects with lower quota above 1, in instance order."""
        return tuple(p.id for p in self.projects if p.lower > 1)

    def without_applicant(self, a: str) -> Instance:
        return Instance(
            tuple(x for x in self.applicants if x != a),
            self.projects,
            {x: lst for x, lst in self.prefs.items() if x != a},
        )


@dataclass(frozen=True, eq=False)
class Matching:
    """Immutable applicant → project assignment; unmatched applicants are absent."""

    assignment: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = {a: p for a, p in self.assignment.items() if p is not UNMATCHED}
        object.__setattr__(self, "assignment", MappingProxyType(cleaned))

    @classmethod
    def empty(cls) -> Matching:
        return cls({})

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> Matching:
        assignment: dict[str, str] = {}
        for a, p in pairs:
            if a in assignment:
                raise MatchingError(f"Applicant '{a}' assigned twice")
            assignment[a] = p
        return cls(assignment)

    def project_of(self, a: str) -> Assigned:
        return self.assignment.get(a, UNMATCHED)

    def assignees(self, pid: str) -> tuple[str, ...]:
        return tuple(a for a, p in self.assignment.items() if p == pid)

    def degrees(self) -> Counter[str]:
        return Counter(self.assignment.values())

    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(self.assignment.items())

    def restrict(self, projects: Iterable[str]) -> Matching:
        """Drop assignments to projects outside ``projects``."""
        keep = set(projects)
        return Matching({a: p for a, p in self.assignment.items() if p in keep})

    def __len__(self) -> int:
        return len(self.assignment)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matching):
            return NotImplemented
        return dict(self.assignment) == dict(other.assignment)

    def __hash__(self) -> int:
        return hash(frozenset(self.assignment.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{a}->{p}" for a, p in self.assignment.items())
        return f"Matching({body})"


# ── Validation ─────────────────────────────────────────────────────────

def validate_instance(inst: Instance) -> None:
    """Raise InstanceError unless every structural invariant holds."""
    dup_a = [a for a, c in Counter(inst.applicants).items() if c > 1]
    if dup_a:
        raise InstanceError(f"Duplicate applicant identifiers: {sorted(dup_a)}", dup_a[0])
    dup_p = [p for p, c in Counter(inst.project_ids).items() if c > 1]
    if dup_p:
        raise InstanceError(f"Duplicate project identifiers: {sorted(dup_p)}", dup_p[0])

    for p in inst.projects:
        if p.lower < 1:
            raise InstanceError(f"Project '{p.id}' has lower quota {p.lower} < 1", p.id)
        if p.lower > p.upper:
            raise InstanceError(
                f"Project '{p.id}' has lower quota {p.lower} above upper quota {p.upper}", p.id
            )

    known_a = set(inst.applicants)
    stray = [a for a in inst.prefs if a not in known_a]
    if stray:
        raise InstanceError(f"Preference lists for unknown applicants: {sorted(stray)}", stray[0])

    known_p = set(inst.project_ids)
    for a in inst.applicants:
        lst = inst.prefs[a]
        unknown = [p for p in lst if p not in known_p]
        if unknown:
            raise InstanceError(f"Applicant '{a}' lists unknown projects {unknown}", a)
        if len(set(lst)) != len(lst):
            raise InstanceError(f"Applicant '{a}' lists a project twice", a)


def _check_identifiers(inst: Instance, M: Matching) -> None:
    known_a = set(inst.applicants)
    for a, p in M.assignment.items():
        if a not in known_a:
            raise MatchingError(f"Unknown applicant '{a}'")
        if p not in inst.project_map:
            raise MatchingError(f"Unknown project '{p}'")


def is_feasible(inst: Instance, M: Matching) -> bool:
    _check_identifiers(inst, M)
    if any(not inst.acceptable(a, p) for a, p in M.assignment.items()):
        return False
    degrees = M.degrees()
    return all(p.admits(degrees.get(p.id, 0)) for p in inst.projects)


def assert_feasible(inst: Instance, M: Matching) -> None:
    if not is_feasible(inst, M):
        raise MatchingError(f"Matching is not feasible: {M!r}")


# ── Preference semantics ───────────────────────────────────────────────

def rank_of(inst: Instance, a: str, x: Assigned) -> int:
    """1-based rank of ``x`` in a's list; unmatched ranks last at |N_a| + 1."""
    if a not in inst.prefs:
        raise MatchingError(f"Unknown applicant '{a}'")
    if x is UNMATCHED:
        return len(inst.prefs[a]) + 1
    try:
        return inst._ranks[a][x]
    except KeyError:
        raise MatchingError(f"Project '{x}' is not acceptable to '{a}'") from None


def popularity_margin(inst: Instance, M2: Matching, M1: Matching) -> int:
    """(#applicants preferring M2) − (#applicants preferring M1)."""
    assert_feasible(inst, M2)
    assert_feasible(inst, M1)
    margin = 0
    for a in inst.applicants:
        r2 = rank_of(inst, a, M2.project_of(a))
        r1 = rank_of(inst, a, M1.project_of(a))
        margin += (r2 < r1) - (r1 < r2)
    return margin


def dominates(inst: Instance, M2: Matching, M1: Matching) -> bool:
    assert_feasible(inst, M2)
    assert_feasible(inst, M1)
    better = False
    for a in inst.applicants:
        r2 = rank_of(inst, a, M2.project_of(a))
        r1 = rank_of(inst, a, M1.project_of(a))
        if r2 > r1:
            return False
        better = better or r2 < r1
    return better


def unmatched_set(inst: Instance, M: Matching) -> tuple[str, ...]:
    return tuple(a for a in inst.applicants if M.project_of(a) is UNMATCHED)


def is_perfect(inst: Instance, M: Matching) -> bool:
    return not unmatched_set(inst, M)


def open_projects(inst: Instance, M: Matching) -> frozenset[str]:
    return frozenset(M.assignment.values())


def rank_sum(inst: Instance, M: Matching) -> int:
    return sum(rank_of(inst, a, M.project_of(a)) for a in inst.applicants)
