"""Line-oriented text formats for instances, matchings, X3C and roommates inputs."""

from __future__ import annotations

import re
from collections.abc import Iterator
from pathlib import Path
from typing import Any, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from ha_quotas.core.errors import InstanceError, ParseError
from ha_quotas.core.instance import Instance, Matching, ProjectRecord, validate_instance
from ha_quotas.generators.roommates import RoommatesInstance
from ha_quotas.generators.x3c import X3CInstance
from ha_quotas.solvers.weighted import WeightedInstance

_TEMPLATE_DIR = Path(__file__).parent.parent / "templates"

_PREF_RE = re.compile(r"^(pref|vertex)\s+(\S+?)\s*:\s*(.*)$")


def _make_env() -> Environment:
    return Environment(
        loader=FileSystemLoader(str(_TEMPLATE_DIR)),
        trim_blocks=True,
        lstrip_blocks=True,
        undefined=StrictUndefined,
        keep_trailing_newline=True,
    )


_ENV = _make_env()


def _render(template_name: str, context: dict[str, Any]) -> str:
    return _ENV.get_template(template_name).render(**context)


def _lines(text: str) -> Iterator[tuple[int, str]]:
    """Non-empty lines with comments removed, numbered from 1."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line_no, f"{what} must be an integer, got '{token}'") from None


# ── Instances ──────────────────────────────────────────────────────────

def _parse(text: str, allow_weights: bool) -> tuple[Instance, dict[tuple[str, str], int]]:
    declared: dict[str, tuple[int, int]] = {}
    projects: list[ProjectRecord] = []
    project_lines: dict[str, int] = {}
    prefs: dict[str, tuple[str, ...]] = {}
    pref_lines: dict[str, int] = {}
    weights: dict[tuple[str, str], int] = {}
    weight_lines: dict[tuple[str, str], int] = {}
    last = 0

    for no, line in _lines(text):
        last = no
        keyword = line.split()[0]
        tokens = line.split()
        if keyword in ("applicants", "projects"):
            if keyword in declared:
                raise ParseError(no, f"duplicate '{keyword}' declaration")
            if len(tokens) != 2:
                raise ParseError(no, f"expected '{keyword} <count>'")
            declared[keyword] = (_int(tokens[1], no, "count"), no)
        elif keyword == "project":
            if len(tokens) != 4:
                raise ParseError(no, "expected 'project <id> <lower> <upper>'")
            pid = tokens[1]
            if pid in project_lines:
                raise ParseError(no, f"duplicate project '{pid}'")
            record = ProjectRecord(
                pid, _int(tokens[2], no, "lower quota"), _int(tokens[3], no, "upper quota")
            )
            if record.lower < 0 or record.upper < 0:
                raise ParseError(no, f"negative quota for project '{pid}'")
            record = record.normalized()
            if record.lower > record.upper:
                raise ParseError(
                    no, f"project '{pid}' has lower quota {record.lower} above upper {record.upper}"
                )
            projects.append(record)
            project_lines[pid] = no
        elif keyword == "pref":
            match = _PREF_RE.match(line)
            if match is None:
                raise ParseError(no, "expected 'pref <applicant>: <project> ...'")
            a = match.group(2)
            if a in prefs:
                raise ParseError(no, f"duplicate preference list for '{a}'")
            lst = tuple(match.group(3).split())
            if len(set(lst)) != len(lst):
                raise ParseError(no, f"applicant '{a}' lists a project twice")
            prefs[a] = lst
            pref_lines[a] = no
        elif keyword == "weight" and allow_weights:
            if len(tokens) != 4:
                raise ParseError(no, "expected 'weight <applicant> <project> <w>'")
            edge = (tokens[1], tokens[2])
            if edge in weights:
                raise ParseError(no, f"duplicate weight for {edge}")
            weights[edge] = _int(tokens[3], no, "weight")
            weight_lines[edge] = no
            if weights[edge] < 0:
                raise ParseError(no, "weights must be nonnegative")
        else:
            raise ParseError(no, f"unknown keyword '{keyword}'")

    for keyword, actual in (("applicants", len(prefs)), ("projects", len(projects))):
        if keyword not in declared:
            raise ParseError(last, f"missing '{keyword}' declaration")
        count, no = declared[keyword]
        if count != actual:
            raise ParseError(no, f"declared {count} {keyword} but found {actual}")
    for a, lst in prefs.items():
        unknown = [p for p in lst if p not in project_lines]
        if unknown:
            raise ParseError(pref_lines[a], f"applicant '{a}' lists unknown projects {unknown}")

    inst = Instance(tuple(prefs), tuple(projects), prefs)
    try:
        validate_instance(inst)
    except InstanceError as exc:
        where = pref_lines.get(exc.subject) or project_lines.get(exc.subject) or last
        raise ParseError(where, str(exc)) from exc
    for a, p in weights:
        if not inst.acceptable(a, p):
            raise ParseError(weight_lines[(a, p)], f"weight given for non-edge ({a}, {p})")
    return inst, weights


def parse_instance(text: str) -> Instance:
    return _parse(text, allow_weights=False)[0]


def parse_weighted_instance(text: str) -> WeightedInstance:
    """Instance text plus ``weight <a> <p> <w>`` lines; unlisted edges weigh 0."""
    inst, weights = _parse(text, allow_weights=True)
    return WeightedInstance(inst, weights)


def serialize_instance(inst: Instance | WeightedInstance, header: Optional[str] = None) -> str:
    winst = inst if isinstance(inst, WeightedInstance) else None
    base = winst.base if winst else inst
    weights = [(a, p, w) for (a, p), w in winst.weights.items()] if winst else []
    return _render(
        "instance.txt.j2",
        {
            "header": header,
            "applicants": base.applicants,
            "projects": base.projects,
            "prefs": [(a, "".join(f" {p}" for p in base.prefs[a])) for a in base.applicants],
            "weights": weights,
        },
    )


# ── Matchings ──────────────────────────────────────────────────────────

def parse_matching(text: str, inst: Optional[Instance] = None) -> Matching:
    pairs: dict[str, str] = {}
    for no, line in _lines(text):
        tokens = line.split()
        if tokens[0] != "match" or len(tokens) != 3:
            raise ParseError(no, "expected 'match <applicant> <project>'")
        a, p = tokens[1], tokens[2]
        if a in pairs:
            raise ParseError(no, f"applicant '{a}' matched twice")
        if inst is not None and (a not in inst.prefs or p not in inst.project_map):
            raise ParseError(no, f"unknown identifier in 'match {a} {p}'")
        pairs[a] = p
    return Matching(pairs)


def serialize_matching(M: Matching, inst: Optional[Instance] = None) -> str:
    order = inst.applicants if inst is not None else tuple(M.assignment)
    pairs = [(a, M.project_of(a)) for a in order if M.project_of(a) is not None]
    return _render("matching.txt.j2", {"pairs": pairs})


# ── X3C and roommates ──────────────────────────────────────────────────

def parse_x3c(text: str) -> X3CInstance:
    elements: list[str] = []
    sets: list[frozenset] = []
    for no, line in _lines(text):
        tokens = line.split()
        if tokens[0] == "element" and len(tokens) == 2:
            if tokens[1] in elements:
                raise ParseError(no, f"duplicate element '{tokens[1]}'")
            elements.append(tokens[1])
        elif tokens[0] == "set" and len(tokens) == 4:
            sets.append(frozenset(tokens[1:]))
        else:
            raise ParseError(no, "expected 'element <id>' or 'set <id> <id> <id>'")
    return X3CInstance(tuple(elements), tuple(sets))


def serialize_x3c(x: X3CInstance) -> str:
    order = {e: i for i, e in enumerate(x.elements)}
    return _render(
        "x3c.txt.j2",
        {
            "elements": [str(e) for e in x.elements],
            "sets": [[str(e) for e in sorted(s, key=order.__getitem__)] for s in x.sets],
        },
    )


def parse_roommates(text: str) -> RoommatesInstance:
    prefs: dict[str, tuple[str, ...]] = {}
    for no, line in _lines(text):
        match = _PREF_RE.match(line)
        if match is None or match.group(1) != "vertex":
            raise ParseError(no, "expected 'vertex <id>: <neighbor> ...'")
        v = match.group(2)
        if v in prefs:
            raise ParseError(no, f"duplicate vertex '{v}'")
        prefs[v] = tuple(match.group(3).split())
    r = RoommatesInstance(tuple(prefs), prefs)
    try:
        r.validate()
    except InstanceError as exc:
        raise ParseError(no if prefs else 0, str(exc)) from exc
    return r


def serialize_roommates(r: RoommatesInstance) -> str:
    return _render(
        "roommates.txt.j2",
        {"prefs": [(v, "".join(f" {u}" for u in r.prefs[v])) for v in r.vertices]},
    )
