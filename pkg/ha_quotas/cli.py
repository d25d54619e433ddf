"""Command-line entry point (``ha-quotas`` command).

Exit codes: 0 = yes / witness printed, 1 = no (prints ``NONE``), 2 = error.
Answers go to stdout in the matching or instance format; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from omegaconf import OmegaConf

from ha_quotas.config.hydra_utils import guard_overrides, guards_from_config
from ha_quotas.config.schemas import GuardsSchema
from ha_quotas.core.errors import HAQuotasError
from ha_quotas.core.instance import Instance, Matching, validate_instance
from ha_quotas.generators.random_instances import gen_condorcet, gen_random, gen_random_weights
from ha_quotas.generators.roommates import gen_pop_from_roommates
from ha_quotas.generators.x3c import gen_perpo_x3c, gen_pop_x3c, gen_popv_x3c, normalize_x3c
from ha_quotas.solvers.gadgets import max_weight_lq2, solve_lq2
from ha_quotas.solvers.open_set import (
    OpenSet,
    max_weight_fpt,
    max_weight_with_open_set,
    solve_flow,
    solve_fpt,
)
from ha_quotas.solvers.oracle import oracle_exists, oracle_max_weight, oracle_verify
from ha_quotas.solvers.weighted import WeightedInstance, reduce_perpo
from ha_quotas.utils.parsers import (
    parse_instance,
    parse_matching,
    parse_roommates,
    parse_weighted_instance,
    parse_x3c,
    serialize_instance,
    serialize_matching,
)

log = logging.getLogger(__name__)

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2

METHODS = ("oracle", "lq2", "fpt", "flow")


class UsageError(Exception):
    """Flag combination the chosen subcommand cannot serve."""


# ── Config ────────────────────────────────────────────────────────────────────

def _repo_conf_dir() -> str:
    """Return the conf/ directory, whether running from the repo or installed."""
    for candidate in [
        Path(__file__).parents[1] / "conf",
        Path(sys.prefix) / "share" / "ha-quotas" / "conf",
    ]:
        if candidate.is_dir():
            return str(candidate)
    raise FileNotFoundError(
        "Cannot locate the conf/ directory. Run 'pip install -e .' from the repository root."
    )


def _load_hydra_cfg(conf_dir: str, overrides: list[str]) -> object:
    from hydra import compose, initialize_config_dir
    from hydra.core.global_hydra import GlobalHydra

    GlobalHydra.instance().clear()
    with initialize_config_dir(config_dir=conf_dir, version_base=None, job_name="ha-quotas"):
        cfg = compose(config_name="config", overrides=overrides)
    return cfg


def _load_guards(params: list[tuple[str, str]]) -> GuardsSchema:
    overrides = guard_overrides(params)
    try:
        conf_dir = _repo_conf_dir()
    except FileNotFoundError as exc:
        log.warning("%s Falling back to default guards.", exc)
        return guards_from_config(OmegaConf.from_dotlist(overrides))
    return guards_from_config(_load_hydra_cfg(conf_dir, overrides))


# ── I/O helpers ───────────────────────────────────────────────────────────────

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _open_set(raw: Optional[str]) -> Optional[OpenSet]:
    if raw is None:
        return None
    return OpenSet.of(p.strip() for p in raw.split(",") if p.strip())


def _answer(M: Optional[Matching], inst: Instance, weight: Optional[int] = None) -> int:
    if M is None:
        print("NONE")
        return EXIT_NO
    if weight is not None:
        print(f"# weight {weight}")
    sys.stdout.write(serialize_matching(M, inst))
    return EXIT_YES


def _require(method: str, allowed: tuple[str, ...], command: str) -> None:
    if method not in allowed:
        raise UsageError(f"--method {method} is not available for '{command}'; use {'|'.join(allowed)}")


# ── Subcommands ───────────────────────────────────────────────────────────────

def _cmd_validate(args: argparse.Namespace, guards: GuardsSchema) -> int:
    inst = parse_instance(_read(args.instance))
    validate_instance(inst)
    print(f"OK applicants={inst.n} projects={inst.m} l_max={inst.l_max} u_max={inst.u_max}")
    return EXIT_YES


def _cmd_solve(args: argparse.Namespace, guards: GuardsSchema) -> int:
    inst = parse_instance(_read(args.instance))
    _require(args.method, ("oracle", "lq2", "fpt"), "solve")
    if args.method == "lq2":
        return _answer(solve_lq2(inst, args.problem), inst)
    if args.method == "fpt":
        return _answer(solve_fpt(inst, args.problem, guards=guards), inst)

    if args.problem == "perpo":
        return _answer(oracle_exists(inst, "perfect_pareto", guards, args.force), inst)
    result = oracle_max_weight(reduce_perpo(inst), guards, args.force)
    return _answer(result[1] if result else None, inst)


def _cmd_verify(args: argparse.Namespace, guards: GuardsSchema) -> int:
    inst = parse_instance(_read(args.instance))
    M = parse_matching(_read(args.matching), inst)
    mode = "popv" if args.property == "popular" else "pov"
    open_set = _open_set(args.open)
    if open_set is not None:
        _require(args.method, ("oracle", "flow"), "verify --open")

    if args.method == "oracle":
        restriction = open_set.projects if open_set is not None else None
        return _answer(oracle_verify(inst, M, args.property, guards, args.force, restriction), inst)
    if args.method == "lq2":
        return _answer(solve_lq2(inst, mode, M), inst)
    if args.method == "fpt":
        return _answer(solve_fpt(inst, mode, M, guards), inst)
    return _answer(solve_flow(inst, mode, M, open_set, guards), inst)


def _cmd_exists(args: argparse.Namespace, guards: GuardsSchema) -> int:
    inst = parse_instance(_read(args.instance))
    mode = "popular" if args.property == "popular" else "perfect_pareto"
    return _answer(oracle_exists(inst, mode, guards, args.force), inst)


def _cmd_maxweight(args: argparse.Namespace, guards: GuardsSchema) -> int:
    winst = parse_weighted_instance(_read(args.instance))
    inst = winst.base
    open_set = _open_set(args.open)
    if open_set is not None:
        _require(args.method, ("oracle", "flow"), "maxweight --open")
    elif args.method == "flow":
        raise UsageError("--method flow needs --open p1,p2,...")

    if args.method == "oracle":
        restriction = open_set.projects if open_set is not None else None
        result = oracle_max_weight(winst, guards, args.force, restriction)
    elif args.method == "lq2":
        result = max_weight_lq2(winst)
    elif args.method == "fpt":
        result = max_weight_fpt(winst, guards)
    else:
        result = max_weight_with_open_set(winst, open_set)
    if result is None:
        return _answer(None, inst)
    return _answer(result[1], inst, weight=result[0])


def _emit(inst: Instance | WeightedInstance, header: str) -> int:
    sys.stdout.write(serialize_instance(inst, header=header))
    return EXIT_YES


def _cmd_gen(args: argparse.Namespace, guards: GuardsSchema) -> int:
    kind = args.kind
    if kind == "condorcet":
        return _emit(gen_condorcet(args.variant), f"condorcet {args.variant}")
    if kind == "random":
        inst = gen_random(args.seed, args.n, args.m, args.quota_max, tuple(args.list_len))
        if args.max_weight is not None:
            return _emit(
                gen_random_weights(inst, args.seed, args.max_weight), f"random seed={args.seed}"
            )
        return _emit(inst, f"random seed={args.seed}")
    if args.input is None:
        raise UsageError(f"gen {kind} needs -i <file>")
    if kind == "roommates":
        return _emit(gen_pop_from_roommates(parse_roommates(_read(args.input))), "roommates")

    x = parse_x3c(_read(args.input))
    if args.normalize:
        x = normalize_x3c(x)
    if kind == "x3c-perpo":
        return _emit(gen_perpo_x3c(x), "x3c-perpo")
    if kind == "x3c-pop":
        return _emit(gen_pop_x3c(x), "x3c-pop")

    inst, M = gen_popv_x3c(x)
    if args.matching_out:
        Path(args.matching_out).write_text(serialize_matching(M, inst), encoding="utf-8")
    return _emit(inst, "x3c-popv")


_COMMANDS = {
    "validate": _cmd_validate,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "exists": _cmd_exists,
    "maxweight": _cmd_maxweight,
    "gen": _cmd_gen,
}


# ── Parser ────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument(
        "--param",
        nargs=2,
        action="append",
        default=[],
        metavar=("NAME", "VALUE"),
        help="guard override, e.g. --param mquota-guard 14 or --param oracle-guard 10",
    )
    common.add_argument("--force", action="store_true", help="run the oracle past its guard")

    parser = argparse.ArgumentParser(
        prog="ha-quotas",
        description="House allocation with lower and upper quotas: solvers, verifiers, generators",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=(
            "Examples:\n"
            "  ha-quotas verify popular -i obs1.txt -m diag.txt\n"
            "  ha-quotas solve perpo -i inst.txt --method lq2\n"
            "  ha-quotas gen condorcet --variant lq3\n"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_method(p: argparse.ArgumentParser, default: str) -> None:
        p.add_argument("--method", choices=METHODS, default=default)

    p = sub.add_parser("validate", parents=[common], help="check an instance file")
    p.add_argument("-i", "--instance", required=True)

    p = sub.add_parser("solve", parents=[common], help="find a perfect / max-cardinality PO matching")
    p.add_argument("problem", choices=["perpo", "pareto"])
    p.add_argument("-i", "--instance", required=True)
    with_method(p, "fpt")

    p = sub.add_parser("verify", parents=[common], help="look for a witness against a matching")
    p.add_argument("property", choices=["popular", "pareto"])
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("-m", "--matching", required=True)
    p.add_argument("--open", default=None, metavar="P1,P2", help="fixed set of open projects")
    with_method(p, "oracle")

    p = sub.add_parser("exists", parents=[common], help="oracle existence check")
    p.add_argument("property", choices=["popular", "perfect-pareto"])
    p.add_argument("-i", "--instance", required=True)

    p = sub.add_parser("maxweight", parents=[common], help="maximum-weight feasible matching")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--open", default=None, metavar="P1,P2", help="fixed set of open projects")
    with_method(p, "fpt")

    p = sub.add_parser("gen", parents=[common], help="print a generated instance")
    p.add_argument(
        "kind", choices=["condorcet", "x3c-popv", "x3c-perpo", "x3c-pop", "roommates", "random"]
    )
    p.add_argument("-i", "--input", default=None, help="X3C or roommates file")
    p.add_argument("--variant", choices=["unit", "lq3"], default="unit")
    p.add_argument("--normalize", action="store_true", help="pad the X3C input first")
    p.add_argument("--matching-out", default=None, help="x3c-popv: write the reference matching here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--quota-max", type=int, default=2)
    p.add_argument("--list-len", type=int, nargs=2, default=[0, None], metavar=("MIN", "MAX"))
    p.add_argument("--max-weight", type=int, default=None, help="also emit weight lines")
    return parser


# ── Entry point ───────────────────────────────────────────────────────────────

def run_command(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        guards = _load_guards([tuple(p) for p in args.param])
        return _COMMANDS[args.command](args, guards)
    except (HAQuotasError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
