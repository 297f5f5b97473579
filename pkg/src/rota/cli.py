"""Command-line driver: ``gen``, ``solve``, ``verify`` and ``check``.

Exit codes: 0 success, 1 validation failure, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .family import FamilyError, RainbowFamily
from .instances import (
    InstanceError,
    generate_instance,
    parse_family,
    parse_instance,
    serialize_family,
    serialize_instance,
)
from .suites import SUITES, run_suite
from .switching import SolverParams, solve

EXIT_OK, EXIT_INVALID, EXIT_MALFORMED = 0, 1, 2

CSV_FIELDS = ["iteration", "volume", "min_colour_count", "min_set_size", "witness_depth", "inserted", "removed"]

log = logging.getLogger("rota")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_instance(path: str):
    try:
        return parse_instance(_read(path))
    except InstanceError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_family(path: str, instance) -> RainbowFamily:
    try:
        sets = parse_family(_read(path))
    except InstanceError as exc:
        raise InputError(f"{path}: {exc}") from None
    return RainbowFamily(instance, tuple(sets))


def cmd_gen(args) -> int:
    try:
        inst = generate_instance(args.kind, args.n, args.seed)
    except InstanceError as exc:
        raise InputError(str(exc)) from None
    _write(args.out, serialize_instance(inst))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load_instance(args.input)
    try:
        params = SolverParams(
            args.epsilon, r0=args.r0, ell=args.ell, k=args.k, m=args.family_size, max_iterations=args.max_iters
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    initial = RainbowFamily.empty(inst, params.family_size(inst.n)) if args.init == "empty" else None
    family, stats = solve(inst, params, initial=initial)
    _write(args.stats_out, json.dumps(stats.to_dict(include_timing=args.timing), indent=2) + "\n")
    if args.family_out:
        _write(args.family_out, serialize_family(family.sets))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(stats.iterations)
    s = stats.summary()
    print(
        f"volume {s['volume']}/{s['n_squared']} (greedy {s['initial_volume']}), "
        f"{s['iterations']} iterations, status {s['status']}, {stats.wall_time:.2f}s",
        file=sys.stderr,
    )
    return EXIT_INVALID if stats.status == "diagnostic" else EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.input)
    family = _load_family(args.family, inst)
    problems = family.problems()
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    counts = family.colour_counts()
    print(f"valid family: {family.m} sets, volume {family.volume}")
    print("colour counts: " + " ".join(str(c) for c in counts))
    return EXIT_OK


def cmd_check(args) -> int:
    if args.trials < 0:
        raise InputError("--trials must be nonnegative")
    result = run_suite(args.lemma, args.trials, args.seed)
    for f in result.failures[:20]:
        print(f"FAIL {f}", file=sys.stderr)
    print(("PASS " if result.passed else "FAIL ") + result.line())
    return EXIT_OK if result.passed else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rota", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random Rota instance")
    p.add_argument("--kind", required=True, choices=["uniform", "graphic", "linear"])
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    desk = SolverParams.desk()
    p = sub.add_parser("solve", help="run the lexicographic improvement solver")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--epsilon", required=True, type=float)
    p.add_argument("--r0", type=int, default=desk.r0)
    p.add_argument("--ell", type=int, default=desk.ell)
    p.add_argument("--k", type=int, default=desk.k)
    p.add_argument("--family-size", type=int, default=None, help="number of sets (default ceil((1-eps) n))")
    p.add_argument("--max-iters", type=int, default=desk.max_iterations)
    p.add_argument("--init", choices=["greedy", "empty"], default="greedy", help="starting family")
    p.add_argument("--stats-out", required=True)
    p.add_argument("--family-out")
    p.add_argument("--csv", help="also write the iteration table as CSV")
    p.add_argument("--timing", action="store_true", help="include wall time in the stats file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="validate a family file against an instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--family", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", help="run a randomized oracle suite")
    p.add_argument("--lemma", required=True, choices=sorted(SUITES))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_MALFORMED
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except FamilyError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_command())
