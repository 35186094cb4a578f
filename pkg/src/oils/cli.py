"""Command-line interface: solve, gen, bench and hull.

Exit codes: 0 enclosure found, 2 proven unsolvable, 3 inconclusive,
1 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys
from dataclasses import replace
from typing import Sequence

import numpy as np

from . import bench
from .errors import AllSubsquaresInconclusive, BudgetExceeded, DimensionCap, OilsError, SystemFileError
from .generate import generate_random_system
from .hull import DEFAULT_N_CAP, exact_hull
from .interval import IntervalVector
from .square import DEFAULT_EPS, DEFAULT_MAX_ITER, Status
from .subsquares import Budget, parallel_sequential_solve, sequential_solve, simple_solve
from .sysfile import dumps, load

SEED_ENV = "SUBSQ_SEED"
EXIT_OK, EXIT_ERROR, EXIT_UNSOLVABLE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
EXIT_CODES = {
    Status.ENCLOSURE: EXIT_OK,
    Status.PROVEN_UNSOLVABLE: EXIT_UNSOLVABLE,
    Status.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage, which would read as 'unsolvable'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return secrets.randbits(63)


def _json_float(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _box_json(box: IntervalVector):
    if box.is_empty:
        return None
    return [[_json_float(float(a)), _json_float(float(b))] for a, b in zip(box.lo, box.hi)]


def _parse_box(text: str, n: int) -> IntervalVector:
    try:
        pairs = json.loads(text)
        box = IntervalVector.from_pairs([[float(a), float(b)] for a, b in pairs])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--x0 must be a JSON list of [lo, hi] pairs: {exc}") from None
    if len(box) != n:
        raise UsageError(f"--x0 has {len(box)} components, system has {n} unknowns")
    return box


def _budget(text: str | None) -> Budget | None:
    if text is None:
        return None
    try:
        return Budget.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _radii(text: str | None, default: Sequence[float]) -> list[float]:
    if text is None:
        return list(default)
    try:
        return [float(r) for r in text.split(",")]
    except ValueError:
        raise UsageError(f"--radius expects comma-separated numbers, got {text!r}") from None


def _sizes(text: str | None, default) -> list[tuple[int, int]]:
    if text is None:
        return list(default)
    out = []
    for part in text.split(","):
        try:
            m, n = (int(v) for v in part.lower().split("x"))
        except ValueError:
            raise UsageError(f"--sizes expects entries like 15x10, got {part!r}") from None
        out.append((m, n))
    return out


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--overlap", type=int, default=None, help="rows shared between consecutive subsquares")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="endpoint convergence tolerance")
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="iteration or round cap")
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default: ${SEED_ENV}, else random)")
    p.add_argument("--workers", type=int, default=1, help="threads; more than 1 selects the parallel solver")
    p.add_argument("--budget", default=None, help="simple mode: 'all', 'random:K' or K")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oils", description="Subsquares solver for overdetermined interval linear systems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="enclose the solution set of a system file")
    p.add_argument("file", help="system file ('-' for stdin)")
    p.add_argument("--mode", choices=bench.MODES, default="simple")
    p.add_argument("--x0", default=None, help="starting box as JSON, e.g. '[[0, 3]]' (default: auto)")
    p.add_argument("--sweep", choices=("gs", "jacobi"), default="gs", help="sequential-mode sweep")
    _add_solver_flags(p)

    p = sub.add_parser("gen", help="write a random system file")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--radius", type=float, default=bench.DEFAULT_RADIUS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--centered", action="store_true", help="do not shift intervals off the point system")
    p.add_argument("--inconsistent", action="store_true", help="draw b independently of A (usually unsolvable)")
    p.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")

    p = sub.add_parser("bench", help="run an experiment table and print CSV")
    p.add_argument("table", choices=("table1", "table3", "table4", "table5"))
    p.add_argument("--sizes", default=None, help="comma-separated MxN list")
    p.add_argument("--radius", default=None, help="comma-separated radii")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--mode", choices=bench.MODES, default="sequential", help="solver for table4/table5")
    p.add_argument("--x0-source", choices=bench.X0_SOURCES, default="augmented")
    p.add_argument("--inflate", type=float, default=bench.DEFAULT_INFLATE, help="subsquare x0 inflation factor")
    p.add_argument("--redraws", type=int, default=bench.DEFAULT_REDRAWS, help="subsquare selections per system")
    p.add_argument("--timings", action="store_true", help="include wall-clock columns (not reproducible)")
    p.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
    _add_solver_flags(p)

    p = sub.add_parser("hull", help="exact interval hull of a small system")
    p.add_argument("file", help="system file ('-' for stdin)")
    p.add_argument("--n-cap", type=int, default=DEFAULT_N_CAP)
    return parser


def _read_system(path: str):
    try:
        return load(sys.stdin if path == "-" else path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def cmd_solve(args) -> int:
    A, b = _read_system(args.file)
    n = A.shape[1]
    seed = _resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    x0 = _parse_box(args.x0, n) if args.x0 else None
    mode = "parallel" if args.workers > 1 else args.mode
    try:
        if mode == "simple":
            out = simple_solve(A, b, _budget(args.budget), args.eps, args.max_iter, rng, x0=x0)
        elif mode == "sequential":
            out = sequential_solve(A, b, x0 or "auto", args.overlap, args.eps, args.max_iter, rng, args.sweep)
        else:
            out = parallel_sequential_solve(
                A, b, x0 or "auto", args.overlap, args.eps, args.max_iter, rng, args.workers
            )
        record = {
            "status": out.status.value,
            "box": _box_json(out.box),
            "iterations": out.iterations,
            "subsquares_used": out.subsquares_used,
            "seed": seed,
            "mode": mode,
        }
        if out.reason:
            record["reason"] = out.reason
        status = out.status
    except AllSubsquaresInconclusive as exc:
        status = Status.INCONCLUSIVE
        record = {
            "status": status.value, "box": None, "iterations": 0, "subsquares_used": 0,
            "seed": seed, "mode": mode, "reason": str(exc),
        }
    print(json.dumps(record))
    return EXIT_CODES[status]


def cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    g = generate_random_system(
        args.m, args.n, args.radius, np.random.default_rng(seed),
        centered=args.centered, consistent=not args.inconsistent,
    )
    comment = f"seed {seed} radius {args.radius!r} centered {args.centered} consistent {g.consistent}"
    if g.consistent:
        comment += "\nplanted x* " + " ".join(float(v).hex() for v in g.x_star)
    _write(dumps(g.A, g.b, comment), args.output)
    return EXIT_OK


_BENCH = {
    "table1": (bench.run_table1, bench.TABLE1_SIZES, (bench.DEFAULT_RADIUS,), 50),
    "table3": (bench.run_table3, bench.TABLE3_SIZES, bench.TABLE3_RADII, 20),
    "table4": (bench.run_table4, bench.TABLE4_SIZES, bench.TABLE4_RADII, 30),
    "table5": (bench.run_table5, bench.TABLE4_SIZES, bench.TABLE4_RADII, 30),
}
_TIMING_COLUMNS = ("t_x0", "t_subsq")


def cmd_bench(args) -> int:
    driver, sizes, radii, trials = _BENCH[args.table]
    seed = _resolve_seed(args.seed)
    mode = "parallel" if args.workers > 1 else args.mode
    try:
        configs = [
            bench.ExperimentConfig(
                m, n, r, overlap=args.overlap, eps=args.eps, max_iter=args.max_iter,
                trials=args.trials or trials, seed=seed, mode=mode, budget=_budget(args.budget),
                workers=args.workers, x0_source=args.x0_source, inflate=args.inflate, redraws=args.redraws,
            )
            for m, n in _sizes(args.sizes, sizes)
            for r in _radii(args.radius, radii)
        ]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = bench.run_grid(driver, configs)
    if not args.timings:
        result.rows = [{k: v for k, v in row.items() if k not in _TIMING_COLUMNS} for row in result.rows]
    _write(result.to_csv(), args.output)
    return EXIT_OK


def cmd_hull(args) -> int:
    A, b = _read_system(args.file)
    res = exact_hull(A, b, args.n_cap)
    record = {
        "status": "Infeasible" if res.infeasible else "Hull",
        "box": None if res.infeasible else _box_json(res.box),
        "orthants_visited": res.orthants_visited,
    }
    print(json.dumps(record))
    return EXIT_UNSOLVABLE if res.infeasible else EXIT_OK


COMMANDS = {"solve": cmd_solve, "gen": cmd_gen, "bench": cmd_bench, "hull": cmd_hull}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SystemFileError, BudgetExceeded, DimensionCap) as exc:
        print(f"oils {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OilsError, ValueError) as exc:
        print(f"oils {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
