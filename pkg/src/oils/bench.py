"""Experiment drivers for the tightness, unsolvability and shaving tables.

Every driver takes an :class:`ExperimentConfig` and returns a
:class:`TableResult`: one aggregate row per configuration (written as CSV)
plus the per-trial records the aggregates were computed from. Trial ``t`` of
a run with master seed ``s`` draws its system from
``default_rng([s, t, 0])`` and its subsquare choices from
``default_rng([s, t, 1])``, so any row can be regenerated from its
``seed`` column alone, and the shifted and centered generators see the same
point systems.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import AllSubsquaresInconclusive, BudgetExceeded, DimensionCap, NotContracting, SingularMidpoint
from .generate import GeneratedSystem, generate_random_system
from .hull import exact_hull
from .interval import IntervalMatrix, IntervalVector, v_metric, w_metric
from .square import DEFAULT_EPS, DEFAULT_MAX_ITER, Status, initial_enclosure, precondition, solve_square
from .subsquares import (
    Budget,
    default_overlap,
    parallel_sequential_solve,
    sequential_solve,
    simple_solve,
)

DEFAULT_RADIUS = 0.01
DEFAULT_SEED = 0
TABLE1_SIZES = ((5, 3), (9, 5))
TABLE3_SIZES = ((15, 10), (35, 23), (50, 35), (100, 87))
TABLE3_RADII = (0.01, 0.001, 0.0001)
TABLE3_BUDGET = Budget.random(100)
TABLE4_SIZES = ((15, 10), (25, 13), (37, 20))
TABLE4_RADII = (0.1, 0.25, 0.35, 0.5)
DEFAULT_REDRAWS = 10
DEFAULT_INFLATE = 4.0
# systems whose starting box cannot be computed are redrawn, up to this many per trial
X0_ATTEMPTS_PER_TRIAL = 20
X0_SOURCES = ("augmented", "subsquare")
MODES = ("simple", "sequential", "parallel")


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    n: int
    radius: float = DEFAULT_RADIUS
    overlap: int | None = None
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    trials: int = 10
    seed: int = DEFAULT_SEED
    mode: str = "sequential"
    budget: Budget | None = None
    workers: int = 1
    centered: bool = False
    x0_source: str = "augmented"
    inflate: float = DEFAULT_INFLATE
    redraws: int = DEFAULT_REDRAWS

    def __post_init__(self):
        if not (self.m >= self.n >= 1):
            raise ValueError(f"need m >= n >= 1, got {self.m} x {self.n}")
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.x0_source not in X0_SOURCES:
            raise ValueError(f"x0 source must be one of {X0_SOURCES}")
        if self.redraws < 1:
            raise ValueError("redraws must be >= 1")

    @property
    def effective_overlap(self) -> int:
        return default_overlap(self.n) if self.overlap is None else self.overlap

    def columns(self) -> dict:
        """Config fields as CSV columns."""
        d = asdict(self)
        d["overlap"] = self.effective_overlap
        d["budget"] = "" if self.budget is None else str(self.budget)
        d["system"] = f"{self.m}x{self.n}"
        return d


@dataclass
class TableResult:
    rows: list[dict]
    trials: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        out = io.StringIO()
        header = list(self.rows[0])
        for row in self.rows[1:]:
            header += [k for k in row if k not in header]
        writer = csv.DictWriter(out, fieldnames=header, lineterminator="\n", restval="")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
        return out.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def trial_rngs(seed: int, trial: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent streams for system generation and for the solver."""
    return np.random.default_rng([seed, trial, 0]), np.random.default_rng([seed, trial, 1])


def _mean(values: Sequence[float]) -> float:
    return float(np.mean(values)) if len(values) else math.nan


# starting boxes for the shaving experiments


def augmented_x0(A: IntervalMatrix, b: IntervalVector, eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER):
    """Verified box from the square system ``[[A, -I], [0, A^T]] (x, y) = (b, 0)``.

    Every solution of ``A' x = b'`` solves it with ``y = 0``, so the
    ``x`` part of its enclosure contains the united solution set. Returns
    ``None`` when the square solver is inconclusive.
    """
    m, n = A.shape
    size = m + n
    lo = np.zeros((size, size))
    hi = np.zeros((size, size))
    lo[:m, :n], hi[:m, :n] = A.lo, A.hi
    lo[:m, n:] = hi[:m, n:] = -np.eye(m)
    lo[m:, n:], hi[m:, n:] = A.lo.T, A.hi.T
    rhs_lo = np.concatenate([b.lo, np.zeros(n)])
    rhs_hi = np.concatenate([b.hi, np.zeros(n)])
    out = solve_square(IntervalMatrix(lo, hi), IntervalVector(rhs_lo, rhs_hi), eps, max_iter)
    if out.status is not Status.ENCLOSURE:
        return None
    return out.box.take(np.arange(n))


def subsquare_x0(A: IntervalMatrix, b: IntervalVector, rng: np.random.Generator, inflate: float = DEFAULT_INFLATE):
    """A-priori bound of one random subsquare, inflated about its midpoint."""
    m, n = A.shape
    for rows in (sorted(rng.choice(m, size=n, replace=False)) for _ in range(10)):
        try:
            P = precondition(A.rows(rows), b.take(rows), rows)
            return initial_enclosure(P).inflate(inflate)
        except (SingularMidpoint, NotContracting):
            continue
    return None


def _x0(cfg: ExperimentConfig, g: GeneratedSystem, rng) -> IntervalVector | None:
    if cfg.x0_source == "augmented":
        return augmented_x0(g.A, g.b, cfg.eps, cfg.max_iter)
    return subsquare_x0(g.A, g.b, rng, cfg.inflate)


def run_solver(cfg: ExperimentConfig, A, b, x0, rng):
    if cfg.mode == "simple":
        return simple_solve(A, b, cfg.budget, cfg.eps, cfg.max_iter, rng)
    if cfg.mode == "parallel":
        return parallel_sequential_solve(A, b, x0, cfg.overlap, cfg.eps, cfg.max_iter, rng, cfg.workers)
    return sequential_solve(A, b, x0, cfg.overlap, cfg.eps, cfg.max_iter, rng)


# table drivers


def run_table1(cfg: ExperimentConfig) -> TableResult:
    """All-subsquares simple method against the exact hull: W and V ratios."""
    trials, w_ratios, v_ratios = [], [], []
    error = ""
    for t in range(cfg.trials):
        grng, srng = trial_rngs(cfg.seed, t)
        g = generate_random_system(cfg.m, cfg.n, cfg.radius, grng, centered=cfg.centered)
        try:
            out = simple_solve(g.A, g.b, Budget.all(), cfg.eps, cfg.max_iter, srng)
            hull = exact_hull(g.A, g.b)
        except (BudgetExceeded, DimensionCap) as exc:
            error = f"{type(exc).__name__}: {exc}"
            break
        rec = {"trial": t, "status": out.status.value, "w_ratio": math.nan, "v_ratio": math.nan}
        if out.status is Status.ENCLOSURE and hull.box is not None:
            rec["w_ratio"] = w_metric(out.box) / w_metric(hull.box)
            v_hull = v_metric(hull.box)
            rec["v_ratio"] = v_metric(out.box) / v_hull if v_hull > 0 else math.nan
            w_ratios.append(rec["w_ratio"])
            if not math.isnan(rec["v_ratio"]):
                v_ratios.append(rec["v_ratio"])
        trials.append(rec)
    row = {
        **cfg.columns(),
        "av_w_ratio": _mean(w_ratios),
        "av_v_ratio": _mean(v_ratios),
        "counted": len(w_ratios),
        "error": error,
    }
    return TableResult([row], trials)


def run_table3(cfg: ExperimentConfig) -> TableResult:
    """Mean number of random subsquares solved before an empty intersection.

    Systems come from the inconsistent generator (right-hand side drawn
    independently of the matrix). Trials where the budget runs out without
    detection are counted in ``undetected`` and left out of the mean.
    """
    budget = cfg.budget or TABLE3_BUDGET
    counts, trials = [], []
    for t in range(cfg.trials):
        grng, srng = trial_rngs(cfg.seed, t)
        g = generate_random_system(cfg.m, cfg.n, cfg.radius, grng, centered=cfg.centered, consistent=False)
        start = time.perf_counter()
        out = simple_solve(g.A, g.b, budget, cfg.eps, cfg.max_iter, srng)
        elapsed = time.perf_counter() - start
        detected = out.status is Status.PROVEN_UNSOLVABLE
        if detected:
            counts.append(out.subsquares_used)
        trials.append(
            {"trial": t, "detected": detected, "subsquares_used": out.subsquares_used, "seconds": elapsed}
        )
    row = {
        **replace(cfg, budget=budget).columns(),
        "mean_subsquares": _mean(counts),
        "detected": len(counts),
        "undetected": cfg.trials - len(counts),
    }
    return TableResult([row], trials)


def run_table4(cfg: ExperimentConfig) -> TableResult:
    """Shave a verified starting box with the sequential method.

    For each system, ``cfg.redraws`` random subsquare selections are run
    from the same starting box ``X0``. Reported: the mean of ``W(out)/W(X0)``
    over all runs, the mean over systems of the best (smallest) ratio, and
    wall-clock times. Systems whose ``X0`` cannot be computed are replaced by
    fresh draws and counted in ``x0_failures``.
    """
    ratios, best, t_x0, t_solve, trials = [], [], [], [], []
    x0_failures = inconclusive = 0
    for t in range(cfg.trials):
        for attempt in range(X0_ATTEMPTS_PER_TRIAL):
            grng, srng = trial_rngs(cfg.seed, t + attempt * cfg.trials * 1_000_003)
            g = generate_random_system(cfg.m, cfg.n, cfg.radius, grng, centered=cfg.centered)
            start = time.perf_counter()
            X0 = _x0(cfg, g, srng)
            elapsed = time.perf_counter() - start
            if X0 is not None and w_metric(X0) > 0:
                break
            x0_failures += 1
        else:
            trials.append({"trial": t, "x0": "failed"})
            continue
        t_x0.append(elapsed)
        per_system = []
        for _ in range(cfg.redraws):
            start = time.perf_counter()
            try:
                out = run_solver(cfg, g.A, g.b, X0, srng)
            except AllSubsquaresInconclusive:
                inconclusive += 1
                continue
            t_solve.append(time.perf_counter() - start)
            if out.status is Status.ENCLOSURE:
                per_system.append(w_metric(out.box) / w_metric(X0))
        if per_system:
            ratios += per_system
            best.append(min(per_system))
        trials.append({"trial": t, "x0_width": w_metric(X0), "ratios": per_system})
    row = {
        **cfg.columns(),
        "av_ratio": _mean(ratios),
        "av_best_ratio": _mean(best),
        "max_ratio": max(ratios) if ratios else math.nan,
        "systems": len(best),
        "x0_failures": x0_failures,
        "inconclusive": inconclusive,
        "t_x0": _mean(t_x0),
        "t_subsq": _mean(t_solve),
    }
    return TableResult([row], trials)


def run_table5(cfg: ExperimentConfig) -> TableResult:
    """As :func:`run_table4` with intervals centered on the planted point system."""
    return run_table4(replace(cfg, centered=True))


def run_grid(driver: Callable[[ExperimentConfig], TableResult], configs: Sequence[ExperimentConfig]) -> TableResult:
    rows, trials = [], []
    for cfg in configs:
        res = driver(cfg)
        rows += res.rows
        trials += [dict(rec, system=f"{cfg.m}x{cfg.n}", radius=cfg.radius) for rec in res.trials]
    return TableResult(rows, trials)
