"""Subsquare selection and the simple, sequential and parallel solvers.

The solution set of an overdetermined system lies inside the solution set
of every square subsystem built from ``n`` of its rows. The solvers below
enclose those square subsystems and combine their enclosures, either by
plain intersection (:func:`simple_solve`) or by interleaving Gauss-Seidel
sweeps of several subsquares on one shared box (:func:`sequential_solve`).

Row indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import (
    AllSubsquaresInconclusive,
    BudgetExceeded,
    InvalidOverlap,
    NotContracting,
    ShapeMismatch,
    SingularMidpoint,
)
from .interval import IntervalMatrix, IntervalVector
from .shared import SharedBox
from .square import (
    DEFAULT_EPS,
    DEFAULT_MAX_ITER,
    PreconditionedSystem,
    Status,
    gs_sweep,
    has_converged,
    initial_enclosure,
    jacobi_sweep,
    precondition,
    solve_square,
)

ALL_SUBSQUARES_CAP = 5000
RANDOM_BUDGET_FACTOR = 3


@dataclass(frozen=True)
class SubsquareSelection:
    sets: tuple[tuple[int, ...], ...]
    overlap: int

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def covered(self) -> set[int]:
        return set().union(*self.sets) if self.sets else set()


@dataclass
class SolveOutcome:
    status: Status
    box: IntervalVector
    subsquares_used: int = 0
    iterations: int = 0
    inconclusive: int = 0
    reason: str = ""
    subsquare_boxes: list = field(default_factory=list, repr=False)
    history: list | None = field(default=None, repr=False)


@dataclass(frozen=True)
class Budget:
    """How many subsquares :func:`simple_solve` may solve.

    ``Budget.all()`` solves every ``C(m, n)`` subsquare; ``Budget.random(k)``
    solves ``k`` distinct random ones.
    """

    k: int | None = None

    @classmethod
    def all(cls) -> Budget:
        return cls(None)

    @classmethod
    def random(cls, k: int) -> Budget:
        if k < 1:
            raise ValueError("random budget must be at least 1")
        return cls(k)

    @property
    def is_all(self) -> bool:
        return self.k is None

    @classmethod
    def parse(cls, text: str) -> Budget:
        text = text.strip().lower()
        if text == "all":
            return cls.all()
        if text.startswith("random:"):
            text = text.split(":", 1)[1]
        return cls.random(int(text))

    def __str__(self) -> str:
        return "all" if self.is_all else f"random:{self.k}"


def default_overlap(n: int) -> int:
    """Roughly a third of the rows are shared; always in ``[0, n - 1]``."""
    return min(max(1, n // 3), n - 1)


def _validate(m: int, n: int, overlap: int) -> None:
    if n < 1 or m < n:
        raise ValueError(f"need m >= n >= 1, got m={m}, n={n}")
    if not 0 <= overlap < n:
        raise InvalidOverlap(f"overlap must lie in [0, {n - 1}], got {overlap}")


def count_subsquares(m: int, n: int, overlap: int) -> int:
    """Number of subsquares :func:`choose_subsquares` returns."""
    _validate(m, n, overlap)
    return 1 + math.ceil((m - n) / (n - overlap))


def _randsel(k: int, pool: Sequence[int], rng: np.random.Generator) -> list[int]:
    if k == 0:
        return []
    return [int(i) for i in rng.choice(np.asarray(pool), size=k, replace=False)]


def choose_subsquares(m: int, n: int, overlap: int, rng: np.random.Generator) -> SubsquareSelection:
    """Cover all ``m`` rows with ``n``-row subsets sharing ``overlap`` rows.

    The first subset is random; each later one takes ``overlap`` covered rows
    and ``n - overlap`` waiting rows. The last one takes every remaining
    waiting row and is padded with covered rows.
    """
    _validate(m, n, overlap)
    sets: list[tuple[int, ...]] = []
    covered: list[int] = []
    waiting: list[int] = list(range(m))
    while waiting:
        if not covered:
            indices = _randsel(n, waiting, rng)
        elif len(waiting) <= n - overlap:
            indices = waiting + _randsel(n - len(waiting), covered, rng)
        else:
            indices = _randsel(overlap, covered, rng) + _randsel(n - overlap, waiting, rng)
        sets.append(tuple(sorted(indices)))
        chosen = set(indices)
        covered = sorted(set(covered) | chosen)
        waiting = [i for i in waiting if i not in chosen]
    return SubsquareSelection(tuple(sets), overlap)


def _subsystem(A: IntervalMatrix, b: IntervalVector, rows: Sequence[int]):
    return A.rows(rows), b.take(list(rows))


def _check_system(A: IntervalMatrix, b: IntervalVector) -> tuple[int, int]:
    m, n = A.shape
    if len(b) != m:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m}")
    if m < n:
        raise ValueError(f"system is underdetermined: {m} x {n}")
    return m, n


def default_budget(m: int, n: int, overlap: int | None = None) -> Budget:
    if math.comb(m, n) <= ALL_SUBSQUARES_CAP:
        return Budget.all()
    ov = default_overlap(n) if overlap is None else overlap
    return Budget.random(RANDOM_BUDGET_FACTOR * count_subsquares(m, n, ov))


def _subsquare_stream(
    m: int, n: int, budget: Budget, rng: np.random.Generator, cap: int
) -> Iterator[tuple[int, ...]]:
    total = math.comb(m, n)
    if budget.is_all:
        if total > cap:
            raise BudgetExceeded(f"C({m}, {n}) = {total} subsquares exceeds cap {cap}")
        combos = list(itertools.combinations(range(m), n))
        for j in rng.permutation(len(combos)):
            yield combos[j]
        return
    k = min(budget.k, total)
    seen: set[tuple[int, ...]] = set()
    while len(seen) < k:
        rows = tuple(sorted(int(i) for i in rng.choice(m, size=n, replace=False)))
        if rows in seen:
            continue
        seen.add(rows)
        yield rows


def simple_solve(
    A: IntervalMatrix,
    b: IntervalVector,
    budget: Budget | None = None,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    rng: np.random.Generator | None = None,
    cap: int = ALL_SUBSQUARES_CAP,
    keep_boxes: bool = False,
    x0: IntervalVector | None = None,
) -> SolveOutcome:
    """Intersect the enclosures of independently solved subsquares.

    Starts from ``x0`` (default: the whole space); an empty intersection proves the system
    unsolvable and stops immediately. ``subsquares_used`` counts every
    subsquare attempted, including inconclusive ones.
    """
    m, n = _check_system(A, b)
    rng = np.random.default_rng() if rng is None else rng
    budget = default_budget(m, n) if budget is None else budget
    X = IntervalVector.entire(n) if x0 is None else x0
    if len(X) != n:
        raise ShapeMismatch(f"starting box has {len(X)} entries, system has {n} unknowns")
    used = inconclusive = iterations = 0
    boxes = []
    for rows in _subsquare_stream(m, n, budget, rng, cap):
        used += 1
        A_sq, b_sq = _subsystem(A, b, rows)
        res = solve_square(A_sq, b_sq, eps, max_iter, rows=rows)
        iterations += res.iterations
        if res.status is Status.INCONCLUSIVE:
            inconclusive += 1
            continue
        if keep_boxes:
            boxes.append((rows, res.box))
        X = X & res.box
        if X.is_empty:
            return SolveOutcome(
                Status.PROVEN_UNSOLVABLE, X, used, iterations, inconclusive,
                f"empty intersection at subsquare {used}", boxes,
            )
    if inconclusive == used:
        return SolveOutcome(Status.INCONCLUSIVE, X, used, iterations, inconclusive, "every subsquare was inconclusive", boxes)
    return SolveOutcome(Status.ENCLOSURE, X, used, iterations, inconclusive, "", boxes)


def _prepare(A, b, overlap, rng):
    """Select subsquares and precondition each; returns ``(selection, systems, dropped)``."""
    m, n = _check_system(A, b)
    overlap = default_overlap(n) if overlap is None else overlap
    selection = choose_subsquares(m, n, overlap, rng)
    systems: list[PreconditionedSystem] = []
    dropped = 0
    for rows in selection:
        try:
            P = precondition(*_subsystem(A, b, rows), rows=rows)
        except SingularMidpoint:
            dropped += 1
            continue
        if not P.diagonal_excludes_zero():
            dropped += 1
            continue
        systems.append(P)
    return selection, systems, dropped


def _auto_x0(systems: Sequence[PreconditionedSystem]) -> IntervalVector:
    for P in systems:
        try:
            return initial_enclosure(P)
        except NotContracting:
            continue
    raise AllSubsquaresInconclusive("no subsquare admits an initial enclosure")


def _start_box(x0, systems) -> IntervalVector:
    if not systems:
        raise AllSubsquaresInconclusive("every subsquare failed preconditioning")
    if x0 is None or (isinstance(x0, str) and x0 == "auto"):
        return _auto_x0(systems)
    return x0


def sequential_solve(
    A: IntervalMatrix,
    b: IntervalVector,
    x0: IntervalVector | str | None = "auto",
    overlap: int | None = None,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    rng: np.random.Generator | None = None,
    sweep: str = "gs",
) -> SolveOutcome:
    """Shave one box with rounds of sweeps over a covering set of subsquares.

    Each round applies one sweep per subsquare to the shared box ``X``, so
    narrowing found in one subsquare feeds the next. Stops when a whole
    round moves no endpoint by ``eps`` or more, or after ``max_iter`` rounds.
    ``x0`` may be a box or ``"auto"`` (the first subsquare whose a-priori
    bound exists). ``sweep`` is ``"gs"`` or ``"jacobi"``.
    """
    rng = np.random.default_rng() if rng is None else rng
    step = _sweep_fn(sweep)
    selection, systems, dropped = _prepare(A, b, overlap, rng)
    X = _start_box(x0, systems)
    used = len(systems)
    for rnd in range(1, max_iter + 1):
        prev = X
        for P in systems:
            X = step(P, X)
            if X.is_empty:
                return SolveOutcome(Status.PROVEN_UNSOLVABLE, X, used, rnd, dropped, "empty intersection")
        if has_converged(prev, X, eps):
            return SolveOutcome(Status.ENCLOSURE, X, used, rnd, dropped)
    return SolveOutcome(Status.ENCLOSURE, X, used, max_iter, dropped, "iteration cap reached")


def _sweep_fn(name: str) -> Callable:
    try:
        return {"gs": gs_sweep, "jacobi": jacobi_sweep}[name]
    except KeyError:
        raise ValueError(f"unknown sweep {name!r}; expected 'gs' or 'jacobi'") from None


def parallel_sequential_solve(
    A: IntervalMatrix,
    b: IntervalVector,
    x0: IntervalVector | str | None = "auto",
    overlap: int | None = None,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    rng: np.random.Generator | None = None,
    workers: int = 1,
    record_history: bool = False,
) -> SolveOutcome:
    """Jacobi variant of :func:`sequential_solve` with one task per subsquare.

    All tasks of a round read the shared box without locking, run one Jacobi
    sweep, and write back through :meth:`SharedBox.improve`. Rounds are
    separated by a barrier used for the convergence test. With
    ``workers=1`` tasks run inline in subsquare order, which reproduces
    ``sequential_solve(..., sweep="jacobi")`` exactly. With
    ``record_history`` every accepted write is returned in
    ``outcome.history`` as ``(component, old, new)``.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    selection, systems, dropped = _prepare(A, b, overlap, rng)
    X0 = _start_box(x0, systems)
    box = SharedBox(X0, record_history=record_history)
    used = len(systems)

    def task(P: PreconditionedSystem) -> None:
        if box.is_empty:
            return
        out = jacobi_sweep(P, box.snapshot())
        if out.is_empty:
            box.mark_empty()
        else:
            box.improve_all(out)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for rnd in range(1, max_iter + 1):
            prev = box.snapshot()
            if pool is None:
                for P in systems:
                    task(P)
            else:
                for fut in [pool.submit(task, P) for P in systems]:
                    fut.result()
            if box.is_empty:
                return SolveOutcome(
                    Status.PROVEN_UNSOLVABLE, IntervalVector.empty(len(X0)), used, rnd, dropped,
                    "empty intersection", history=box.history,
                )
            if has_converged(prev, box.snapshot(), eps):
                return SolveOutcome(Status.ENCLOSURE, box.snapshot(), used, rnd, dropped, history=box.history)
    finally:
        if pool is not None:
            pool.shutdown()
    return SolveOutcome(
        Status.ENCLOSURE, box.snapshot(), used, max_iter, dropped, "iteration cap reached", history=box.history
    )
