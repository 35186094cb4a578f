"""Ground truth for small systems: membership, exact hull, sampled inner hull.

Membership in the united solution set is decided by the Oettli-Prager
inequality ``|A_c x - b_c| <= A_r |x| + b_r``. Inside a fixed orthant,
``|x|`` is linear, so the solution set restricted to that orthant is a
polyhedron and its coordinate extremes are linear programs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionCap, ShapeMismatch
from .interval import IntervalMatrix, IntervalVector
from .simplex import LpStatus, Simplex

DEFAULT_N_CAP = 10
# padding applied to oracle boxes before they appear in subset assertions
ORACLE_PAD = 1e-7


@dataclass
class HullResult:
    box: IntervalVector | None
    orthants_visited: int
    feasible_orthants: int = 0

    @property
    def infeasible(self) -> bool:
        return self.box is None

    def padded(self, pad: float = ORACLE_PAD) -> IntervalVector:
        if self.box is None:
            raise ValueError("infeasible system has no hull")
        return IntervalVector(self.box.lo - pad, self.box.hi + pad)


def _check_shapes(A: IntervalMatrix, b: IntervalVector, n: int | None = None) -> None:
    m, cols = A.shape
    if len(b) != m:
        raise ShapeMismatch(f"matrix has {m} rows but right-hand side has {len(b)}")
    if n is not None and n != cols:
        raise ShapeMismatch(f"point has {n} entries, matrix has {cols} columns")


def op_membership(A: IntervalMatrix, b: IntervalVector, x, tol: float = 0.0) -> bool:
    """True iff ``x`` solves ``A' x = b'`` for some ``A' in A``, ``b' in b``.

    ``tol`` loosens the inequality by an absolute amount (default exact
    floating-point test).
    """
    x = np.asarray(x, dtype=float)
    _check_shapes(A, b, x.size)
    lhs = np.abs(A.midpoint() @ x - b.midpoint())
    rhs = A.radius() @ np.abs(x) + b.radius()
    return bool((lhs <= rhs + tol).all())


def orthant_constraints(A: IntervalMatrix, b: IntervalVector, signs: np.ndarray):
    """Oettli-Prager inequalities in ``y = |x| >= 0`` for ``x = signs * y``."""
    Ac, Ar = A.midpoint(), A.radius()
    bc, br = b.midpoint(), b.radius()
    AcS = Ac * signs[None, :]
    G = np.vstack([AcS - Ar, -AcS - Ar])
    h = np.concatenate([bc + br, br - bc])
    return G, h


def exact_hull(A: IntervalMatrix, b: IntervalVector, n_cap: int = DEFAULT_N_CAP) -> HullResult:
    """Interval hull of the united solution set by orthant-wise linear programming.

    Returns a result with ``box=None`` when every orthant is infeasible,
    i.e. when the system is unsolvable.
    """
    _check_shapes(A, b)
    m, n = A.shape
    if n > n_cap:
        raise DimensionCap(f"n = {n} exceeds the hull cap {n_cap}")
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    visited = feasible = 0
    eye = np.eye(n)
    for signs in itertools.product((1.0, -1.0), repeat=n):
        signs = np.array(signs)
        visited += 1
        G, h = orthant_constraints(A, b, signs)
        lp = Simplex(G, h)
        if not lp.feasible:
            continue
        feasible += 1
        for j in range(n):
            low = lp.optimize(eye[j], maximize=False)
            high = lp.optimize(eye[j], maximize=True)
            if low.status is not LpStatus.OPTIMAL or high.status is not LpStatus.OPTIMAL:
                # unbounded: the solution set is unbounded along this axis
                lo[j] = -np.inf
                hi[j] = np.inf
                continue
            if signs[j] > 0:
                xlo, xhi = low.value, high.value
            else:
                xlo, xhi = -high.value, -low.value
            lo[j] = min(lo[j], xlo)
            hi[j] = max(hi[j], xhi)
    if feasible == 0:
        return HullResult(None, visited, 0)
    return HullResult(IntervalVector(lo, hi), visited, feasible)


def _random_point(lo: np.ndarray, hi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform point, or (half the time) a random vertex."""
    if rng.random() < 0.5:
        return np.where(rng.random(lo.shape) < 0.5, lo, hi)
    return rng.uniform(lo, hi)


def inner_hull_sampling(
    A: IntervalMatrix,
    b: IntervalVector,
    samples: int,
    rng: np.random.Generator,
) -> IntervalVector | None:
    """Hull of sampled members of the solution set; ``None`` if none was found.

    Each sample draws ``A' in A``, ``b' in b`` and a random set of ``n``
    rows, solves that square point system and keeps the solution if it
    passes the Oettli-Prager test for the full system. The result is
    contained in the exact hull up to floating-point rounding.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _check_shapes(A, b)
    m, n = A.shape
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    found = False
    for _ in range(samples):
        Ap = _random_point(A.lo, A.hi, rng)
        bp = _random_point(b.lo, b.hi, rng)
        rows = rng.choice(m, size=n, replace=False) if m > n else np.arange(n)
        try:
            x = np.linalg.solve(Ap[rows], bp[rows])
        except np.linalg.LinAlgError:
            continue
        if not np.isfinite(x).all() or not op_membership(A, b, x):
            continue
        found = True
        lo = np.minimum(lo, x)
        hi = np.maximum(hi, x)
    if not found:
        return None
    return IntervalVector(lo, hi)
