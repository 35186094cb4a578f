"""Verified enclosures for a single square interval system.

A square system ``A x = b`` is preconditioned with the approximate inverse
of its own midpoint matrix, bounded a priori, and then narrowed by interval
Gauss-Seidel (or Jacobi) sweeps. Every sweep intersects with the current box,
so boxes only ever shrink; an empty intersection proves the system has no
solution inside the starting box.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DiagonalContainsZero, NotContracting, SingularMatrix, SingularMidpoint
from .interval import (
    Interval,
    IntervalMatrix,
    IntervalVector,
    _down,
    _up,
    div_bounds,
    mul_bounds,
    pmat_imat,
    pmat_ivec,
    point_inverse,
    sum_bounds,
)

DEFAULT_EPS = 1e-6
DEFAULT_MAX_ITER = 100


class Status(str, enum.Enum):
    ENCLOSURE = "Enclosure"
    PROVEN_UNSOLVABLE = "ProvenUnsolvable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PreconditionedSystem:
    """``C x = d`` with ``C ⊇ M A`` and ``d ⊇ M b`` for ``M ≈ mid(A)^-1``."""

    C: IntervalMatrix
    d: IntervalVector
    rows: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.d)

    def diagonal_excludes_zero(self) -> bool:
        dlo = np.diag(self.C.lo)
        dhi = np.diag(self.C.hi)
        return bool(((dlo > 0) | (dhi < 0)).all())


@dataclass
class SquareOutcome:
    status: Status
    box: IntervalVector
    iterations: int = 0
    reason: str = ""


def precondition(
    A_sq: IntervalMatrix, b_sq: IntervalVector, rows: Sequence[int] = ()
) -> PreconditionedSystem:
    """Left-multiply ``(A_sq, b_sq)`` by the inverse of ``mid(A_sq)``."""
    m, n = A_sq.shape
    if m != n or len(b_sq) != n:
        raise ValueError(f"precondition needs a square system, got {A_sq.shape} and {len(b_sq)}")
    try:
        M = point_inverse(A_sq.midpoint())
    except SingularMatrix as exc:
        raise SingularMidpoint(str(exc)) from exc
    return PreconditionedSystem(pmat_imat(M, A_sq), pmat_ivec(M, b_sq), tuple(rows))


def _magnitude(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.maximum(np.abs(lo), np.abs(hi))


def contraction_factor(P: PreconditionedSystem) -> float:
    """Upper bound on the infinity norm of ``|I - C|``."""
    n = P.n
    eye = np.eye(n)
    # I - C, outward rounded
    r_lo = _down(eye - P.C.hi)
    r_hi = _up(eye - P.C.lo)
    mag = _magnitude(r_lo, r_hi)
    _, row_sums = sum_bounds(mag, mag, axis=1)
    return float(row_sums.max()) if n else 0.0


def _h_matrix_bound(P: PreconditionedSystem) -> np.ndarray | None:
    """Componentwise bound ``|x| <= alpha * u`` valid when ``C`` is an H-matrix.

    If ``u > 0`` and ``v = <C> u > 0`` for the comparison matrix ``<C>``,
    then ``|C'^-1 d'| <= <C>^-1 |d| <= max(|d| / v) * u`` for all
    ``C' in C``, ``d' in d``. Returns ``None`` when no such ``u`` is found.
    """
    C_lo, C_hi = P.C.lo, P.C.hi
    n = P.n
    mag = _magnitude(C_lo, C_hi)
    diag_lo, diag_hi = np.diag(C_lo), np.diag(C_hi)
    mig = np.where(diag_lo > 0, diag_lo, np.where(diag_hi < 0, -diag_hi, 0.0))
    if not (mig > 0).all():
        return None
    comparison = -mag
    np.fill_diagonal(comparison, mig)
    dmag = _magnitude(P.d.lo, P.d.hi)
    try:
        u = np.linalg.solve(comparison, dmag + dmag.max() * 1e-3 + np.finfo(float).tiny)
    except np.linalg.LinAlgError:
        return None
    if not (np.isfinite(u).all() and (u > 0).all()):
        return None
    # lower bound of v = mig * u - sum_{j != i} mag_ij * u_j
    off = mag * u[None, :]
    np.fill_diagonal(off, 0.0)
    _, off_hi = sum_bounds(_up(off), _up(off), axis=1)
    v_lo = _down(_down(mig * u) - off_hi)
    if not (v_lo > 0).all():
        return None
    alpha = float(_up(dmag / v_lo).max())
    return _up(alpha * u)


def initial_enclosure(P: PreconditionedSystem) -> IntervalVector:
    """A-priori box around the solution set of ``C x = d``.

    With ``rho = || |I - C| ||_inf < 1`` every solution satisfies
    ``||x||_inf <= ||d||_inf / (1 - rho)``, giving ``[-r, r]^n``. Otherwise,
    if ``C`` is an H-matrix, a componentwise bound from the comparison
    matrix is used instead.
    """
    n = P.n
    rho = contraction_factor(P)
    if rho < 1.0:
        dnorm = float(_magnitude(P.d.lo, P.d.hi).max())
        denom = float(_down(1.0 - rho))
        r = float(_up(dnorm / denom))
        return IntervalVector(np.full(n, -r), np.full(n, r))
    bound = _h_matrix_bound(P)
    if bound is None:
        raise NotContracting(f"||I - C||_inf bound {rho:.6g} >= 1 and C is not an H-matrix")
    return IntervalVector(-bound, bound)


def _check_diagonal(P: PreconditionedSystem) -> None:
    if not P.diagonal_excludes_zero():
        raise DiagonalContainsZero("a diagonal entry of the preconditioned matrix contains 0")


def _row_update(C_lo, C_hi, d_lo, d_hi, diag_lo, diag_hi, x_lo, x_hi, rows):
    """Gauss-Seidel right-hand side for the given rows, reading ``x`` as-is.

    ``rows`` is an index array; ``C_lo[rows]`` etc. are 2-d so the Jacobi
    (all rows) and Gauss-Seidel (one row) paths share one summation kernel.
    """
    plo, phi = mul_bounds(C_lo[rows], C_hi[rows], x_lo[None, :], x_hi[None, :])
    # drop the diagonal term of every row
    k = np.arange(len(rows))
    plo[k, rows] = 0.0
    phi[k, rows] = 0.0
    s_lo, s_hi = sum_bounds(plo, phi, axis=1)
    num_lo = _down(d_lo[rows] - s_hi)
    num_hi = _up(d_hi[rows] - s_lo)
    return div_bounds(num_lo, num_hi, diag_lo[rows], diag_hi[rows])


class _SweepData:
    """Endpoint arrays of a preconditioned system, unpacked once."""

    __slots__ = ("C_lo", "C_hi", "d_lo", "d_hi", "diag_lo", "diag_hi", "n")

    def __init__(self, P: PreconditionedSystem):
        _check_diagonal(P)
        self.C_lo, self.C_hi = P.C.lo, P.C.hi
        self.d_lo, self.d_hi = P.d.lo, P.d.hi
        self.diag_lo = np.diag(P.C.lo).copy()
        self.diag_hi = np.diag(P.C.hi).copy()
        self.n = P.n


_SWEEP_CACHE_ATTR = "_sweep_data"


def _sweep_data(P: PreconditionedSystem) -> _SweepData:
    data = P.__dict__.get(_SWEEP_CACHE_ATTR)
    if data is None:
        data = _SweepData(P)
        object.__setattr__(P, _SWEEP_CACHE_ATTR, data)
    return data


def gs_step(P: PreconditionedSystem, X: IntervalVector, i: int) -> Interval:
    """Narrow component ``i`` of ``X`` from equation ``i`` of ``C x = d``.

    Returns the (possibly empty) intersection with ``X[i]``.
    """
    if X.is_empty:
        raise ValueError("gs_step needs a non-empty box")
    s = _sweep_data(P)
    rows = np.array([i])
    lo, hi = _row_update(s.C_lo, s.C_hi, s.d_lo, s.d_hi, s.diag_lo, s.diag_hi, X.lo, X.hi, rows)
    return Interval(lo[0], hi[0]) & X[i]


def gs_sweep(P: PreconditionedSystem, X: IntervalVector) -> IntervalVector:
    """One Gauss-Seidel pass over all components, using new values immediately."""
    if X.is_empty:
        return X
    s = _sweep_data(P)
    lo = X.lo.copy()
    hi = X.hi.copy()
    for i in range(s.n):
        rows = np.array([i])
        nlo, nhi = _row_update(s.C_lo, s.C_hi, s.d_lo, s.d_hi, s.diag_lo, s.diag_hi, lo, hi, rows)
        new_lo = max(lo[i], nlo[0])
        new_hi = min(hi[i], nhi[0])
        if new_lo > new_hi:
            return IntervalVector.empty(s.n)
        lo[i], hi[i] = new_lo, new_hi
    return IntervalVector(lo, hi)


def jacobi_sweep(P: PreconditionedSystem, X: IntervalVector) -> IntervalVector:
    """One Jacobi pass: every component is updated from the pre-sweep box."""
    if X.is_empty:
        return X
    s = _sweep_data(P)
    rows = np.arange(s.n)
    nlo, nhi = _row_update(s.C_lo, s.C_hi, s.d_lo, s.d_hi, s.diag_lo, s.diag_hi, X.lo, X.hi, rows)
    lo = np.maximum(X.lo, nlo)
    hi = np.minimum(X.hi, nhi)
    if (lo > hi).any():
        return IntervalVector.empty(s.n)
    return IntervalVector(lo, hi)


def has_converged(prev: IntervalVector, cur: IntervalVector, eps: float) -> bool:
    """Every endpoint moved by less than ``eps`` since ``prev``."""
    with np.errstate(invalid="ignore"):
        return bool(
            (np.abs(cur.lo - prev.lo) < eps).all() and (np.abs(cur.hi - prev.hi) < eps).all()
        )


def iterate(P: PreconditionedSystem, X: IntervalVector, eps: float, max_iter: int, sweep=gs_sweep):
    """Sweep until the endpoint-change criterion holds; returns ``(box, iterations, converged)``."""
    for k in range(1, max_iter + 1):
        nxt = sweep(P, X)
        if nxt.is_empty:
            return nxt, k, True
        if has_converged(X, nxt, eps):
            return nxt, k, True
        X = nxt
    return X, max_iter, False


def solve_square(
    A_sq: IntervalMatrix,
    b_sq: IntervalVector,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
    x0: IntervalVector | None = None,
    rows: Sequence[int] = (),
) -> SquareOutcome:
    """Enclose the solution set of a square interval system.

    Singular midpoints, a non-contracting preconditioned matrix (when no
    ``x0`` is given) and zero-containing diagonals all give ``Inconclusive``;
    an empty intersection gives ``ProvenUnsolvable``.
    """
    n = A_sq.shape[1]
    try:
        P = precondition(A_sq, b_sq, rows)
    except SingularMidpoint as exc:
        return SquareOutcome(Status.INCONCLUSIVE, IntervalVector.entire(n), 0, f"singular midpoint: {exc}")
    if not P.diagonal_excludes_zero():
        return SquareOutcome(Status.INCONCLUSIVE, IntervalVector.entire(n), 0, "diagonal contains zero")
    if x0 is None:
        try:
            X = initial_enclosure(P)
        except NotContracting as exc:
            return SquareOutcome(Status.INCONCLUSIVE, IntervalVector.entire(n), 0, str(exc))
    else:
        X = x0
    box, k, _ = iterate(P, X, eps, max_iter)
    if box.is_empty:
        return SquareOutcome(Status.PROVEN_UNSOLVABLE, box, k, "empty intersection")
    return SquareOutcome(Status.ENCLOSURE, box, k)
