"""Outward-rounded interval arithmetic on scalars, vectors and matrices.

Every endpoint is computed in round-to-nearest and then moved one unit in
the last place outward (``nextafter`` toward -inf for lower bounds, toward
+inf for upper bounds). This keeps the code independent of the FPU rounding
mode while still guaranteeing containment of the exact result.

Vectors and matrices store their endpoints in two numpy arrays ``lo`` and
``hi``. Dot products are accumulated in floating point and then widened by
an a-priori bound on the accumulated rounding error, so a length ``k`` sum
costs one numpy reduction instead of ``k`` individually rounded additions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DivisionByZeroInterval,
    EmptyOperand,
    InfiniteBound,
    ShapeMismatch,
    SingularMatrix,
)

INF = math.inf
UNIT_ROUNDOFF = 2.0**-53

# pivot magnitude below this fraction of the max row norm counts as singular
SINGULAR_PIVOT_RTOL = 1e-12


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[lo, hi]``; bounds may be infinite.

    The empty set is the distinguished instance :data:`EMPTY` (``is_empty``
    set, endpoints NaN). It is never encoded as ``lo > hi``.
    """

    lo: float
    hi: float
    is_empty: bool = False

    def __post_init__(self):
        if self.is_empty:
            return
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval bounds must not be NaN")
        if lo > hi:
            raise ValueError(f"lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> Interval:
        return cls(x, x)

    @property
    def is_finite(self) -> bool:
        return not self.is_empty and math.isfinite(self.lo) and math.isfinite(self.hi)

    def __contains__(self, x: float) -> bool:
        return not self.is_empty and self.lo <= x <= self.hi

    def issubset(self, other: Interval) -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other: Interval) -> Interval:
        return arith("add", self, other)

    def __sub__(self, other: Interval) -> Interval:
        return arith("sub", self, other)

    def __mul__(self, other: Interval) -> Interval:
        return arith("mul", self, other)

    def __truediv__(self, other: Interval) -> Interval:
        return arith("div", self, other)

    def __and__(self, other: Interval) -> Interval:
        return intersect(self, other)

    def __repr__(self) -> str:
        if self.is_empty:
            return "Interval(EMPTY)"
        return f"Interval({self.lo!r}, {self.hi!r})"


EMPTY = Interval(math.nan, math.nan, is_empty=True)
ENTIRE = Interval(-INF, INF)


def _nan_to_zero(p: float) -> float:
    # 0 * inf only arises from a zero endpoint times an unbounded one
    return 0.0 if math.isnan(p) else p


def arith(op: str, x: Interval, y: Interval) -> Interval:
    """Apply ``op`` (one of add, sub, mul, div) to two intervals."""
    if x.is_empty or y.is_empty:
        raise EmptyOperand(f"{op} of an empty interval")
    if op == "add":
        lo, hi = x.lo + y.lo, x.hi + y.hi
    elif op == "sub":
        lo, hi = x.lo - y.hi, x.hi - y.lo
    elif op == "mul":
        ps = [_nan_to_zero(a * b) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
        lo, hi = min(ps), max(ps)
    elif op == "div":
        if y.lo <= 0.0 <= y.hi:
            raise DivisionByZeroInterval(f"divisor {y} contains zero")
        qs = [_nan_to_zero(a / b) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
        lo, hi = min(qs), max(qs)
    else:
        raise ValueError(f"unknown operation {op!r}")
    return Interval(math.nextafter(lo, -INF), math.nextafter(hi, INF))


def _require_finite(x: Interval) -> None:
    if x.is_empty:
        raise EmptyOperand("empty interval has no midpoint or width")
    if not x.is_finite:
        raise InfiniteBound(f"{x} has an infinite bound")


def midpoint(x: Interval) -> float:
    _require_finite(x)
    return 0.5 * x.lo + 0.5 * x.hi


def width(x: Interval) -> float:
    _require_finite(x)
    return x.hi - x.lo


def radius(x: Interval) -> float:
    return 0.5 * width(x)


def intersect(x: Interval, y: Interval) -> Interval:
    if x.is_empty or y.is_empty:
        return EMPTY
    lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
    if lo > hi:
        return EMPTY
    return Interval(lo, hi)


# ---------------------------------------------------------------------------
# Vectorised endpoint kernels
# ---------------------------------------------------------------------------


def mul_bounds(alo, ahi, blo, bhi):
    """Outward-rounded endpoints of the elementwise product of two interval arrays."""
    with np.errstate(invalid="ignore"):
        p = np.stack(np.broadcast_arrays(alo * blo, alo * bhi, ahi * blo, ahi * bhi))
    p = np.where(np.isnan(p), 0.0, p)
    return _down(p.min(axis=0)), _up(p.max(axis=0))


def div_bounds(alo, ahi, blo, bhi):
    """Outward-rounded endpoints of ``a / b``; the caller guarantees 0 is not in ``b``."""
    with np.errstate(invalid="ignore"):
        q = np.stack(np.broadcast_arrays(alo / blo, alo / bhi, ahi / blo, ahi / bhi))
    q = np.where(np.isnan(q), 0.0, q)
    return _down(q.min(axis=0)), _up(q.max(axis=0))


def sum_bounds(lo_terms: np.ndarray, hi_terms: np.ndarray, axis: int = -1):
    """Enclosure of the exact sums of ``lo_terms`` and ``hi_terms`` along ``axis``.

    Both endpoints are widened by the same bound, computed from the term
    magnitudes. Narrower terms therefore never yield a wider result.
    """
    k = lo_terms.shape[axis]
    # |fl(sum) - sum| <= gamma_{k-1} * sum|t|; 2k*u also covers rounding of sum|t|
    coeff = 2.0 * k * UNIT_ROUNDOFF
    with np.errstate(invalid="ignore", over="ignore"):
        mag = np.maximum(np.abs(lo_terms), np.abs(hi_terms))
        err = _up(coeff * mag.sum(axis=axis))
        s_lo = lo_terms.sum(axis=axis)
        s_hi = hi_terms.sum(axis=axis)
        lo = np.where(np.isfinite(s_lo), _down(s_lo - err), s_lo)
        hi = np.where(np.isfinite(s_hi), _up(s_hi + err), s_hi)
    return lo, hi


# ---------------------------------------------------------------------------
# Vectors and matrices
# ---------------------------------------------------------------------------


def _as_float_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ShapeMismatch(f"expected a {ndim}-d array, got shape {arr.shape}")
    return arr


class IntervalVector:
    """Dense interval vector. Empty iff any component is empty."""

    __slots__ = ("lo", "hi", "is_empty")

    def __init__(self, lo, hi=None, *, _empty: bool = False):
        lo = _as_float_array(lo, 1)
        hi = lo.copy() if hi is None else _as_float_array(hi, 1)
        if lo.shape != hi.shape:
            raise ShapeMismatch(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if not _empty:
            if np.isnan(lo).any() or np.isnan(hi).any():
                raise ValueError("interval bounds must not be NaN")
            if (lo > hi).any():
                raise ValueError("lower bound exceeds upper bound")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi
        self.is_empty = _empty

    @classmethod
    def empty(cls, n: int) -> IntervalVector:
        nan = np.full(n, np.nan)
        return cls(nan, nan, _empty=True)

    @classmethod
    def entire(cls, n: int) -> IntervalVector:
        return cls(np.full(n, -np.inf), np.full(n, np.inf))

    @classmethod
    def from_intervals(cls, items: Iterable[Interval]) -> IntervalVector:
        items = list(items)
        if any(x.is_empty for x in items):
            return cls.empty(len(items))
        return cls([x.lo for x in items], [x.hi for x in items])

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> IntervalVector:
        arr = np.array(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    def __len__(self) -> int:
        return self.lo.shape[0]

    def __getitem__(self, i: int) -> Interval:
        if self.is_empty:
            return EMPTY
        return Interval(self.lo[i], self.hi[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalVector):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty and len(self) == len(other)
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self) -> str:
        if self.is_empty:
            return f"IntervalVector(EMPTY, n={len(self)})"
        body = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in zip(self.lo, self.hi))
        return f"IntervalVector({body})"

    @property
    def is_finite(self) -> bool:
        return not self.is_empty and bool(np.isfinite(self.lo).all() and np.isfinite(self.hi).all())

    def midpoint(self) -> np.ndarray:
        self._require_finite()
        return 0.5 * self.lo + 0.5 * self.hi

    def width(self) -> np.ndarray:
        self._require_finite()
        return self.hi - self.lo

    def radius(self) -> np.ndarray:
        return 0.5 * self.width()

    def _require_finite(self) -> None:
        if self.is_empty:
            raise EmptyOperand("empty interval vector")
        if not self.is_finite:
            raise InfiniteBound("interval vector has infinite bounds")

    def contains(self, x) -> bool:
        if self.is_empty:
            return False
        x = np.asarray(x, dtype=float)
        return bool(((self.lo <= x) & (x <= self.hi)).all())

    def issubset(self, other: IntervalVector) -> bool:
        _check_len(self, other)
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return bool(((other.lo <= self.lo) & (self.hi <= other.hi)).all())

    def intersect(self, other: IntervalVector) -> IntervalVector:
        _check_len(self, other)
        if self.is_empty or other.is_empty:
            return IntervalVector.empty(len(self))
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if (lo > hi).any():
            return IntervalVector.empty(len(self))
        return IntervalVector(lo, hi)

    __and__ = intersect

    def hull(self, other: IntervalVector) -> IntervalVector:
        """Smallest box containing both operands."""
        _check_len(self, other)
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return IntervalVector(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def take(self, indices) -> IntervalVector:
        if self.is_empty:
            return IntervalVector.empty(len(indices))
        return IntervalVector(self.lo[indices], self.hi[indices])

    def inflate(self, factor: float) -> IntervalVector:
        """Scale every component's width by ``factor`` about its midpoint."""
        mid = self.midpoint()
        half = _up(0.5 * factor * self.width())
        return IntervalVector(_down(mid - half), _up(mid + half))

    def to_pairs(self) -> list[list[float]]:
        return [[float(a), float(b)] for a, b in zip(self.lo, self.hi)]


def _check_len(u: IntervalVector, v: IntervalVector) -> None:
    if len(u) != len(v):
        raise ShapeMismatch(f"vector lengths differ: {len(u)} vs {len(v)}")


class IntervalMatrix:
    """Dense ``m x n`` interval matrix stored as two endpoint arrays."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _as_float_array(lo, 2)
        hi = lo.copy() if hi is None else _as_float_array(hi, 2)
        if lo.shape != hi.shape:
            raise ShapeMismatch(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise ValueError("interval bounds must not be NaN")
        if (lo > hi).any():
            raise ValueError("lower bound exceeds upper bound")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    @property
    def shape(self) -> tuple[int, int]:
        return self.lo.shape

    def __getitem__(self, ij) -> Interval:
        i, j = ij
        return Interval(self.lo[i, j], self.hi[i, j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self) -> str:
        return f"IntervalMatrix(shape={self.shape})"

    def midpoint(self) -> np.ndarray:
        return 0.5 * self.lo + 0.5 * self.hi

    def radius(self) -> np.ndarray:
        return 0.5 * (self.hi - self.lo)

    def width(self) -> np.ndarray:
        return self.hi - self.lo

    def rows(self, indices) -> IntervalMatrix:
        idx = list(indices)
        return IntervalMatrix(self.lo[idx], self.hi[idx])

    def contains(self, a) -> bool:
        a = np.asarray(a, dtype=float)
        return bool(((self.lo <= a) & (a <= self.hi)).all())


# ---------------------------------------------------------------------------
# Metrics and products
# ---------------------------------------------------------------------------


def w_metric(u: IntervalVector) -> float:
    """Sum of component widths."""
    return float(u.width().sum())


def v_metric(u: IntervalVector) -> float:
    """Product of component widths."""
    return float(np.prod(u.width()))


def imat_vec(A: IntervalMatrix, x: IntervalVector) -> IntervalVector:
    """Enclosure of ``{A' x' : A' in A, x' in x}``."""
    m, n = A.shape
    if len(x) != n:
        raise ShapeMismatch(f"cannot multiply {A.shape} matrix by length-{len(x)} vector")
    if x.is_empty:
        raise EmptyOperand("matrix times empty vector")
    plo, phi = mul_bounds(A.lo, A.hi, x.lo[None, :], x.hi[None, :])
    return IntervalVector(*sum_bounds(plo, phi, axis=1))


def pmat_imat(M, A: IntervalMatrix) -> IntervalMatrix:
    """Enclosure of ``{M A' : A' in A}`` for a point matrix ``M``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[1] != A.shape[0]:
        raise ShapeMismatch(f"cannot multiply {M.shape} by {A.shape}")
    # terms[i, j, k] = M[i, k] * A[k, j]
    Mk = M[:, None, :]
    lo_t = np.where(Mk >= 0, Mk * A.lo.T[None, :, :], Mk * A.hi.T[None, :, :])
    hi_t = np.where(Mk >= 0, Mk * A.hi.T[None, :, :], Mk * A.lo.T[None, :, :])
    lo, hi = sum_bounds(_down(lo_t), _up(hi_t), axis=2)
    return IntervalMatrix(lo, hi)


def pmat_ivec(M, b: IntervalVector) -> IntervalVector:
    """Enclosure of ``{M b' : b' in b}`` for a point matrix ``M``."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[1] != len(b):
        raise ShapeMismatch(f"cannot multiply {M.shape} by length-{len(b)} vector")
    lo_t = np.where(M >= 0, M * b.lo[None, :], M * b.hi[None, :])
    hi_t = np.where(M >= 0, M * b.hi[None, :], M * b.lo[None, :])
    return IntervalVector(*sum_bounds(_down(lo_t), _up(hi_t), axis=1))


def point_inverse(M, rtol: float = SINGULAR_PIVOT_RTOL) -> np.ndarray:
    """Approximate inverse by LU with partial pivoting.

    Raises :class:`SingularMatrix` when a pivot is smaller than ``rtol``
    times the largest row norm of ``M``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"point_inverse needs a square matrix, got {M.shape}")
    if not np.isfinite(M).all():
        raise ValueError("matrix entries must be finite")
    n = M.shape[0]
    scale = np.abs(M).sum(axis=1).max() if n else 0.0
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    if (np.abs(np.diag(lu)) < rtol * scale).any():
        raise SingularMatrix("pivot below singularity threshold")
    return scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)
