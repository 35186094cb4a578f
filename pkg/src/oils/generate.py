"""Random overdetermined interval systems with a known provenance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interval import IntervalMatrix, IntervalVector, _down, _up, mul_bounds, sum_bounds

COEFF_RANGE = 20.0


@dataclass(frozen=True)
class GeneratedSystem:
    A: IntervalMatrix
    b: IntervalVector
    x_star: np.ndarray
    A_point: np.ndarray
    b_point: np.ndarray
    consistent: bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


def _exact_product_enclosure(A: np.ndarray, x: np.ndarray):
    plo, phi = mul_bounds(A, A, x[None, :], x[None, :])
    return sum_bounds(plo, phi, axis=1)


def _inflate(lo: np.ndarray, hi: np.ndarray, radius: float, rng, centered: bool):
    """Widen ``[lo, hi]`` by ``radius`` each side after a random shift in ``[-radius, radius]``.

    The shifted interval still contains ``[lo, hi]``.
    """
    if radius == 0.0:
        return lo.copy(), hi.copy()
    shift = np.zeros(lo.shape) if centered else rng.uniform(-radius, radius, lo.shape)
    new_lo = np.minimum(_down(_down(lo + shift) - radius), lo)
    new_hi = np.maximum(_up(_up(hi + shift) + radius), hi)
    return new_lo, new_hi


def generate_random_system(
    m: int,
    n: int,
    radius: float,
    rng: np.random.Generator,
    centered: bool = False,
    consistent: bool = True,
) -> GeneratedSystem:
    """Draw a point system and inflate every coefficient to width ``2 * radius``.

    ``A'`` and ``x*`` are uniform on ``[-20, 20]``. With ``consistent`` the
    right-hand side encloses the exact ``A' x*``, so ``x*`` is a planted
    solution. Otherwise ``b'`` is drawn uniform on ``[-20, 20]`` independently
    of ``A'``, which for ``m > n`` makes the point system inconsistent with
    probability one (``x_star`` is then meaningless). Unless ``centered``,
    each interval is shifted so that the original coefficient sits at a
    random position inside it.
    """
    if not (m >= n >= 1):
        raise ValueError(f"need m >= n >= 1, got {m} x {n}")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    A_point = rng.uniform(-COEFF_RANGE, COEFF_RANGE, (m, n))
    x_star = rng.uniform(-COEFF_RANGE, COEFF_RANGE, n)
    b_lo, b_hi = _exact_product_enclosure(A_point, x_star)
    if not consistent:
        b_lo = b_hi = rng.uniform(-COEFF_RANGE, COEFF_RANGE, m)
    A_lo, A_hi = _inflate(A_point, A_point, radius, rng, centered)
    bl, bh = _inflate(b_lo, b_hi, radius, rng, centered)
    return GeneratedSystem(
        A=IntervalMatrix(A_lo, A_hi),
        b=IntervalVector(bl, bh),
        x_star=x_star,
        A_point=A_point,
        b_point=0.5 * b_lo + 0.5 * b_hi,
        consistent=consistent,
    )
