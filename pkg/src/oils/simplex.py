"""Dense two-phase simplex with Bland's rule.

Solves ``min`` (or ``max``) ``c @ x`` subject to ``A_ub @ x <= b_ub`` and
per-variable bounds. Small problems only; the tableau is a dense numpy
array. Bland's rule guarantees termination. Before an optimum is returned,
the final basis is re-solved from the original data and checked for primal
feasibility and non-negative reduced costs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionCap

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11
DEFAULT_DIMENSION_CAP = 2000


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class LpProblem:
    objective: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    bounds: Sequence[tuple[float, float]] | None = None  # default: every x >= 0
    maximize: bool = False

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.size
        self.A_ub = np.asarray(self.A_ub, dtype=float).reshape(-1, n)
        self.b_ub = np.asarray(self.b_ub, dtype=float).reshape(-1)
        if self.A_ub.shape[0] != self.b_ub.size:
            raise ValueError("A_ub and b_ub disagree on the number of constraints")
        if self.bounds is None:
            self.bounds = [(0.0, np.inf)] * n
        if len(self.bounds) != n:
            raise ValueError("one (lo, hi) bound pair is needed per variable")
        if not (np.isfinite(self.objective).all() and np.isfinite(self.A_ub).all() and np.isfinite(self.b_ub).all()):
            raise ValueError("LP data must be finite")


@dataclass
class LpResult:
    status: LpStatus
    value: float | None = None
    x: np.ndarray | None = None
    pivots: int = 0
    duals: np.ndarray | None = field(default=None, repr=False)


class _Standard:
    """``min c @ z`` s.t. ``G @ z <= h``, ``z >= 0`` plus the map back to ``x``."""

    def __init__(self, p: LpProblem):
        n = p.objective.size
        offset = np.zeros(n)
        extra_rows, extra_rhs = [], []
        # column j of z contributes sign * z_j to x[var]
        self.var, self.sign = [], []
        for j, (lo, hi) in enumerate(p.bounds):
            lo, hi = float(lo), float(hi)
            if lo > hi:
                raise ValueError(f"variable {j} has empty bounds [{lo}, {hi}]")
            if np.isfinite(lo):
                offset[j] = lo
                self.var.append(j), self.sign.append(1.0)
                if np.isfinite(hi):
                    extra_rows.append(len(self.var) - 1)
                    extra_rhs.append(hi - lo)
            elif np.isfinite(hi):
                offset[j] = hi
                self.var.append(j), self.sign.append(-1.0)
            else:
                self.var += [j, j]
                self.sign += [1.0, -1.0]
        self.var = np.array(self.var, dtype=int)
        self.sign = np.array(self.sign)
        self.offset = offset
        T = np.zeros((n, self.var.size))
        T[self.var, np.arange(self.var.size)] = self.sign
        self.T = T
        G = p.A_ub @ T
        h = p.b_ub - p.A_ub @ offset
        if extra_rows:
            E = np.zeros((len(extra_rows), self.var.size))
            E[np.arange(len(extra_rows)), extra_rows] = 1.0
            G = np.vstack([G, E])
            h = np.concatenate([h, extra_rhs])
        self.G, self.h = G, h
        self.num_ub = p.A_ub.shape[0]

    def objective(self, c: np.ndarray, maximize: bool) -> tuple[np.ndarray, float]:
        cz = c @ self.T
        const = float(c @ self.offset)
        return (-cz, -const) if maximize else (cz, const)

    def to_x(self, z: np.ndarray) -> np.ndarray:
        return self.offset + self.T @ z


class _Tableau:
    """Phase-1-feasible tableau over structural + slack columns."""

    def __init__(self, G: np.ndarray, h: np.ndarray):
        rows, nz = G.shape
        self.nz = nz
        self.G, self.h = G, h
        self.pivots = 0
        self.feasible = True
        # columns: z (nz) | slack/surplus (rows) | artificial (k)
        neg = h < 0
        k = int(neg.sum())
        width = nz + rows + k
        tab = np.zeros((rows, width + 1))
        sgn = np.where(neg, -1.0, 1.0)
        tab[:, :nz] = G * sgn[:, None]
        tab[np.arange(rows), nz + np.arange(rows)] = sgn
        tab[:, -1] = h * sgn
        basis = nz + np.arange(rows)
        art_rows = np.flatnonzero(neg)
        tab[art_rows, nz + rows + np.arange(k)] = 1.0
        basis[art_rows] = nz + rows + np.arange(k)
        self.tab, self.basis = tab, basis
        self.row_ids = np.arange(rows)
        self.n_real = nz + rows
        if k:
            cost = np.zeros(width)
            cost[self.n_real:] = 1.0
            status = self._optimize(cost)
            assert status is not LpStatus.UNBOUNDED
            phase1 = float(cost[self.basis] @ self.tab[:, -1])
            if phase1 > FEAS_TOL * max(1.0, np.abs(h).max()):
                self.feasible = False
                return
            self._drive_out_artificials()
        self.tab = np.delete(self.tab, np.s_[self.n_real:-1], axis=1)

    def _drive_out_artificials(self) -> None:
        keep = np.ones(self.tab.shape[0], dtype=bool)
        for r in range(self.tab.shape[0]):
            if self.basis[r] < self.n_real:
                continue
            cand = np.flatnonzero(np.abs(self.tab[r, : self.n_real]) > PIVOT_TOL)
            if cand.size:
                self._pivot(r, int(cand[0]))
            else:
                keep[r] = False  # redundant constraint
        self.tab = self.tab[keep]
        self.basis = self.basis[keep]
        self.row_ids = self.row_ids[keep]

    def _pivot(self, r: int, col: int) -> None:
        tab = self.tab
        tab[r] /= tab[r, col]
        factors = tab[:, col].copy()
        factors[r] = 0.0
        tab -= np.outer(factors, tab[r])
        self.basis[r] = col
        self.pivots += 1

    def _optimize(self, cost: np.ndarray) -> LpStatus:
        tab = self.tab
        ncols = tab.shape[1] - 1
        while True:
            reduced = cost[:ncols] - cost[self.basis] @ tab[:, :ncols]
            entering = np.flatnonzero(reduced < -PIVOT_TOL)
            if entering.size == 0:
                return LpStatus.OPTIMAL
            col = int(entering[0])
            column = tab[:, col]
            pos = column > PIVOT_TOL
            if not pos.any():
                return LpStatus.UNBOUNDED
            ratios = np.full(column.shape, np.inf)
            ratios[pos] = tab[pos, -1] / column[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, abs(best)))
            r = int(ties[np.argmin(self.basis[ties])])
            self._pivot(r, col)

    def minimize(self, cz: np.ndarray) -> tuple[LpStatus, np.ndarray | None, np.ndarray | None, int]:
        """Phase 2 on a private copy; returns ``(status, z, duals, pivots)``."""
        saved = self.tab.copy(), self.basis.copy(), self.pivots
        try:
            cost = np.concatenate([cz, np.zeros(self.n_real - self.nz)])
            status = self._optimize(cost)
            if status is not LpStatus.OPTIMAL:
                return status, None, None, self.pivots
            values = np.zeros(self.n_real)
            values[self.basis] = self.tab[:, -1]
            z = values[: self.nz]
            duals = _verify_basis(self.G, self.h, cost, self.basis, self.row_ids)
            return status, z, duals, self.pivots
        finally:
            self.tab, self.basis, self.pivots = saved


def _verify_basis(G, h, cost, basis, row_ids) -> np.ndarray:
    """Re-solve the basis from the original data and check optimality conditions.

    Returns the dual vector (zero on redundant rows).
    """
    rows = G.shape[0]
    full = np.hstack([G, np.eye(rows)])[row_ids]
    h = h[row_ids]
    B = full[:, basis]
    xb = np.linalg.solve(B, h)
    scale = max(1.0, np.abs(h).max())
    if (xb < -1e-7 * scale).any():
        raise ArithmeticError("simplex returned a primal-infeasible basis")
    y = np.linalg.solve(B.T, cost[basis])
    reduced = cost - full.T @ y
    if (reduced < -1e-7 * max(1.0, np.abs(cost).max())).any():
        raise ArithmeticError("simplex returned a basis with a negative reduced cost")
    duals = np.zeros(rows)
    duals[row_ids] = y
    return duals


class Simplex:
    """Phase 1 solved once; :meth:`optimize` then runs phase 2 per objective."""

    def __init__(self, A_ub, b_ub, bounds=None, cap: int = DEFAULT_DIMENSION_CAP):
        A_ub = np.asarray(A_ub, dtype=float)
        n = A_ub.shape[1]
        self.problem = LpProblem(np.zeros(n), A_ub, b_ub, bounds)
        size = n + A_ub.shape[0]
        if size > cap:
            raise DimensionCap(f"{size} variables + constraints exceed cap {cap}")
        self._std = _Standard(self.problem)
        self._tab = _Tableau(self._std.G, self._std.h)

    @property
    def feasible(self) -> bool:
        return self._tab.feasible

    def optimize(self, objective, maximize: bool = False) -> LpResult:
        if not self.feasible:
            return LpResult(LpStatus.INFEASIBLE, pivots=self._tab.pivots)
        c = np.asarray(objective, dtype=float)
        cz, const = self._std.objective(c, maximize)
        status, z, duals, pivots = self._tab.minimize(cz)
        if status is not LpStatus.OPTIMAL:
            return LpResult(status, pivots=pivots)
        x = self._std.to_x(z)
        value = float(c @ x)
        return LpResult(LpStatus.OPTIMAL, value, x, pivots, duals[: self._std.num_ub])


def simplex_solve(p: LpProblem, cap: int = DEFAULT_DIMENSION_CAP) -> LpResult:
    """Solve a single LP."""
    return Simplex(p.A_ub, p.b_ub, p.bounds, cap).optimize(p.objective, p.maximize)
