"""Property tests for the invariants every module promises."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from oils.errors import DivisionByZeroInterval
from oils.interval import (
    Interval,
    IntervalMatrix,
    IntervalVector,
    arith,
    imat_vec,
    intersect,
    sum_bounds,
    v_metric,
    w_metric,
)
from oils.shared import SharedBox
from oils.square import PreconditionedSystem, Status, gs_sweep, jacobi_sweep, precondition, solve_square
from oils.subsquares import choose_subsquares, count_subsquares
from oils.sysfile import dumps, loads

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
# dyadic rationals with few bits: exact as floats, usually inexact after an operation
dyadic = st.builds(lambda k, e: k * 2.0**e, st.integers(-(2**20), 2**20), st.integers(-30, 10))


@st.composite
def intervals(draw, values=finite):
    a, b = draw(values), draw(values)
    return Interval(min(a, b), max(a, b))


@st.composite
def interval_vectors(draw, n=None):
    n = draw(st.integers(1, 6)) if n is None else n
    items = [draw(intervals()) for _ in range(n)]
    return IntervalVector.from_intervals(items)


def exact(op, a: Fraction, b: Fraction) -> Fraction:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    return a * b if op == "mul" else a / b


OPS = ["add", "sub", "mul", "div"]


@settings(max_examples=1000)
@given(st.sampled_from(OPS), intervals(), intervals(), st.floats(0, 1), st.floats(0, 1))
def test_inclusion(op, x, y, s, t):
    xp = x.lo + s * (x.hi - x.lo)
    yp = y.lo + t * (y.hi - y.lo)
    xp, yp = min(max(xp, x.lo), x.hi), min(max(yp, y.lo), y.hi)
    try:
        r = arith(op, x, y)
    except DivisionByZeroInterval:
        assert y.lo <= 0 <= y.hi
        return
    assert r.lo <= exact(op, Fraction(xp), Fraction(yp)) <= r.hi


@settings(max_examples=500)
@given(st.sampled_from(OPS), intervals(dyadic), intervals(dyadic))
def test_outward_rounding_against_rationals(op, x, y):
    assume(not (op == "div" and y.lo <= 0 <= y.hi))
    r = arith(op, x, y)
    ends = [exact(op, Fraction(a), Fraction(b)) for a in (x.lo, x.hi) for b in (y.lo, y.hi)]
    assert Fraction(r.lo) <= min(ends)
    assert max(ends) <= Fraction(r.hi)


@given(intervals(), intervals())
def test_intersect_monotone(x, y):
    z = intersect(x, y)
    assert z.issubset(x) and z.issubset(y)
    assert z.is_empty == (max(x.lo, y.lo) > min(x.hi, y.hi))


@given(st.lists(st.tuples(dyadic, dyadic), min_size=1, max_size=12))
def test_sum_bounds_contains_exact_sum(pairs):
    lo = np.array([min(p) for p in pairs])
    hi = np.array([max(p) for p in pairs])
    s_lo, s_hi = sum_bounds(lo, hi)
    assert Fraction(float(s_lo)) <= sum(map(Fraction, lo.tolist()))
    assert sum(map(Fraction, hi.tolist())) <= Fraction(float(s_hi))


@given(interval_vectors(), st.randoms(use_true_random=False))
def test_metrics_permutation_invariant(u, rnd):
    perm = list(range(len(u)))
    rnd.shuffle(perm)
    v = u.take(perm)
    assert w_metric(v) == pytest.approx(w_metric(u), rel=1e-12)
    assert v_metric(v) == pytest.approx(v_metric(u), rel=1e-12)
    assert v_metric(u) == float(np.prod([u.hi[i] - u.lo[i] for i in range(len(u))]))


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
def test_matrix_vector_inclusion(seed, m, n):
    rng = np.random.default_rng(seed)
    lo = rng.uniform(-10, 10, (m, n))
    A = IntervalMatrix(lo, lo + rng.uniform(0, 2, (m, n)))
    xl = rng.uniform(-10, 10, n)
    x = IntervalVector(xl, xl + rng.uniform(0, 2, n))
    r = imat_vec(A, x)
    Ap = rng.uniform(A.lo, A.hi)
    xp = rng.uniform(x.lo, x.hi)
    prod = [sum(Fraction(Ap[i, j]) * Fraction(xp[j]) for j in range(n)) for i in range(m)]
    assert all(Fraction(r.lo[i]) <= prod[i] <= Fraction(r.hi[i]) for i in range(m))


def random_preconditioned(seed: int, n: int, radius: float) -> PreconditionedSystem | None:
    rng = np.random.default_rng(seed)
    A_point = rng.uniform(-20, 20, (n, n))
    A = IntervalMatrix(A_point - radius, A_point + radius)
    b = rng.uniform(-20, 20, n)
    try:
        P = precondition(A, IntervalVector(b - radius, b + radius))
    except ArithmeticError:
        return None
    return P if P.diagonal_excludes_zero() else None


@settings(max_examples=200, suppress_health_check=[HealthCheck.filter_too_much])
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.sampled_from([0.0, 0.01, 0.1]))
def test_sweeps_narrow_and_gs_dominates(seed, n, radius):
    P = random_preconditioned(seed, n, radius)
    assume(P is not None)
    rng = np.random.default_rng(seed + 1)
    centre = rng.uniform(-5, 5, n)
    X = IntervalVector(centre - rng.uniform(0, 50, n), centre + rng.uniform(0, 50, n))
    gs, jac = gs_sweep(P, X), jacobi_sweep(P, X)
    assert gs.issubset(X) and jac.issubset(X)
    assert gs.issubset(jac)


@settings(max_examples=100, suppress_health_check=[HealthCheck.filter_too_much])
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_fixpoint_idempotent(seed, n):
    P = random_preconditioned(seed, n, 0.01)
    assume(P is not None)
    X = IntervalVector(np.full(n, -1e3), np.full(n, 1e3))
    for _ in range(200):
        nxt = gs_sweep(P, X)
        if nxt == X or nxt.is_empty:
            break
        X = nxt
    assume(gs_sweep(P, X) == X)
    assert gs_sweep(P, gs_sweep(P, X)) == X


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.0, 0.05, 0.3]))
def test_square_soundness(seed, n, radius):
    rng = np.random.default_rng(seed)
    A_point = rng.uniform(-20, 20, (n, n))
    x = rng.uniform(-20, 20, n)
    A = IntervalMatrix(A_point - radius, A_point + radius)
    b_point = A_point @ x
    # b wide enough to absorb the rounding of A' x
    slack = radius + 1e-9 * (1 + np.abs(b_point))
    b = IntervalVector(b_point - slack, b_point + slack)
    out = solve_square(A, b)
    assert out.status is not Status.PROVEN_UNSOLVABLE
    if out.status is Status.ENCLOSURE:
        assert out.box.contains(x)


@settings(max_examples=300)
@given(st.data())
def test_selection_invariants(data):
    n = data.draw(st.integers(1, 30))
    m = data.draw(st.integers(n, 80))
    overlap = data.draw(st.integers(0, n - 1))
    seed = data.draw(st.integers(0, 2**32 - 1))
    sel = choose_subsquares(m, n, overlap, np.random.default_rng(seed))
    assert len(sel) == count_subsquares(m, n, overlap)
    assert sel.covered() == set(range(m))
    assert all(len(s) == n and len(set(s)) == n for s in sel)


any_float = st.floats(allow_nan=False)


@settings(max_examples=200)
@given(st.data())
def test_system_file_round_trip(data):
    n = data.draw(st.integers(1, 4))
    m = data.draw(st.integers(n, 6))
    pairs = st.tuples(any_float, any_float).map(sorted)
    A = [[data.draw(pairs) for _ in range(n)] for _ in range(m)]
    b = [data.draw(pairs) for _ in range(m)]
    A_iv = IntervalMatrix(np.array([[p[0] for p in r] for r in A]), np.array([[p[1] for p in r] for r in A]))
    b_iv = IntervalVector(np.array([p[0] for p in b]), np.array([p[1] for p in b]))
    A2, b2 = loads(dumps(A_iv, b_iv, "round trip"))
    # compare bit patterns so that signed zeros count
    for u, v in ((A_iv.lo, A2.lo), (A_iv.hi, A2.hi), (b_iv.lo, b2.lo), (b_iv.hi, b2.hi)):
        assert u.tobytes() == v.tobytes()


@given(st.lists(st.tuples(st.integers(0, 2), finite, finite), max_size=40))
def test_shared_box_only_narrows(proposals):
    box = SharedBox(IntervalVector(np.full(3, -1e6), np.full(3, 1e6)))
    for i, a, c in proposals:
        before = box.snapshot()
        box.improve(i, min(a, c), max(a, c))
        after = box.snapshot()
        if after.is_empty:
            break
        assert after.issubset(before)
        assert after.lo[i] >= min(a, c) and after.hi[i] <= max(a, c)
