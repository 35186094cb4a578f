import numpy as np
import pytest

from oils.interval import IntervalMatrix, IntervalVector


@pytest.fixture
def worked_example():
    """The 3 x 2 motivating system with two overlapping subsquares."""
    A = IntervalMatrix(
        [[-0.8, -20.1], [-15.6, 14.8], [18.8, 8.1]],
        [[0.2, -19.5], [-15.2, 16.7], [20.1, 9.5]],
    )
    b = IntervalVector([292.1, -361.9, 28.4], [292.7, -361.1, 30.3])
    return A, b


# Interval hulls of the worked example's subsquares, computed once with
# exact_hull and frozen here. Rows are 0-based.
HULL_ROWS_01 = IntervalVector([6.780954780199023, -15.372956138074223], [9.75380089899524, -14.435285563194077])
HULL_ROWS_12 = IntervalVector([7.357076380321626, -16.268449833571086], [9.195745788377813, -13.6662627661416])
HULL_FULL = IntervalVector([7.357076380321625, -15.372956138074223], [9.195745788377813, -14.443677918795093])


def padded(box: IntervalVector, pad: float = 1e-7) -> IntervalVector:
    return IntervalVector(box.lo - pad, box.hi + pad)


def planted(m, n, radius, seed):
    """Random system around a point system with a known solution ``x*``."""
    from oils.generate import generate_random_system

    return generate_random_system(m, n, radius, np.random.default_rng(seed))


# One line per acceptance criterion, filled in by test_acceptance.py and
# echoed at the end of the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
