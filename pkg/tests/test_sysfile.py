import io

import numpy as np
import pytest

from oils.errors import SystemFileError
from oils.generate import generate_random_system
from oils.interval import IntervalMatrix, IntervalVector
from oils.sysfile import dump, dumps, load, loads


def test_round_trip_is_exact():
    g = generate_random_system(9, 4, 0.137, np.random.default_rng(8))
    A, b = loads(dumps(g.A, g.b, comment="seed 8"))
    assert A == g.A and b == g.b


def test_round_trip_through_files(tmp_path):
    A = IntervalMatrix([[0.1, -np.inf], [-0.0, 5e-324]], [[0.3, np.inf], [0.0, 1e308]])
    b = IntervalVector([1 / 3, -7.0], [2 / 3, -7.0])
    path = tmp_path / "s.txt"
    dump(A, b, path)
    A2, b2 = load(path)
    assert A2 == A and b2 == b
    buf = io.StringIO()
    dump(A, b, buf)
    assert load(io.StringIO(buf.getvalue()))[0] == A


def test_decimal_and_comments():
    text = """
    # a 2 x 1 system
    2 1
    1 2      # row one
    3 4
    0.5 0.75
    -1 1
    """
    A, b = loads(text)
    np.testing.assert_array_equal(A.lo, [[1], [3]])
    np.testing.assert_array_equal(b.hi, [0.75, 1])


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("", 1, 1),
        ("2\n", 1, 1),
        ("2 x\n", 1, 3),
        ("1 2\n", 1, 1),
        ("1 1\n1 2 3\n0 0\n", 2, 5),
        ("1 1\n1 zz\n0 0\n", 2, 3),
        ("1 1\n2 1\n0 0\n", 2, 1),
        ("1 1\n1 2\n0 nan\n", 3, 3),
        ("2 1\n1 2\n3 4\n0 0\n", 4, 1),
    ],
)
def test_errors_name_line_and_column(text, line, column):
    with pytest.raises(SystemFileError) as info:
        loads(text)
    assert info.value.line == line
    assert info.value.column == column
    assert str(info.value).startswith(f"line {line}, column {column}:")
