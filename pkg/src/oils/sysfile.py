"""Plain-text interval system files with exact hexadecimal floats.

Layout::

    m n
    <m lines of n "lo hi" pairs>   # matrix A, one row per line
    <m lines of one "lo hi" pair>  # right-hand side b

Blank lines and everything after ``#`` are ignored. Numbers are written
with :meth:`float.hex`; any literal accepted by :func:`float` is read, so
hand-written decimal files also work.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterator, TextIO

import numpy as np

from .errors import SystemFileError
from .interval import IntervalMatrix, IntervalVector


def _tokens(text: str) -> Iterator[tuple[int, list[tuple[int, str]]]]:
    """Yield ``(line_number, [(column, token), ...])`` for non-blank lines."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in line.split():
            col = line.index(part, col)
            toks.append((col + 1, part))
            col += len(part)
        if toks:
            yield lineno, toks


def _number(tok: str, lineno: int, col: int) -> float:
    try:
        value = float.fromhex(tok) if "0x" in tok.lower() else float(tok)
    except ValueError:
        raise SystemFileError(f"not a number: {tok!r}", lineno, col) from None
    if np.isnan(value):
        raise SystemFileError("NaN is not a valid bound", lineno, col)
    return value


def _pairs(toks, count: int, lineno: int, what: str) -> tuple[np.ndarray, np.ndarray]:
    if len(toks) != 2 * count:
        # point at the first surplus token, or at the last one present
        col = toks[2 * count][0] if len(toks) > 2 * count else toks[-1][0]
        raise SystemFileError(
            f"{what}: expected {2 * count} numbers ({count} lo/hi pairs), found {len(toks)}", lineno, col
        )
    vals = [_number(t, lineno, c) for c, t in toks]
    lo = np.array(vals[0::2])
    hi = np.array(vals[1::2])
    for k in np.flatnonzero(lo > hi):
        raise SystemFileError(f"{what}: lower bound exceeds upper bound", lineno, toks[2 * k][0])
    return lo, hi


def loads(text: str) -> tuple[IntervalMatrix, IntervalVector]:
    """Parse a system file; errors carry the offending line and column."""
    lines = list(_tokens(text))
    if not lines:
        raise SystemFileError("empty file: expected header 'm n'", 1, 1)
    lineno, head = lines[0]
    if len(head) != 2:
        raise SystemFileError("header must be two integers 'm n'", lineno, head[0][0])
    dims = []
    for col, tok in head:
        try:
            dims.append(int(tok))
        except ValueError:
            raise SystemFileError(f"dimension is not an integer: {tok!r}", lineno, col) from None
    m, n = dims
    if not (m >= n >= 1):
        raise SystemFileError(f"need m >= n >= 1, got {m} x {n}", lineno, head[0][0])
    body = lines[1:]
    if len(body) != 2 * m:
        last = body[-1][0] if body else lineno
        raise SystemFileError(f"expected {2 * m} data lines after the header, found {len(body)}", last, 1)
    A_lo = np.empty((m, n))
    A_hi = np.empty((m, n))
    b_lo = np.empty(m)
    b_hi = np.empty(m)
    for i, (ln, toks) in enumerate(body[:m]):
        A_lo[i], A_hi[i] = _pairs(toks, n, ln, f"matrix row {i + 1}")
    for i, (ln, toks) in enumerate(body[m:]):
        lo, hi = _pairs(toks, 1, ln, f"right-hand side row {i + 1}")
        b_lo[i], b_hi[i] = lo[0], hi[0]
    return IntervalMatrix(A_lo, A_hi), IntervalVector(b_lo, b_hi)


def dumps(A: IntervalMatrix, b: IntervalVector, comment: str | None = None) -> str:
    m, n = A.shape
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"# {line}\n")
    out.write(f"{m} {n}\n")
    for i in range(m):
        out.write(" ".join(f"{float(A.lo[i, j]).hex()} {float(A.hi[i, j]).hex()}" for j in range(n)))
        out.write("\n")
    for i in range(m):
        out.write(f"{float(b.lo[i]).hex()} {float(b.hi[i]).hex()}\n")
    return out.getvalue()


def load(source: str | Path | TextIO) -> tuple[IntervalMatrix, IntervalVector]:
    if hasattr(source, "read"):
        return loads(source.read())
    return loads(Path(source).read_text())


def dump(A: IntervalMatrix, b: IntervalVector, target: str | Path | TextIO, comment: str | None = None) -> None:
    text = dumps(A, b, comment)
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_text(text)
