"""Shared enclosure vector with improve-only, per-component atomic writes."""

from __future__ import annotations

import threading

import numpy as np

from .interval import IntervalVector


class SharedBox:
    """Interval vector shared between worker threads.

    Each component is an immutable ``(lo, hi)`` tuple, so a reader never sees
    a torn component. Writers go through :meth:`improve`, a compare-and-swap
    loop that only ever replaces a component by its intersection with the
    proposed value. Readers take no lock.
    """

    def __init__(self, box: IntervalVector, record_history: bool = False):
        self._cells = [(float(a), float(b)) for a, b in zip(box.lo, box.hi)]
        self._locks = [threading.Lock() for _ in self._cells]
        self._empty = threading.Event()
        self.history: list[tuple[int, tuple[float, float], tuple[float, float]]] | None = (
            [] if record_history else None
        )
        self._history_lock = threading.Lock()
        self.conflicts = 0

    def __len__(self) -> int:
        return len(self._cells)

    @property
    def is_empty(self) -> bool:
        return self._empty.is_set()

    def mark_empty(self) -> None:
        self._empty.set()

    def read(self, i: int) -> tuple[float, float]:
        return self._cells[i]

    def snapshot(self) -> IntervalVector:
        if self.is_empty:
            return IntervalVector.empty(len(self))
        cells = list(self._cells)
        arr = np.array(cells, dtype=float)
        return IntervalVector(arr[:, 0], arr[:, 1])

    def _compare_and_set(self, i: int, expect, update) -> bool:
        with self._locks[i]:
            if self._cells[i] is not expect:
                return False
            self._cells[i] = update
        if self.history is not None:
            with self._history_lock:
                self.history.append((i, expect, update))
        return True

    def improve(self, i: int, lo: float, hi: float) -> bool:
        """Narrow component ``i`` to its intersection with ``[lo, hi]``.

        Returns True if the stored value changed. An empty intersection
        marks the whole box empty.
        """
        while True:
            cur = self._cells[i]
            new = (max(cur[0], lo), min(cur[1], hi))
            if new[0] > new[1]:
                self.mark_empty()
                return True
            if new == cur:
                return False
            if self._compare_and_set(i, cur, new):
                return True
            self.conflicts += 1

    def improve_all(self, box: IntervalVector) -> bool:
        changed = False
        for i, (a, b) in enumerate(zip(box.lo.tolist(), box.hi.tolist())):
            changed |= self.improve(i, a, b)
        return changed
