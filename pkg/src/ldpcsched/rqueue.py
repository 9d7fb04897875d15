"""Fixed-capacity indexed max-heap with updateable keys.

Backs the residual queue of the dynamic schedules: every message (or check
node) permanently owns one slot, priorities are residual values, and the
total order is (key descending, item index ascending) so decode traces are
reproducible. Nothing is ever removed; "popping" in the decoding algorithms
means reading the max and setting its key to zero.

The heap primitives are numba-jitted free functions over plain arrays so the
decoder hot loops can call them directly; ResidualQueue is a thin wrapper.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _beats(keys, a, b):
    # total order: larger key wins, ties go to the smaller item index
    return keys[a] > keys[b] or (keys[a] == keys[b] and a < b)


@njit(cache=True)
def _sift_up(keys, heap, pos, i):
    item = heap[i]
    while i > 0:
        parent = (i - 1) >> 1
        if _beats(keys, item, heap[parent]):
            heap[i] = heap[parent]
            pos[heap[i]] = i
            i = parent
        else:
            break
    heap[i] = item
    pos[item] = i


@njit(cache=True)
def _sift_down(keys, heap, pos, i, size):
    item = heap[i]
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        best = left
        right = left + 1
        if right < size and _beats(keys, heap[right], heap[left]):
            best = right
        if _beats(keys, heap[best], item):
            heap[i] = heap[best]
            pos[heap[i]] = i
            i = best
        else:
            break
    heap[i] = item
    pos[item] = i


@njit(cache=True)
def heap_build(keys, heap, pos):
    n = keys.shape[0]
    for i in range(n):
        heap[i] = i
        pos[i] = i
    for i in range(n // 2 - 1, -1, -1):
        _sift_down(keys, heap, pos, i, n)


@njit(cache=True)
def heap_update(keys, heap, pos, item, new_key):
    old = keys[item]
    keys[item] = new_key
    i = pos[item]
    if new_key > old:
        _sift_up(keys, heap, pos, i)
    elif new_key < old:
        _sift_down(keys, heap, pos, i, keys.shape[0])
    # equal keys leave the arrangement valid


@njit(cache=True)
def heap_peek(heap):
    return heap[0]


class ResidualQueue:
    """Max-priority queue over items 0..capacity-1 with in-place key update."""

    def __init__(self, keys: np.ndarray):
        keys = np.ascontiguousarray(keys, dtype=np.float64)
        if keys.ndim != 1 or keys.shape[0] < 1:
            raise ValueError("keys must be a non-empty 1-D vector")
        if not np.all(np.isfinite(keys)) or np.any(keys < 0.0):
            raise ValueError("keys must be finite and non-negative")
        self.keys = keys.copy()
        self.heap = np.empty(self.keys.shape[0], dtype=np.int32)
        self.pos = np.empty(self.keys.shape[0], dtype=np.int32)
        heap_build(self.keys, self.heap, self.pos)

    @classmethod
    def build(cls, keys) -> "ResidualQueue":
        return cls(np.asarray(keys, dtype=np.float64))

    @property
    def capacity(self) -> int:
        return int(self.keys.shape[0])

    def update_key(self, item: int, new_key: float) -> None:
        if not 0 <= item < self.capacity:
            raise IndexError(f"item {item} outside [0, {self.capacity})")
        if not np.isfinite(new_key) or new_key < 0.0:
            raise ValueError(f"key must be finite and non-negative, got {new_key}")
        heap_update(self.keys, self.heap, self.pos, item, float(new_key))

    def peek_max(self) -> tuple[int, float]:
        """Item maximizing (key, -index), without mutation."""
        top = int(heap_peek(self.heap))
        return top, float(self.keys[top])

    def key_of(self, item: int) -> float:
        return float(self.keys[item])
