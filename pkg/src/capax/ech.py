"""ECH capacity sequences of ellipsoids.

For weights ``a`` the sequence ``N_j(a)`` lists every value ``m . a`` with
``m`` a nonnegative integer vector, sorted with multiplicity.  It is produced
by walking lattice points in order of their value with a heap.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from capax.errors import CapaxError, ResourceLimitError
from capax.exact import as_rat

MAX_PREFIX = 10**6


@dataclass(frozen=True)
class CapPrefix:
    """First ``len(values)`` terms of the sequence for ``weights``."""

    weights: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> Fraction:
        return self.values[j]


def _check_weights(weights: Sequence) -> tuple[Fraction, ...]:
    ws = tuple(as_rat(w) for w in weights)
    if not ws:
        raise CapaxError("weight sequence is empty")
    if any(w <= 0 for w in ws):
        raise CapaxError("weights must be positive")
    return ws


def lattice_values(weights: Sequence) -> Iterator[Fraction]:
    """Yield ``m . a`` over all ``m`` in increasing order, with repetitions.

    Each lattice point enters the heap at most once; ties between equal
    values are broken by the point itself, which keeps the order stable.
    """
    ws = _check_weights(weights)
    n = len(ws)
    origin = (0,) * n
    heap = [(Fraction(0), origin)]
    seen = {origin}
    while heap:
        value, m = heapq.heappop(heap)
        yield value
        for i in range(n):
            nxt = m[:i] + (m[i] + 1,) + m[i + 1 :]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (value + ws[i], nxt))
        # points below the current value can never be reached again
        seen.discard(m)


def ech_prefix(weights: Sequence, count: int, max_prefix: int = MAX_PREFIX) -> CapPrefix:
    ws = _check_weights(weights)
    if count < 1:
        raise CapaxError("count must be positive")
    if count > max_prefix:
        raise ResourceLimitError(f"prefix length {count} exceeds limit {max_prefix}")
    values = []
    for v in lattice_values(ws):
        values.append(v)
        if len(values) == count:
            break
    return CapPrefix(ws, tuple(values))


def nkj(weights: Sequence, j: int, max_prefix: int = MAX_PREFIX) -> Fraction:
    """The (j+1)-th smallest element of ``{m . a}``, counted with multiplicity."""
    if j < 0:
        raise CapaxError("j must be nonnegative")
    return ech_prefix(weights, j + 1, max_prefix).values[j]
