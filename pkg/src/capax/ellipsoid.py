"""Ellipsoids E(a), their volumes and widths, and ECH embedding bounds.

Capacities are in units of pi and volumes in units of pi**n / n!, so
``volume(E(a))`` is the product of the weights and the unit ball has width 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from capax.ech import ech_prefix
from capax.errors import CapaxError
from capax.exact import as_rat, exact_root, format_rat

DEFAULT_TRUNCATION = 1000


@dataclass(frozen=True, order=True)
class EllipsoidSpec:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        ws = tuple(sorted(as_rat(w) for w in self.weights))
        if not ws:
            raise CapaxError("ellipsoid needs at least one weight")
        if ws[0] <= 0:
            raise CapaxError("ellipsoid weights must be positive")
        object.__setattr__(self, "weights", ws)

    @property
    def dim(self) -> int:
        return len(self.weights)

    def scale(self, c) -> EllipsoidSpec:
        c = as_rat(c)
        if c <= 0:
            raise CapaxError("scale must be positive")
        return EllipsoidSpec(tuple(c * w for w in self.weights))

    def __str__(self) -> str:
        return "E(" + ",".join(format_rat(w) for w in self.weights) + ")"


def E(*weights) -> EllipsoidSpec:
    """Shorthand: ``E(1, 4)``."""
    return EllipsoidSpec(tuple(weights))


def volume(e: EllipsoidSpec) -> Fraction:
    return math.prod(e.weights, start=Fraction(1))


def gromov_width(e: EllipsoidSpec) -> Fraction:
    return e.weights[0]


@dataclass(frozen=True)
class EmbedVerdict:
    """Upper bound on ``sup{c : c*src embeds into dst}``.

    ``volume_bound_pow`` is the n-th power of the volume bound
    ``(vol dst / vol src) ** (1/n)``.  ``volume_limited`` is set when that
    irrational bound lies strictly below every ECH ratio; ``factor`` then
    holds the best rational ratio, which is still a valid upper bound.
    ``exact_in_limit`` is true only in dimension 4 (two weights), where the
    bound converges to the true value as the truncation grows.
    """

    factor: Fraction
    truncation_j: int
    volume_bound_pow: Fraction
    binding_index: int
    dim: int
    volume_limited: bool = False

    @property
    def exact_in_limit(self) -> bool:
        return self.dim == 2

    @property
    def truncated(self) -> bool:
        # minimum sits on the last checked index, so a longer prefix may lower it
        return self.binding_index == self.truncation_j


def _same_dim(src: EllipsoidSpec, dst: EllipsoidSpec, truncation_j: int) -> None:
    if src.dim != dst.dim:
        raise CapaxError(f"dimension mismatch: {src.dim} vs {dst.dim} weights")
    if truncation_j < 1:
        raise CapaxError("truncation_j must be >= 1")


def embedding_factor(
    src: EllipsoidSpec, dst: EllipsoidSpec, truncation_j: int = DEFAULT_TRUNCATION
) -> EmbedVerdict:
    _same_dim(src, dst, truncation_j)
    n = src.dim
    cs = ech_prefix(src.weights, truncation_j + 1).values
    cd = ech_prefix(dst.weights, truncation_j + 1).values
    best, best_j = None, 0
    for j in range(1, truncation_j + 1):
        r = cd[j] / cs[j]
        if best is None or r < best:
            best, best_j = r, j
    vol_pow = volume(dst) / volume(src)
    if best**n <= vol_pow:
        return EmbedVerdict(best, truncation_j, vol_pow, best_j, n)
    root = exact_root(vol_pow, n)
    if root is not None:
        return EmbedVerdict(root, truncation_j, vol_pow, 0, n)
    return EmbedVerdict(best, truncation_j, vol_pow, 0, n, volume_limited=True)


def ech_dominates(
    src: EllipsoidSpec, dst: EllipsoidSpec, truncation_j: int = DEFAULT_TRUNCATION
) -> bool:
    """True iff ``c_j(src) <= c_j(dst)`` for ``1 <= j <= truncation_j``."""
    _same_dim(src, dst, truncation_j)
    cs = ech_prefix(src.weights, truncation_j + 1).values
    cd = ech_prefix(dst.weights, truncation_j + 1).values
    return all(x <= y for x, y in zip(cs[1:], cd[1:]))


def parse_weights(text: str | Sequence) -> EllipsoidSpec:
    if isinstance(text, str):
        parts = [p for p in text.split(",") if p.strip()]
        return EllipsoidSpec(tuple(as_rat(p) for p in parts))
    return EllipsoidSpec(tuple(text))
