"""Boundary-helicity families of scaled starshaped shells.

The shell ``M_a = (r+a)K minus int K`` has two boundary components.  After
normalising the form by the volume of ``K`` their helicities are ``-1``
(inner) and ``(r+a)**(k*n)`` (outer), independent of the body ``K``.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from capax.errors import CapaxError
from capax.exact import LESS, ExtRat, as_rat, cmp_pow, format_ext, format_rat, is_inf
from capax.partitions import BoundaryVector, ICollectionReport, is_I_collection

INNER, OUTER = "inner", "outer"


def symmetric_samples(a0, count: int) -> tuple[Fraction, ...]:
    """``count`` equally spaced points of ``[-a0, a0]``; a single point is 0."""
    a0 = as_rat(a0)
    if count < 1:
        raise CapaxError("need at least one sample")
    if count == 1:
        return (Fraction(0),)
    return tuple(a0 * (Fraction(2 * i, count - 1) - 1) for i in range(count))


@dataclass(frozen=True)
class ShellSpec:
    """Parameters of a shell family.

    With ``check_bounds`` (the default) the admissibility conditions
    ``a0 < r - 1`` and ``(r + a0)**(k*n) < 2`` are enforced; pass False to
    build families that deliberately violate them.
    """

    r: Fraction
    k: int
    n: int
    a0: Fraction
    samples: tuple[Fraction, ...]
    check_bounds: InitVar[bool] = True

    def __post_init__(self, check_bounds):
        r, a0 = as_rat(self.r), as_rat(self.a0)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a0", a0)
        if isinstance(self.samples, int):
            samples = symmetric_samples(a0, self.samples)
        else:
            samples = tuple(sorted(as_rat(s) for s in self.samples))
        object.__setattr__(self, "samples", samples)
        if self.k < 1 or self.k % 2:
            raise CapaxError("k must be a positive even integer")
        if self.n < 2:
            raise CapaxError("n must be at least 2")
        if r <= 1:
            raise CapaxError("r must exceed 1")
        if a0 <= 0:
            raise CapaxError("a0 must be positive")
        if any(abs(s) > a0 for s in samples):
            raise CapaxError("samples must lie in [-a0, a0]")
        if set(samples) != {-s for s in samples}:
            raise CapaxError("samples must be symmetric about 0")
        if len(set(samples)) != len(samples):
            raise CapaxError("samples must be distinct")
        if check_bounds and not self.admissible:
            raise CapaxError("need a0 < r - 1 and (r + a0)^(k n) < 2")

    @property
    def kn(self) -> int:
        return self.k * self.n

    @property
    def admissible(self) -> bool:
        return self.a0 < self.r - 1 and cmp_pow(self.r + self.a0, 2, self.kn) == LESS

    def to_json(self) -> dict:
        return {
            "r": format_rat(self.r),
            "k": self.k,
            "n": self.n,
            "a0": format_rat(self.a0),
            "samples": [format_rat(s) for s in self.samples],
        }


@dataclass(frozen=True)
class ShellHelicity:
    inner: Fraction
    outer: Fraction

    @property
    def total(self) -> Fraction:
        return self.inner + self.outer


def _check_index(spec: ShellSpec, a) -> Fraction:
    a = as_rat(a)
    if abs(a) > spec.a0:
        raise CapaxError(f"a = {format_rat(a)} outside [-a0, a0]")
    if spec.r + a <= 1:
        raise CapaxError("outer radius r + a must exceed the inner radius 1")
    return a


def shell_helicity(spec: ShellSpec, a) -> ShellHelicity:
    a = _check_index(spec, a)
    return ShellHelicity(Fraction(-1), (spec.r + a) ** spec.kn)


def shell_sum(spec: ShellSpec, a) -> Fraction:
    """Total boundary helicity, which is also the normalised volume of the shell."""
    a = _check_index(spec, a)
    return -1 + (spec.r + a) ** spec.kn


@dataclass(frozen=True)
class ShellFamily:
    spec: ShellSpec
    members: tuple[tuple[Fraction, BoundaryVector], ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, k):
        return self.members[k]

    def vector(self, a) -> BoundaryVector:
        return dict(self.members)[as_rat(a)]

    def to_json(self) -> list:
        return [{"a": format_rat(a), "values": v.to_json()} for a, v in self.members]


def build_family(spec: ShellSpec) -> ShellFamily:
    if not spec.samples:
        raise CapaxError("empty sample set")
    members = []
    for a in spec.samples:
        h = shell_helicity(spec, a)
        members.append((a, BoundaryVector((INNER, OUTER), {INNER: h.inner, OUTER: h.outer})))
    return ShellFamily(spec, tuple(members))


@dataclass(frozen=True)
class NormalizedReport:
    width_ok: bool
    width_margin: Fraction
    inner_ok: bool
    inner_margin: Fraction

    @property
    def passed(self) -> bool:
        return self.width_ok and self.inner_ok

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            # 2 - (r+a0)^(2n) > 0  <=>  normalised volume, hence width, stays below 1
            "width": {"pass": self.width_ok, "margin": format_rat(self.width_margin)},
            # r - a0 - 1 > 0: every shell's inner radius 1 is below r + a
            "inner_radius": {"pass": self.inner_ok, "margin": format_rat(self.inner_margin)},
        }


def check_normalized_hypotheses(spec: ShellSpec) -> NormalizedReport:
    if spec.k != 2:
        raise CapaxError("normalised checks apply to k = 2 (symplectic shells) only")
    width_margin = 2 - (spec.r + spec.a0) ** (2 * spec.n)
    inner_margin = spec.r - spec.a0 - 1
    return NormalizedReport(width_margin > 0, width_margin, inner_margin > 0, inner_margin)


@dataclass(frozen=True)
class SeparationReport:
    """``C = max(C0, C1)``.  When ``C < 1``, ``c_A(W_a') <= C**(1/n) < 1`` for ``a'`` not in A."""

    C: ExtRat
    n: int
    icheck: ICollectionReport

    @property
    def separates(self) -> bool:
        return self.C < 1

    def to_json(self) -> dict:
        return {
            "C": format_ext(self.C),
            "n": self.n,
            "separates": self.separates,
            "icheck": self.icheck.to_json(),
        }


def separation_bound(family: ShellFamily, mapper: Callable = map) -> SeparationReport:
    rep = is_I_collection(family, mapper=mapper)
    return SeparationReport(rep.bound, family.spec.n, rep)


@dataclass(frozen=True)
class Distinction:
    """``c_low(W_a') <= C**(1/n) < 1 <= c_high(W_a')`` for the witness ``a'``.

    ``low`` names the subset missing ``a'`` ("A" or "Aprime"); the other
    subset contains it and so its capacity is exactly 1 there.
    """

    witness: Fraction
    low: str
    high: str
    C: Fraction
    n: int

    def to_json(self) -> dict:
        return {
            "witness": format_rat(self.witness),
            "low": self.low,
            "high": self.high,
            "upper_bound_pow_n": format_rat(self.C),
            "n": self.n,
            "lower_bound": "1/1",
        }


def distinguish(
    family: ShellFamily,
    A: Iterable,
    Aprime: Iterable,
    separation: SeparationReport | None = None,
) -> Distinction:
    A, Aprime = frozenset(map(as_rat, A)), frozenset(map(as_rat, Aprime))
    if A == Aprime:
        raise CapaxError("subsets are equal; nothing to distinguish")
    positive = {a for a, _ in family if a > 0}
    if not (A | Aprime) <= positive:
        raise CapaxError("subsets must consist of positive sample indices")
    sep = separation or separation_bound(family)
    if not sep.separates or is_inf(sep.C):
        raise CapaxError(f"family does not separate: C = {format_ext(sep.C)} >= 1")
    witness = min(A ^ Aprime)
    low, high = ("Aprime", "A") if witness in A else ("A", "Aprime")
    return Distinction(witness, low, high, sep.C, sep.n)


def subsets(items: Sequence) -> list[frozenset]:
    out = [frozenset()]
    for x in items:
        out += [s | {x} for s in out]
    return out
