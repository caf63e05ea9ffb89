"""The non-differentiable embedding-capacity curve of nested ellipsoids.

For ``M_a = E(1, a)`` with ``a >= 1`` the curve ``a -> c_{M_a0}(M_a)`` equals
1 for ``a >= a0`` and drops at least like ``sqrt(a / a0)`` below, so its
one-sided difference quotients at ``a0`` disagree.  Curve values are ECH
upper bounds at a finite truncation; flatness above ``a0`` is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from capax.ellipsoid import EllipsoidSpec, embedding_factor
from capax.errors import CapaxError
from capax.exact import as_rat, format_rat

DEFAULT_TRUNCATION = 200
AGREEMENT_TOL = 1e-9


def family_member(a) -> EllipsoidSpec:
    return EllipsoidSpec((Fraction(1), as_rat(a)))


@dataclass(frozen=True)
class CurveSample:
    a0: Fraction
    points: tuple[tuple[Fraction, Fraction], ...]
    truncation_j: int
    volume_limited: frozenset = field(default_factory=frozenset)

    def value(self, a) -> Fraction:
        a = as_rat(a)
        for x, v in self.points:
            if x == a:
                return v
        raise CapaxError(f"curve has no sample at a = {format_rat(a)}")

    def violations(self) -> list[str]:
        """Grid points breaking flatness, the volume bound or monotonicity."""
        out = []
        for a, v in self.points:
            if a >= self.a0 and v != 1:
                out.append(f"value {format_rat(v)} != 1 at a = {format_rat(a)} >= a0")
            if a < self.a0 and v * v * self.a0 > a:
                out.append(f"volume bound exceeded at a = {format_rat(a)}")
        for (a, v), (b, w) in zip(self.points, self.points[1:]):
            if w < v:
                out.append(f"decreasing between {format_rat(a)} and {format_rat(b)}")
        return out

    def to_csv(self) -> str:
        rows = ["a,value,a_float,value_float"]
        for a, v in self.points:
            rows.append(f"{format_rat(a)},{format_rat(v)},{float(a):.12g},{float(v):.12g}")
        return "\n".join(rows) + "\n"


def capacity_curve(a0, grid: Iterable, truncation_j: int = DEFAULT_TRUNCATION) -> CurveSample:
    a0 = as_rat(a0)
    if a0 < 1:
        raise CapaxError("a0 must be >= 1")
    pts = sorted({as_rat(a) for a in grid})
    if any(a < 1 for a in pts):
        raise CapaxError("grid values must be >= 1")
    src = family_member(a0)
    values, limited = [], set()
    for a in pts:
        verdict = embedding_factor(src, family_member(a), truncation_j)
        values.append((a, verdict.factor))
        if verdict.volume_limited:
            limited.add(a)
    return CurveSample(a0, tuple(values), truncation_j, frozenset(limited))


def auto_grid(a0, h, reach: int = 10, coarse: int = 20) -> list[Fraction]:
    """``a0 + k*h`` for ``|k| <= reach`` plus ``coarse`` even steps over ``[1, 2*a0]``."""
    a0, h = as_rat(a0), as_rat(h)
    pts = {a0 + k * h for k in range(-reach, reach + 1)}
    pts |= {1 + Fraction(i, coarse) * (2 * a0 - 1) for i in range(coarse + 1)}
    return sorted(a for a in pts if a >= 1)


@dataclass(frozen=True)
class KinkReport:
    a0: Fraction
    h: Fraction
    left: Fraction
    right: Fraction
    threshold: Fraction

    @property
    def passed(self) -> bool:
        return self.right == 0 and self.left >= self.threshold

    def to_json(self) -> dict:
        return {
            "a0": format_rat(self.a0),
            "h": format_rat(self.h),
            "left_quotient": format_rat(self.left),
            "right_quotient": format_rat(self.right),
            "threshold": format_rat(self.threshold),
            "pass": self.passed,
        }


def kink_certificate(curve: CurveSample, h, threshold=None) -> KinkReport:
    h = as_rat(h)
    if h <= 0:
        raise CapaxError("step h must be positive")
    a0 = curve.a0
    threshold = Fraction(1, 4) / a0 if threshold is None else as_rat(threshold)
    mid = curve.value(a0)
    left = (mid - curve.value(a0 - h)) / h
    right = (curve.value(a0 + h) - mid) / h
    return KinkReport(a0, h, left, right, threshold)


Curve = Mapping | Callable


def _sample(curve: Curve, a: Fraction) -> Fraction:
    v = curve(a) if callable(curve) else curve[a]
    # floats and Decimals convert exactly; the tolerance absorbs their rounding
    return Fraction(v)


def one_sided_quotients(curve: Curve, a0: Fraction, h: Fraction) -> tuple[Fraction, Fraction]:
    try:
        mid = _sample(curve, a0)
        return (mid - _sample(curve, a0 - h)) / h, (_sample(curve, a0 + h) - mid) / h
    except KeyError as exc:
        raise CapaxError(f"curve lacks a sample at {exc.args[0]}") from None


@dataclass(frozen=True)
class GenerationVerdict:
    refuted: bool
    a0: Fraction
    h: Fraction
    target: KinkReport
    inputs: dict[str, tuple[Fraction, Fraction]]

    def to_json(self) -> dict:
        return {
            "refuted": self.refuted,
            "a0": format_rat(self.a0),
            "h": format_rat(self.h),
            "target": self.target.to_json(),
            "inputs": {
                k: {"left": float(l), "right": float(r)} for k, (l, r) in self.inputs.items()
            },
        }


def refute_finite_generation(
    curves: Mapping[str, Curve],
    a0,
    h=Fraction(1, 10**12),
    truncation_j: int = DEFAULT_TRUNCATION,
    threshold=None,
    tol: float = AGREEMENT_TOL,
) -> GenerationVerdict:
    """Check that no differentiable function of ``curves`` can be the kinked target.

    Each input curve (a mapping ``a -> value`` or a callable) is sampled at
    ``a0`` and ``a0 +- h``; its one-sided quotients must agree within ``tol``,
    otherwise it witnesses nothing and is rejected.  Smooth inputs need ``h``
    small enough for their second-order term to fall below ``tol``, hence the
    tiny default.  The target's quotients come from exact ECH values.
    """
    a0, h = as_rat(a0), as_rat(h)
    if h <= 0:
        raise CapaxError("step h must be positive")
    quotients = {}
    for name, curve in curves.items():
        left, right = one_sided_quotients(curve, a0, h)
        if abs(left - right) > Fraction(tol):
            raise CapaxError(
                f"input {name!r} is not differentiable at a0 within tolerance: "
                f"left {float(left):.6g}, right {float(right):.6g}"
            )
        quotients[name] = (left, right)
    target_curve = capacity_curve(a0, (a0 - h, a0, a0 + h), truncation_j)
    report = kink_certificate(target_curve, h, threshold)
    refuted = report.passed and report.left - report.right >= report.threshold
    return GenerationVerdict(refuted, a0, h, report, quotients)
