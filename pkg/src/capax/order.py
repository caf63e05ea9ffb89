"""Order-capacities and monotone generation on finite scalable preorders.

An instance is a finite list of elements ``(base, scale)``.  The preorder is
componentwise comparison of ``scale * base`` for vectors, or truncated ECH
dominance for ellipsoids.  Capacities are columns of values indexed like the
elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, NamedTuple, Sequence

from capax.ellipsoid import DEFAULT_TRUNCATION, EllipsoidSpec, ech_dominates, embedding_factor
from capax.errors import CapaxError
from capax.exact import ExtRat, as_rat, ext_mul

VECTORS, ELLIPSOIDS = "vectors", "ellipsoids"


class Element(NamedTuple):
    base: tuple | EllipsoidSpec
    scale: Fraction = Fraction(1)


def _point(kind: str, e: Element):
    if kind == VECTORS:
        return tuple(e.scale * x for x in e.base)
    return e.base.scale(e.scale)


@dataclass
class ScalableInstance:
    kind: str
    elements: list[Element]
    truncation_j: int = DEFAULT_TRUNCATION
    points: list = field(init=False, repr=False)
    _leq: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in (VECTORS, ELLIPSOIDS):
            raise CapaxError(f"unknown instance kind {self.kind!r}")
        elems = []
        for e in self.elements:
            base, scale = (e if isinstance(e, tuple) and len(e) == 2 else (e, 1))
            scale = as_rat(scale)
            if scale <= 0:
                raise CapaxError("scales must be positive")
            if self.kind == VECTORS:
                base = tuple(as_rat(x) for x in base)
                if not base or any(x <= 0 for x in base):
                    raise CapaxError("vector bases must be nonempty and positive")
            elif not isinstance(base, EllipsoidSpec):
                base = EllipsoidSpec(tuple(base))
            elems.append(Element(base, scale))
        dims = {len(e.base.weights) if self.kind == ELLIPSOIDS else len(e.base) for e in elems}
        if len(dims) > 1:
            raise CapaxError(f"dimension mismatch among elements: {sorted(dims)}")
        self.elements = elems
        self.points = [_point(self.kind, e) for e in elems]
        m = len(elems)
        self._leq = [[self._compare(i, j) for j in range(m)] for i in range(m)]
        self._check_preorder()

    def _compare(self, i: int, j: int) -> bool:
        x, y = self.points[i], self.points[j]
        if self.kind == VECTORS:
            return all(p <= q for p, q in zip(x, y))
        return ech_dominates(x, y, self.truncation_j)

    def _check_preorder(self) -> None:
        m = len(self.elements)
        for i in range(m):
            if not self._leq[i][i]:
                raise CapaxError(f"order not reflexive at element {i}")
        for i in range(m):
            for j in range(m):
                if not self._leq[i][j]:
                    continue
                for k in range(m):
                    if self._leq[j][k] and not self._leq[i][k]:
                        raise CapaxError(f"order not transitive at ({i}, {j}, {k})")

    def __len__(self) -> int:
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return self._leq[i][j]

    def index(self, s) -> int:
        if isinstance(s, int):
            if not 0 <= s < len(self.elements):
                raise CapaxError(f"no element {s}")
            return s
        for k, e in enumerate(self.elements):
            if e == s or self.points[k] == s:
                return k
        raise CapaxError(f"{s!r} is not an element of the instance")


def order_capacity(inst: ScalableInstance, s, sprime) -> ExtRat:
    """``sup{a > 0 : a*s <= s'}``."""
    x, y = inst.points[inst.index(s)], inst.points[inst.index(sprime)]
    if inst.kind == VECTORS:
        if len(x) != len(y):
            raise CapaxError("dimension mismatch")
        return min(q / p for p, q in zip(x, y))
    return embedding_factor(x, y, inst.truncation_j).factor


def monotonize_on(
    leq: Callable[[int, int], bool], size: int, f: Mapping[int, ExtRat]
) -> list[ExtRat]:
    """``F(x) = sup{f(x0) : x0 in dom f, x0 <= x}`` on ``range(size)``, with ``sup {} = 0``."""
    out = []
    for x in range(size):
        vals = [v for x0, v in f.items() if leq(x0, x)]
        out.append(max(vals) if vals else Fraction(0))
    return out


def monotonize(inst: ScalableInstance, f: Mapping) -> list[ExtRat]:
    dom = {inst.index(k): (v if isinstance(v, float) else as_rat(v)) for k, v in f.items()}
    return monotonize_on(inst.leq, len(inst), dom)


@dataclass
class CapacityTable:
    """Named columns, each a tuple of values aligned with the instance elements."""

    columns: dict[str, tuple]

    def __post_init__(self):
        self.columns = {
            name: tuple(v if isinstance(v, float) else as_rat(v) for v in col)
            for name, col in self.columns.items()
        }

    @classmethod
    def from_functions(cls, inst: ScalableInstance, funcs: Mapping[str, Callable]) -> CapacityTable:
        return cls({name: tuple(fn(p) for p in inst.points) for name, fn in funcs.items()})

    def evaluation(self, i: int) -> tuple:
        return tuple(col[i] for col in self.columns.values())

    def violations(self, inst: ScalableInstance) -> list[str]:
        """Monotonicity and scaling-equivariance failures on the listed elements."""
        out = []
        m = len(inst)
        for name, col in self.columns.items():
            if len(col) != m:
                out.append(f"{name}: {len(col)} values for {m} elements")
                continue
            for i in range(m):
                for j in range(m):
                    if inst.leq(i, j) and not col[i] <= col[j]:
                        out.append(f"{name}: not monotone on ({i}, {j})")
                    ei, ej = inst.elements[i], inst.elements[j]
                    if i < j and ei.base == ej.base and ext_mul(ej.scale / ei.scale, col[i]) != col[j]:
                        out.append(f"{name}: not equivariant on ({i}, {j})")
        return out


def _dominated(x: Sequence, y: Sequence) -> bool:
    return all(p <= q for p, q in zip(x, y))


@dataclass(frozen=True)
class OrderVerdict:
    holds: bool
    witness: tuple[int, int] | None = None


def almost_order_recognizing(inst: ScalableInstance, table: CapacityTable) -> OrderVerdict:
    m = len(inst)
    for i in range(m):
        for j in range(m):
            if _dominated(table.evaluation(i), table.evaluation(j)):
                if order_capacity(inst, i, j) < 1:
                    return OrderVerdict(False, (i, j))
    return OrderVerdict(True)


def can_monotonely_generate(
    inst: ScalableInstance, table: CapacityTable, target: Sequence | Mapping
) -> OrderVerdict:
    """Decide whether ``target = F o ev`` for some monotone ``F``.

    On success the realising ``F`` (the monotonization of the induced map on
    the evaluation image) is rebuilt and checked against ``target``.
    """
    m = len(inst)
    if isinstance(target, Mapping):
        target = [target[k] for k in range(m)]
    target = [t if isinstance(t, float) else as_rat(t) for t in target]
    if len(target) != m:
        raise CapaxError("target must give a value for every element")
    evs = [table.evaluation(i) for i in range(m)]
    for i in range(m):
        for j in range(m):
            if _dominated(evs[i], evs[j]) and not target[i] <= target[j]:
                return OrderVerdict(False, (i, j))
    image = list(dict.fromkeys(evs))
    f = {image.index(evs[i]): target[i] for i in range(m)}
    F = monotonize_on(lambda p, q: _dominated(image[p], image[q]), len(image), f)
    if any(F[image.index(evs[i])] != target[i] for i in range(m)):
        raise AssertionError("monotonization failed to reproduce the target")
    return OrderVerdict(True)


def max_coordinate(p) -> Fraction:
    return max(p)


def coordinate(k: int) -> Callable:
    def proj(p):
        return p[k % len(p)]

    proj.__name__ = f"x{k + 1}"
    return proj


def relative_capacity(s0: Sequence) -> Callable:
    """``x -> min_i x_i / s0_i``: the order-capacity of a fixed vector."""
    s0 = tuple(as_rat(x) for x in s0)

    def cap(p):
        return min(q / s0[k % len(s0)] for k, q in enumerate(p))

    return cap


def harmonic_pair(p) -> Fraction:
    x, y = p[0], p[1 % len(p)]
    return x * y / (x + y)


def mean(p) -> Fraction:
    return sum(p, Fraction(0)) / len(p)


def min_coordinate(p) -> Fraction:
    return min(p)


TARGET_FAMILY: dict[str, Callable] = {
    "x1": coordinate(0),
    "x2": coordinate(1),
    "x3": coordinate(2),
    "min": min_coordinate,
    "max": max_coordinate,
    "mean": mean,
    "harmonic12": harmonic_pair,
    "x1+2x2": lambda p: p[0] + 2 * p[1 % len(p)],
    "max(x1,2x3)": lambda p: max(p[0], 2 * p[2 % len(p)]),
    "min(2x1,x2+x3)": lambda p: min(2 * p[0], p[1 % len(p)] + p[2 % len(p)]),
}
"""Ten capacities on positive vectors: monotone and 1-homogeneous in every dimension."""

