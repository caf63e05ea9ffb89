"""Constrained partitions of boundary-component labels.

Two partition classes are enumerated.  A *pair* partition of ``I + I'`` has
every block meeting ``I`` exactly once, so it is the same thing as a map
``I' -> I``.  A *triple* partition of ``I+ + I- + I'`` has one block holding
one point of each of ``I+`` and ``I-`` and every other block holding exactly
one point of ``I``; it is a chosen pair plus a map from ``I'`` to the
``|I| - 1`` blocks.

For boundary values ``f`` on ``I`` and ``f'`` on ``I'`` a block ``J`` is
feasible at scale ``C > 0`` when ``-C * sum f(J & I) + sum f'(J & I') >= 0``.
The optimisers below return the largest ``C`` for which some partition has
every block feasible (0 when none exists).

Elements of the disjoint union are tagged ``(side, label)`` with side one
of ``"I"``, ``"I+"``, ``"I-"``, ``"I'"``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from capax.errors import CapaxError
from capax.exact import INF, ExtRat, as_rat, format_ext, format_rat, is_inf

log = logging.getLogger(__name__)

PAIR, TRIPLE = "pair", "triple"
SIDE_I, SIDE_PLUS, SIDE_MINUS, SIDE_PRIME = "I", "I+", "I-", "I'"


@dataclass(frozen=True)
class BoundaryVector:
    """Finite labelled map ``label -> value``, e.g. the boundary helicities of one shell."""

    labels: tuple
    values: Mapping[Hashable, Fraction]

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise CapaxError("boundary labels must be distinct")
        missing = [lab for lab in labels if lab not in self.values]
        if missing:
            raise CapaxError(f"labels without values: {missing}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", {lab: as_rat(self.values[lab]) for lab in labels})

    @classmethod
    def of(cls, mapping: Mapping) -> BoundaryVector:
        return cls(tuple(mapping), dict(mapping))

    def __getitem__(self, label) -> Fraction:
        return self.values[label]

    def __len__(self) -> int:
        return len(self.labels)

    def __hash__(self):
        return hash(tuple((lab, self.values[lab]) for lab in self.labels))

    def __eq__(self, other):
        if not isinstance(other, BoundaryVector):
            return NotImplemented
        return self.labels == other.labels and self.values == other.values

    @property
    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def scale(self, c) -> BoundaryVector:
        c = as_rat(c)
        return BoundaryVector(self.labels, {k: c * v for k, v in self.values.items()})

    def to_json(self) -> dict:
        return {str(lab): format_rat(self.values[lab]) for lab in self.labels}


@dataclass(frozen=True)
class PartitionRec:
    """Blocks of tagged elements plus the assignment that generated them.

    ``assignment[k]`` is the block index receiving the k-th element of
    ``I'``; for triple partitions ``chosen`` is the ``(I+ label, I- label)``
    pair sharing block 0.
    """

    kind: str
    blocks: tuple[frozenset, ...]
    assignment: tuple[int, ...] = ()
    chosen: tuple | None = None

    def __len__(self) -> int:
        return len(self.blocks)

    def to_json(self) -> list:
        out = []
        for b in self.blocks:
            out.append(sorted(f"{side}:{lab}" for side, lab in b))
        return out


def _check_labels(labels: Sequence, what: str) -> tuple:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise CapaxError(f"{what} labels must be distinct")
    return labels


def enum_pair_partitions(I: Sequence, Iprime: Sequence) -> Iterator[PartitionRec]:
    """Every ``(I, I')``-partition once, in lexicographic order of the map ``I' -> I``."""
    I = _check_labels(I, "I")
    Iprime = _check_labels(Iprime, "I'")
    if not I:
        raise CapaxError("I must be nonempty")
    for assignment in itertools.product(range(len(I)), repeat=len(Iprime)):
        members = [[(SIDE_I, i)] for i in I]
        for k, target in enumerate(assignment):
            members[target].append((SIDE_PRIME, Iprime[k]))
        yield PartitionRec(PAIR, tuple(frozenset(m) for m in members), assignment)


def enum_triple_partitions(
    Iplus: Sequence, Iminus: Sequence, Iprime: Sequence
) -> Iterator[PartitionRec]:
    """Every ``(I+, I-, I')``-partition once; each has ``|I+| + |I-| - 1`` blocks."""
    Iplus = _check_labels(Iplus, "I+")
    Iminus = _check_labels(Iminus, "I-")
    Iprime = _check_labels(Iprime, "I'")
    if not Iplus or not Iminus:
        raise CapaxError("I+ and I- must both be nonempty")
    nblocks = len(Iplus) + len(Iminus) - 1
    for p in Iplus:
        for q in Iminus:
            heads = [[(SIDE_PLUS, p), (SIDE_MINUS, q)]]
            heads += [[(SIDE_PLUS, x)] for x in Iplus if x != p]
            heads += [[(SIDE_MINUS, x)] for x in Iminus if x != q]
            for assignment in itertools.product(range(nblocks), repeat=len(Iprime)):
                members = [list(h) for h in heads]
                for k, target in enumerate(assignment):
                    members[target].append((SIDE_PRIME, Iprime[k]))
                yield PartitionRec(
                    TRIPLE, tuple(frozenset(m) for m in members), assignment, (p, q)
                )


def _lookup(elem, f, fprime) -> tuple[bool, Fraction]:
    """(is an I element, value) for a tagged element."""
    side, label = elem
    try:
        if side == SIDE_PRIME:
            return False, fprime[label]
        if side == SIDE_I:
            return True, f[label]
        fplus, fminus = f
        return True, (fplus if side == SIDE_PLUS else fminus)[label]
    except (KeyError, TypeError, ValueError):
        raise CapaxError(f"no boundary value for element {side}:{label}") from None


def block_parts(J: Iterable, f, fprime) -> tuple[Fraction, Fraction]:
    """``(sum of f over J & I, sum of f' over J & I')``.

    ``f`` is a BoundaryVector on ``I``, or a pair ``(f+, f-)`` for triple
    partitions.
    """
    s = t = Fraction(0)
    for elem in J:
        in_i, v = _lookup(elem, f, fprime)
        if in_i:
            s += v
        else:
            t += v
    return s, t


def block_sum(J: Iterable, f, fprime, C) -> Fraction:
    s, t = block_parts(J, f, fprime)
    return -as_rat(C) * s + t


@dataclass(frozen=True)
class CInterval:
    """The feasible scales ``C`` in ``(0, inf)``; ``lo == 0`` open stands for ``0+``."""

    lo: Fraction = Fraction(0)
    hi: ExtRat = INF
    lo_closed: bool = False
    hi_closed: bool = False
    empty: bool = False

    def __contains__(self, C) -> bool:
        if self.empty or C <= 0:
            return False
        above = C >= self.lo if self.lo_closed else C > self.lo
        below = C <= self.hi if self.hi_closed else C < self.hi
        return above and below

    @property
    def sup(self) -> ExtRat:
        """Supremum, with ``sup of the empty set = 0``."""
        return Fraction(0) if self.empty else self.hi

    def to_json(self) -> dict:
        if self.empty:
            return {"empty": True}
        return {
            "empty": False,
            "lo": format_ext(self.lo),
            "lo_closed": self.lo_closed,
            "hi": format_ext(self.hi),
            "hi_closed": self.hi_closed,
        }


EMPTY = CInterval(empty=True)


def interval_from_parts(parts: Iterable[tuple[Fraction, Fraction]]) -> CInterval:
    lo, lo_closed = Fraction(0), False
    hi, hi_closed = INF, False
    for s, t in parts:
        if s > 0:
            bound = t / s
            if bound < hi:
                hi, hi_closed = bound, True
        elif s < 0:
            bound = t / s
            if bound > lo:
                lo, lo_closed = bound, True
        elif t < 0:
            return EMPTY
    if hi <= 0 or lo > hi or (lo == hi and not (lo_closed and hi_closed)):
        return EMPTY
    return CInterval(lo, hi, lo_closed, hi_closed)


def feasible_interval(p: PartitionRec, f, fprime) -> CInterval:
    return interval_from_parts(block_parts(J, f, fprime) for J in p.blocks)


@dataclass(frozen=True)
class Optimum:
    """Largest feasible scale over a partition class and a partition reaching it."""

    value: ExtRat
    partition: PartitionRec | None = None
    interval: CInterval | None = None

    def to_json(self) -> dict:
        return {
            "value": format_ext(self.value),
            "partition": None if self.partition is None else self.partition.to_json(),
            "interval": None if self.interval is None else self.interval.to_json(),
        }


def _leaf_sup(ts, ss):
    """Sup of feasible C for integer block parts, as ``(num, den)``; den 0 is +inf.

    Returns None for an empty feasible set.
    """
    hn, hd = 1, 0
    ln, ld = 0, 1
    for t, s in zip(ts, ss):
        if s > 0:
            if hd == 0 or t * hd < hn * s:
                hn, hd = t, s
        elif s < 0:
            if t * ld < ln * s:  # t/s > ln/ld with s < 0
                ln, ld = -t, -s
        elif t < 0:
            return None
    if hd == 0:
        return (1, 0)
    if hn <= 0 or ln * hd > hn * ld:
        return None
    return (hn, hd)


def _integer_scale(vectors: Iterable[BoundaryVector]) -> int:
    # multiplying f and f' by one positive constant leaves every feasible set unchanged
    den = 1
    for v in vectors:
        for x in v.values.values():
            den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def _best_assignment(heads: Sequence[int], primes: Sequence[int]):
    """Exhaustive search over maps ``I' -> blocks``; ties keep the first found."""
    best, arg = None, None
    nblocks = len(heads)
    for assignment in itertools.product(range(nblocks), repeat=len(primes)):
        ts = [0] * nblocks
        for k, b in enumerate(assignment):
            ts[b] += primes[k]
        sup = _leaf_sup(ts, heads)
        if sup is None:
            continue
        if best is None or (best[1] != 0 and (sup[1] == 0 or sup[0] * best[1] > best[0] * sup[1])):
            best, arg = sup, assignment
            if sup[1] == 0:
                break
    return best, arg


def _as_ext(sup) -> ExtRat:
    return INF if sup[1] == 0 else Fraction(sup[0], sup[1])


def _optimize(partitions: Iterable[PartitionRec], f, fprime) -> Optimum:
    """Reference optimiser over explicit partition records."""
    best = Optimum(Fraction(0))
    for p in partitions:
        iv = feasible_interval(p, f, fprime)
        if iv.empty:
            continue
        if best.partition is None or iv.sup > best.value:
            best = Optimum(iv.sup, p, iv)
            if is_inf(iv.sup):
                break
    return best


def optimize_pair(f_hi: BoundaryVector, f_lo: BoundaryVector) -> Optimum:
    """Best ``(f_hi, f_lo, C)``-partition over all ``(I, I')``-partitions."""
    if not f_hi.labels:
        raise CapaxError("I must be nonempty")
    L = _integer_scale((f_hi, f_lo))
    heads = [int(f_hi[i] * L) for i in f_hi.labels]
    primes = [int(f_lo[i] * L) for i in f_lo.labels]
    sup, assignment = _best_assignment(heads, primes)
    if sup is None:
        return Optimum(Fraction(0))
    members = [[(SIDE_I, i)] for i in f_hi.labels]
    for k, b in enumerate(assignment):
        members[b].append((SIDE_PRIME, f_lo.labels[k]))
    p = PartitionRec(PAIR, tuple(frozenset(m) for m in members), assignment)
    return Optimum(_as_ext(sup), p, feasible_interval(p, f_hi, f_lo))


def optimize_triple(
    f_a: BoundaryVector, f_neg_a: BoundaryVector, f_aprime: BoundaryVector
) -> Optimum:
    """Best ``(f_a, f_-a, f_a', C)``-partition over all triple partitions."""
    if not f_a.labels or not f_neg_a.labels:
        raise CapaxError("I+ and I- must both be nonempty")
    L = _integer_scale((f_a, f_neg_a, f_aprime))
    primes = [int(f_aprime[i] * L) for i in f_aprime.labels]
    best, arg = None, None
    for p in f_a.labels:
        for q in f_neg_a.labels:
            heads = [int((f_a[p] + f_neg_a[q]) * L)]
            heads += [int(f_a[x] * L) for x in f_a.labels if x != p]
            heads += [int(f_neg_a[x] * L) for x in f_neg_a.labels if x != q]
            sup, assignment = _best_assignment(heads, primes)
            if sup is None:
                continue
            if best is None or (best[1] != 0 and (sup[1] == 0 or sup[0] * best[1] > best[0] * sup[1])):
                best, arg = sup, (p, q, assignment)
            if best[1] == 0:
                break
        if best is not None and best[1] == 0:
            break
    if best is None:
        return Optimum(Fraction(0))
    p, q, assignment = arg
    members = [[(SIDE_PLUS, p), (SIDE_MINUS, q)]]
    members += [[(SIDE_PLUS, x)] for x in f_a.labels if x != p]
    members += [[(SIDE_MINUS, x)] for x in f_neg_a.labels if x != q]
    for k, b in enumerate(assignment):
        members[b].append((SIDE_PRIME, f_aprime.labels[k]))
    rec = PartitionRec(TRIPLE, tuple(frozenset(m) for m in members), assignment, (p, q))
    return Optimum(_as_ext(best), rec, feasible_interval(rec, (f_a, f_neg_a), f_aprime))


def pairwise_C0(f_hi: BoundaryVector, f_lo: BoundaryVector) -> ExtRat:
    return optimize_pair(f_hi, f_lo).value


def pairwise_C1(f_a: BoundaryVector, f_neg_a: BoundaryVector, f_aprime: BoundaryVector) -> ExtRat:
    return optimize_triple(f_a, f_neg_a, f_aprime).value


Family = Sequence[tuple[Fraction, BoundaryVector]]


def normalize_family(family: Iterable) -> list[tuple[Fraction, BoundaryVector]]:
    members = []
    for a, vec in family:
        if not isinstance(vec, BoundaryVector):
            vec = BoundaryVector.of(vec)
        members.append((as_rat(a), vec))
    indices = [a for a, _ in members]
    if len(set(indices)) != len(indices):
        raise CapaxError("family indices must be distinct")
    return sorted(members, key=lambda m: m[0])


@dataclass(frozen=True)
class Witness:
    kind: str
    indices: tuple[Fraction, ...]
    optimum: Optimum

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "indices": [format_rat(a) for a in self.indices],
            **self.optimum.to_json(),
        }


@dataclass(frozen=True)
class ICollectionReport:
    C0: ExtRat
    C1: ExtRat
    c0_witness: Witness | None
    c1_witness: Witness | None
    warnings: tuple[str, ...] = ()
    sample_size: int = 0

    @property
    def is_I_collection(self) -> bool:
        return self.C0 < 1 and self.C1 < 1

    @property
    def bound(self) -> ExtRat:
        return max(self.C0, self.C1)

    def to_json(self) -> dict:
        return {
            "C0": format_ext(self.C0),
            "C1": format_ext(self.C1),
            "is_I_collection": self.is_I_collection,
            "witnesses": {
                "C0": None if self.c0_witness is None else self.c0_witness.to_json(),
                "C1": None if self.c1_witness is None else self.c1_witness.to_json(),
            },
            "warnings": list(self.warnings),
            # the defining suprema run over an interval; only these samples were checked
            "finite_sample": self.sample_size,
        }


def _pair_task(args):
    a, ap, f_hi, f_lo = args
    return Witness(PAIR, (a, ap), optimize_pair(f_hi, f_lo))


def _triple_task(args):
    a, ap, f_a, f_neg, f_ap = args
    return Witness(TRIPLE, (a, -a, ap), optimize_triple(f_a, f_neg, f_ap))


def _best(witnesses: Iterable[Witness]) -> tuple[ExtRat, Witness | None]:
    value, arg = Fraction(0), None
    for w in witnesses:
        if w.optimum.partition is not None and (arg is None or w.optimum.value > value):
            value, arg = w.optimum.value, w
    return value, arg


def is_I_collection(family: Iterable, mapper: Callable = map) -> ICollectionReport:
    """Compute both partition optima over a finite sample of the index interval.

    ``mapper`` may be a parallel ``map`` (e.g. ``Executor.map``); every pair
    is evaluated independently.
    """
    members = normalize_family(family)
    by_index = dict(members)
    pair_jobs = [
        (a, ap, by_index[a], by_index[ap])
        for a, _ in members
        for ap, _ in members
        if a > ap
    ]
    triple_jobs, warnings = [], []
    positive = [a for a, _ in members if a > 0]
    for a in positive:
        for ap in positive:
            if a >= ap:
                continue
            if -a not in by_index:
                msg = f"skipped pair ({format_rat(a)}, {format_rat(ap)}): index {format_rat(-a)} absent"
                log.warning(msg)
                warnings.append(msg)
                continue
            triple_jobs.append((a, ap, by_index[a], by_index[-a], by_index[ap]))
    C0, w0 = _best(mapper(_pair_task, pair_jobs))
    C1, w1 = _best(mapper(_triple_task, triple_jobs))
    return ICollectionReport(C0, C1, w0, w1, tuple(warnings), len(members))


@dataclass(frozen=True)
class Condition:
    passed: bool
    applicable: bool = True
    detail: str = ""


@dataclass
class HypothesisReport:
    ell: int
    conditions: dict[str, Condition] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, c in self.conditions.items() if not c.passed]

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "all_pass": self.all_pass,
            "conditions": {
                k: {"pass": c.passed, "applicable": c.applicable, "detail": c.detail}
                for k, c in self.conditions.items()
            },
        }


def check_prop_hypotheses(family: Iterable, ell: int) -> HypothesisReport:
    """Evaluate, exactly, the sufficient conditions for an I-collection.

    Keys of ``report.conditions``:

    ``cardinality``        every vector has exactly ``ell`` labels
    ``lower_bound``        all values >= -1
    ``minus_one_attained`` every vector takes the value -1
    ``single_positive``    exactly one positive value per vector
    ``sum_at_most_one``    every total <= 1
    ``sum_increasing``     totals strictly increase with the index
    ``nonpositive_gap``    sup of nonpositive values < -1 + inf of totals
    ``positive_spread``    (ell >= 4 only) sup of values < 2 * inf of positive values + 1
    """
    members = normalize_family(family)
    rep = HypothesisReport(ell)
    vecs = [v for _, v in members]

    def each(pred, name):
        bad = [format_rat(a) for a, v in members if not pred(v)]
        rep.conditions[name] = Condition(not bad, True, f"violated at {bad}" if bad else "")

    each(lambda v: len(v) == ell, "cardinality")
    each(lambda v: all(x >= -1 for x in v.values.values()), "lower_bound")
    each(lambda v: any(x == -1 for x in v.values.values()), "minus_one_attained")
    each(lambda v: sum(1 for x in v.values.values() if x > 0) == 1, "single_positive")
    each(lambda v: v.total <= 1, "sum_at_most_one")

    totals = [v.total for v in vecs]
    bad = [
        (format_rat(members[k][0]), format_rat(members[k + 1][0]))
        for k in range(len(totals) - 1)
        if not totals[k] < totals[k + 1]
    ]
    rep.conditions["sum_increasing"] = Condition(not bad, True, f"violated at {bad}" if bad else "")

    values = [x for v in vecs for x in v.values.values()]
    nonpos = [x for x in values if x <= 0]
    sup_nonpos = max(nonpos) if nonpos else -INF
    inf_total = min(totals) if totals else INF
    rhs = -1 + inf_total if totals else INF
    ok = sup_nonpos < rhs
    rep.conditions["nonpositive_gap"] = Condition(
        ok, True, f"sup={_fmt(sup_nonpos)} vs -1+inf_total={_fmt(rhs)}"
    )

    if ell >= 4:
        pos = [x for x in values if x > 0]
        sup_all = max(values) if values else -INF
        rhs = 2 * min(pos) + 1 if pos else INF
        rep.conditions["positive_spread"] = Condition(
            sup_all < rhs, True, f"sup={_fmt(sup_all)} vs 2*inf_pos+1={_fmt(rhs)}"
        )
    else:
        rep.conditions["positive_spread"] = Condition(True, False, "only required when ell >= 4")
    return rep


def _fmt(x) -> str:
    if isinstance(x, float):
        return "inf" if x > 0 else "-inf"
    return format_rat(x)
