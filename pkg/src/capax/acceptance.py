"""Exit criteria of the package, runnable from pytest and from ``capax selftest``.

Each ``criterion_*`` function returns a :class:`Result`; timing limits are
part of the verdict.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction as F
from typing import Callable

from capax import oracles
from capax.ech import ech_prefix, nkj
from capax.ellipsoid import EllipsoidSpec, embedding_factor
from capax.exact import INF, as_rat
from capax.kink import capacity_curve, kink_certificate, refute_finite_generation
from capax.errors import CapaxError
from capax.order import (
    TARGET_FAMILY,
    VECTORS,
    CapacityTable,
    ScalableInstance,
    almost_order_recognizing,
    can_monotonely_generate,
    coordinate,
    max_coordinate,
    mean,
    min_coordinate,
    order_capacity,
    relative_capacity,
)
from capax.partitions import (
    BoundaryVector,
    check_prop_hypotheses,
    enum_pair_partitions,
    enum_triple_partitions,
    is_I_collection,
    pairwise_C0,
)
from capax.shells import (
    ShellSpec,
    build_family,
    check_normalized_hypotheses,
    distinguish,
    separation_bound,
    shell_helicity,
    shell_sum,
    subsets,
)

DEFAULT_SEED = 20240611


@dataclass
class Result:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name} ({self.seconds:.2f}s): {self.detail}"


def _timed(number: int, name: str, limit: float | None = None):
    def wrap(fn: Callable[..., tuple[bool, str]]):
        def run(*args, **kwargs) -> Result:
            t0 = time.perf_counter()
            try:
                ok, detail = fn(*args, **kwargs)
            except Exception as exc:  # a crash is a failed criterion, not a crashed suite
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            dt = time.perf_counter() - t0
            if limit is not None and dt >= limit:
                ok, detail = False, f"{detail}; exceeded {limit}s limit"
            return Result(number, name, ok, detail, dt)

        run.__name__ = fn.__name__
        return run

    return wrap


@_timed(1, "ECH oracle equivalence", limit=5.0)
def criterion_1():
    bad = []
    for a1, a2 in itertools.product(range(1, 6), repeat=2):
        if list(ech_prefix((a1, a2), 200).values) != oracles.naive_ech((a1, a2), 200):
            bad.append((a1, a2))
    return not bad, f"25 weight pairs, N=200, mismatches={bad}"


# (r + a)^4 for r = 21/20, written out by hand: 41^4, 42^4 / 2^4, 43^4 over 40^4
SHELL_OUTER = {
    F(-1, 40): F(2825761, 2560000),
    F(0): F(194481, 160000),
    F(1, 40): F(3418801, 2560000),
}
SHELL_SUM = {
    F(-1, 40): F(265761, 2560000),
    F(0): F(34481, 160000),
    F(1, 40): F(858801, 2560000),
}


@_timed(2, "shell substitution suite")
def criterion_2():
    spec = ShellSpec(F(21, 20), 2, 2, F(1, 40), (F(-1, 40), F(0), F(1, 40)))
    bad = []
    for a in spec.samples:
        h = shell_helicity(spec, a)
        if h.inner != -1 or h.outer != SHELL_OUTER[a] or shell_sum(spec, a) != SHELL_SUM[a]:
            bad.append(a)
        if shell_sum(spec, a) != h.inner + h.outer:
            bad.append(a)
    return not bad, f"3 samples exact, a=0 sum={shell_sum(spec, 0)}, bad={bad}"


def _valid_pair(p, I, Ip) -> bool:
    elems = [e for J in p.blocks for e in J]
    return (
        len(elems) == len(set(elems)) == len(I) + len(Ip)
        and all(sum(1 for s, _ in J if s == "I") == 1 for J in p.blocks)
    )


def _valid_triple(p, Ip_, Im_, Ipr) -> bool:
    elems = [e for J in p.blocks for e in J]
    if not len(elems) == len(set(elems)) == len(Ip_) + len(Im_) + len(Ipr):
        return False
    shared = [J for J in p.blocks if sum(s == "I+" for s, _ in J) == 1 and sum(s == "I-" for s, _ in J) == 1]
    others = [J for J in p.blocks if J not in shared]
    return len(shared) == 1 and all(sum(s in ("I+", "I-") for s, _ in J) == 1 for J in others)


@_timed(3, "partition count laws", limit=10.0)
def criterion_3():
    checked = 0
    for ni in range(1, 7):
        for nk in range(0, 6):
            I, Ip = list(range(ni)), [f"p{k}" for k in range(nk)]
            parts = list(enum_pair_partitions(I, Ip))
            if len(parts) != ni**nk or len({p.blocks for p in parts}) != len(parts):
                return False, f"pair count wrong at |I|={ni}, |I'|={nk}"
            if not all(_valid_pair(p, I, Ip) for p in parts):
                return False, f"invalid pair partition at |I|={ni}, |I'|={nk}"
            checked += len(parts)
            for npl in range(1, ni):
                Ipl, Imi = [f"u{k}" for k in range(npl)], [f"v{k}" for k in range(ni - npl)]
                parts = list(enum_triple_partitions(Ipl, Imi, Ip))
                expect = npl * (ni - npl) * (ni - 1) ** nk
                if len(parts) != expect or len({frozenset(p.blocks) for p in parts}) != expect:
                    return False, f"triple count wrong at ({npl},{ni - npl},{nk})"
                if any(len(p) != ni - 1 or not _valid_triple(p, Ipl, Imi, Ip) for p in parts):
                    return False, f"invalid triple partition at ({npl},{ni - npl},{nk})"
                checked += expect
    # small sizes also against the generic set-partition oracle
    for ni, nk in [(1, 3), (2, 2), (3, 2), (2, 3)]:
        I, Ip = list(range(ni)), [f"p{k}" for k in range(nk)]
        if {frozenset(p.blocks) for p in enum_pair_partitions(I, Ip)} != set(
            oracles.brute_pair_partitions(I, Ip)
        ):
            return False, f"pair stream differs from oracle at ({ni},{nk})"
    for a, b, c in [(1, 1, 2), (2, 1, 1), (2, 2, 2), (1, 2, 3)]:
        Ipl, Imi, Ip = [f"u{k}" for k in range(a)], [f"v{k}" for k in range(b)], [f"p{k}" for k in range(c)]
        if {frozenset(p.blocks) for p in enum_triple_partitions(Ipl, Imi, Ip)} != set(
            oracles.brute_triple_partitions(Ipl, Imi, Ip)
        ):
            return False, f"triple stream differs from oracle at ({a},{b},{c})"
    return True, f"{checked} partitions enumerated and validated for |I|<=6, |I'|<=5"


C0_SHELL = F(551696, 3418801)


@_timed(4, "pairwise C0 pinning")
def criterion_4():
    r = F(21, 20)
    hi = BoundaryVector.of({"inner": -1, "outer": (r + F(1, 40)) ** 4})
    lo = BoundaryVector.of({"inner": -1, "outer": r**4})
    got = pairwise_C0(hi, lo)
    parts = oracles.brute_pair_partitions(hi.labels, lo.labels)
    ref = oracles.brute_sup(parts, {("I", k): v for k, v in hi.values.items()}, lo.values)
    ok = got == C0_SHELL == ref and len(parts) == 4
    return ok, f"C0={got}, oracle={ref}, partitions={len(parts)}"


def random_prop_family(rng: random.Random):
    """A random finite family built to (usually) satisfy the I-collection hypotheses."""
    ell = rng.choices([2, 3, 4], weights=[5, 4, 1])[0]
    npos = rng.choice([1, 2])
    steps = sorted(rng.sample(range(1, 20), npos))
    idx = sorted({F(s, 20) for s in steps} | {F(-s, 20) for s in steps} | ({F(0)} if rng.random() < 0.5 else set()))
    totals = sorted(rng.sample(range(1, 61), len(idx)))
    totals = [F(t, 60) for t in totals]
    gap = totals[0] * F(rng.randint(1, 9), 10)  # nonpositive values stay <= -1 + gap
    family = []
    for a, T in zip(idx, totals):
        others = [F(-1) + gap * F(rng.randint(0, 10), 10) for _ in range(ell - 2)]
        others = [min(x, F(0)) for x in others]
        pos = T + 1 - sum(others, F(0))
        vals = {"m": F(-1), "p": pos}
        vals.update({f"o{k}": x for k, x in enumerate(others)})
        family.append((a, BoundaryVector.of(vals)))
    return family, ell


@_timed(5, "I-collection property test", limit=60.0)
def criterion_5(seed: int = DEFAULT_SEED, wanted: int = 1000):
    rng = random.Random(seed)
    tested = tries = 0
    while tested < wanted:
        tries += 1
        if tries > 20 * wanted:
            return False, f"generator too weak: {tested} families after {tries} tries"
        family, ell = random_prop_family(rng)
        if not check_prop_hypotheses(family, ell).all_pass:
            continue
        rep = is_I_collection(family)
        if not rep.is_I_collection:
            return False, f"counterexample after {tested}: C0={rep.C0}, C1={rep.C1}, family={family}"
        tested += 1
    return True, f"{tested} families (of {tries} generated) all I-collections, seed={seed}"


@_timed(6, "separation pipeline")
def criterion_6():
    spec = ShellSpec(F(21, 20), 2, 2, F(1, 40), 5)
    fam = build_family(spec)
    sep = separation_bound(fam)
    if not sep.separates:
        return False, f"C={sep.C} not < 1"
    pos = [a for a in spec.samples if a > 0]
    subs = subsets(pos)
    pairs = 0
    for A, B in itertools.combinations(subs, 2):
        d = distinguish(fam, A, B, separation=sep)
        inside = B if d.high == "Aprime" else A
        outside = A if d.high == "Aprime" else B
        if d.witness not in inside or d.witness in outside or not d.C < 1:
            return False, f"bad witness for {set(A)} vs {set(B)}"
        pairs += 1
    return pairs == 6, f"C={sep.C} (C0={sep.icheck.C0}, C1={sep.icheck.C1}); {pairs} subset pairs distinguished"


@_timed(7, "normalized-hypothesis checks")
def criterion_7():
    good = check_normalized_hypotheses(ShellSpec(F(21, 20), 2, 2, F(1, 40), 3))
    ok_good = good.passed and good.width_margin == F(1701199, 2560000)
    bad = check_normalized_hypotheses(ShellSpec(F(23, 20), 2, 2, F(1, 40), 3, check_bounds=False))
    # expected to fail the width check, though (47/40)^4 = 4879681/2560000 is below 2
    ok_bad = (not bad.passed) and (2 - bad.width_margin) == F(4879681, 2560000)
    return ok_good and ok_bad, (
        f"(21/20,1/40): pass={good.passed} margin={good.width_margin}; "
        f"(23/20,1/40): pass={bad.passed} (47/40)^4={2 - bad.width_margin} margin={bad.width_margin}"
    )


CAPACITY_POOL: list[Callable] = [coordinate(0), coordinate(1), coordinate(2), max_coordinate, min_coordinate, mean]


def random_vector_instance(rng: random.Random):
    dim = rng.randint(1, 3)
    m = rng.randint(1, 6)
    elems = []
    for _ in range(m):
        if elems and rng.random() < 0.3:
            base, _ = rng.choice(elems)
        else:
            base = tuple(rng.randint(1, 4) for _ in range(dim))
        elems.append((base, F(rng.randint(1, 4), rng.randint(1, 3))))
    inst = ScalableInstance(VECTORS, elems)
    ncols = rng.randint(0, 3)
    funcs = {}
    for k in range(ncols):
        if rng.random() < 0.3:
            funcs[f"rel{k}"] = relative_capacity(tuple(rng.randint(1, 3) for _ in range(dim)))
        else:
            funcs[f"c{k}"] = rng.choice(CAPACITY_POOL)
    return inst, CapacityTable.from_functions(inst, funcs)


def _witness_ok_recognize(inst, table, w) -> bool:
    i, j = w
    ev_i, ev_j = table.evaluation(i), table.evaluation(j)
    return all(x <= y for x, y in zip(ev_i, ev_j)) and order_capacity(inst, i, j) < 1


def _witness_ok_generate(table, target, w) -> bool:
    i, j = w
    ev_i, ev_j = table.evaluation(i), table.evaluation(j)
    return all(x <= y for x, y in zip(ev_i, ev_j)) and target[i] > target[j]


@_timed(8, "monotone-generation equivalence", limit=30.0)
def criterion_8(seed: int = DEFAULT_SEED, count: int = 500):
    rng = random.Random(seed)
    agree = {True: 0, False: 0}
    for n in range(count):
        inst, table = random_vector_instance(rng)
        if table.violations(inst):
            return False, f"instance {n}: table is not a capacity table"
        rec = almost_order_recognizing(inst, table)
        if not rec.holds and not _witness_ok_recognize(inst, table, rec.witness):
            return False, f"instance {n}: invalid recognition witness {rec.witness}"
        all_gen = True
        for name, fn in TARGET_FAMILY.items():
            target = [fn(p) for p in inst.points]
            gen = can_monotonely_generate(inst, table, target)
            if not gen.holds:
                all_gen = False
                if not _witness_ok_generate(table, target, gen.witness):
                    return False, f"instance {n}: invalid generation witness for {name}"
        if all_gen != rec.holds:
            return False, f"instance {n}: recognizing={rec.holds} but generate-all={all_gen}"
        agree[rec.holds] += 1
    return True, f"{count} instances agree (recognizing: {agree[True]}, not: {agree[False]}), seed={seed}"


def _sqrt_curve(a: F) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 60
        return (Decimal(a.numerator) / Decimal(a.denominator)).sqrt()


@_timed(9, "kink certificate", limit=10.0)
def criterion_9():
    a0 = F(2)
    notes = []
    ok = True
    for h in (F(1, 10), F(1, 100)):
        curve = capacity_curve(a0, [a0 - h, a0, a0 + h], 200)
        rep = kink_certificate(curve, h)
        ok &= rep.right == 0 and rep.left == F(1, 2) and rep.passed
        notes.append(f"h={h}: left={rep.left} right={rep.right}")
    verdict = refute_finite_generation({"volume": _sqrt_curve}, a0)
    ok &= verdict.refuted
    h = F(1, 100)
    target = {a: v for a, v in capacity_curve(a0, [a0 - h, a0, a0 + h], 200).points}
    try:
        refute_finite_generation({"target": target}, a0, h=h)
        ok = False
        notes.append("target accepted as input")
    except CapaxError:
        notes.append("target rejected as input")
    notes.append(f"smooth input refuted={verdict.refuted}")
    return ok, "; ".join(notes)


def _rand_rat(rng: random.Random, lo: int = 1, hi: int = 12) -> F:
    return F(rng.randint(lo, hi), rng.randint(1, 6))


@_timed(10, "homogeneity and permutation invariants")
def criterion_10(seed: int = DEFAULT_SEED, cases: int = 100):
    rng = random.Random(seed)
    for _ in range(cases):
        n = rng.randint(1, 3)
        w = [_rand_rat(rng) for _ in range(n)]
        c = _rand_rat(rng)
        N = rng.randint(1, 40)
        base = ech_prefix(w, N).values
        if ech_prefix([c * x for x in w], N).values != tuple(c * v for v in base):
            return False, f"ech homogeneity fails for {w}, c={c}"
        perm = w[:]
        rng.shuffle(perm)
        if ech_prefix(perm, N).values != base:
            return False, f"ech permutation invariance fails for {w}"
    for _ in range(cases):
        dim = rng.randint(1, 3)
        s = tuple(_rand_rat(rng) for _ in range(dim))
        t = tuple(_rand_rat(rng) for _ in range(dim))
        a = _rand_rat(rng)
        inst = ScalableInstance(VECTORS, [(s, 1), (s, a), (t, 1)])
        if order_capacity(inst, 1, 2) != order_capacity(inst, 0, 2) / a:
            return False, f"order-capacity scaling fails for {s}, {t}, a={a}"
    for _ in range(cases):
        family, _ = random_prop_family(rng)
        c = _rand_rat(rng)
        before = is_I_collection(family)
        after = is_I_collection([(a, v.scale(c)) for a, v in family])
        if before.is_I_collection != after.is_I_collection or (before.C0, before.C1) != (after.C0, after.C1):
            return False, f"rescaling changes I-collection status (c={c})"
    return True, f"{cases} cases each for ech, order and partition rescaling, seed={seed}"


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
]


def run_all(echo: Callable[[str], None] = print) -> list[Result]:
    results = []
    for crit in CRITERIA:
        res = crit()
        echo(res.line())
        results.append(res)
    return results
