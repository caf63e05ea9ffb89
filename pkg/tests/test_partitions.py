import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capax.errors import CapaxError
from capax.exact import INF
from capax.oracles import brute_pair_partitions, brute_sup, brute_triple_partitions
from capax.partitions import (
    BoundaryVector,
    CInterval,
    PartitionRec,
    _optimize,
    block_sum,
    check_prop_hypotheses,
    enum_pair_partitions,
    enum_triple_partitions,
    feasible_interval,
    is_I_collection,
    optimize_pair,
    optimize_triple,
    pairwise_C0,
    pairwise_C1,
)

BV = BoundaryVector.of
R = F(21, 20)


def shell(a, kn=4):
    return BV({"inner": -1, "outer": (R + a) ** kn})


def single_block(s, t):
    """One pair partition whose only block has I-sum s and I'-sum t."""
    f, fp = BV({"i": s}), BV({"j": t})
    return next(enum_pair_partitions(f.labels, fp.labels)), f, fp


# -- enumeration ---------------------------------------------------------------


@pytest.mark.parametrize("ni, nk, count", [(2, 2, 4), (3, 0, 1), (1, 3, 1)])
def test_pair_counts(ni, nk, count):
    I, Ip = list(range(ni)), [f"p{k}" for k in range(nk)]
    parts = list(enum_pair_partitions(I, Ip))
    assert len(parts) == count
    assert {frozenset(p.blocks) for p in parts} == set(brute_pair_partitions(I, Ip))


def test_pair_without_primes_is_singletons():
    (p,) = enum_pair_partitions(["a", "b", "c"], [])
    assert sorted(len(J) for J in p.blocks) == [1, 1, 1]


@pytest.mark.parametrize("shape, count", [((1, 1, 0), 1), ((1, 1, 2), 1), ((2, 1, 1), 4)])
def test_triple_counts(shape, count):
    a, b, c = shape
    Ip, Im, Ipr = [f"u{k}" for k in range(a)], [f"v{k}" for k in range(b)], [f"p{k}" for k in range(c)]
    parts = list(enum_triple_partitions(Ip, Im, Ipr))
    assert len(parts) == count
    assert all(len(p) == a + b - 1 for p in parts)
    assert {frozenset(p.blocks) for p in parts} == set(brute_triple_partitions(Ip, Im, Ipr))


def test_enumeration_errors():
    with pytest.raises(CapaxError):
        list(enum_pair_partitions([], ["x"]))
    with pytest.raises(CapaxError):
        list(enum_triple_partitions(["x"], [], []))
    with pytest.raises(CapaxError):
        list(enum_pair_partitions(["x", "x"], []))


def test_enumeration_is_reproducible():
    a = [p.blocks for p in enum_triple_partitions("ab", "c", "xy")]
    b = [p.blocks for p in enum_triple_partitions("ab", "c", "xy")]
    assert a == b


# -- block sums and intervals ---------------------------------------------------


@pytest.mark.parametrize("s, t, C, expected", [(2, 3, 1, 1), (-1, -3, 3, 0), (-1, 0, 5, 5)])
def test_block_sum(s, t, C, expected):
    p, f, fp = single_block(s, t)
    assert block_sum(p.blocks[0], f, fp, C) == expected


def test_block_sum_unknown_label():
    with pytest.raises(CapaxError):
        block_sum([("I", "nope")], BV({"i": 1}), BV({}), 1)


def test_interval_examples():
    iv = feasible_interval(*single_block(2, 3))
    assert (iv.lo, iv.lo_closed, iv.hi, iv.hi_closed) == (0, False, F(3, 2), True)
    iv = feasible_interval(*single_block(-1, -3))
    assert (iv.lo, iv.lo_closed, iv.hi) == (3, True, INF)
    assert feasible_interval(*single_block(0, -1)).empty
    assert feasible_interval(*single_block(0, 1)) == CInterval()


def test_interval_zero_upper_bound_is_empty():
    assert feasible_interval(*single_block(1, 0)).empty
    assert feasible_interval(*single_block(1, -1)).empty


def random_partition_case(rng):
    ni, nk = rng.randint(1, 3), rng.randint(0, 3)
    f = BV({f"i{k}": F(rng.randint(-6, 6), rng.randint(1, 4)) for k in range(ni)})
    fp = BV({f"j{k}": F(rng.randint(-6, 6), rng.randint(1, 4)) for k in range(nk)})
    parts = list(enum_pair_partitions(f.labels, fp.labels))
    return rng.choice(parts), f, fp


def test_interval_soundness():
    rng = random.Random(7)
    for _ in range(100):
        p, f, fp = random_partition_case(rng)
        iv = feasible_interval(p, f, fp)
        candidates = {F(rng.randint(1, 40), rng.randint(1, 8)) for _ in range(5)}
        if not iv.empty:
            candidates |= {x for x in (iv.lo, iv.hi) if x != INF and x > 0}
        for C in candidates:
            assert (C in iv) == all(block_sum(J, f, fp, C) >= 0 for J in p.blocks)


# -- optimisers ------------------------------------------------------------------


def test_C0_shell_example():
    hi, lo = shell(F(1, 40)), shell(F(0))
    opt = optimize_pair(hi, lo)
    assert opt.value == F(551696, 3418801)
    # both I' labels land in the outer block
    outer = next(J for J in opt.partition.blocks if ("I", "outer") in J)
    assert outer == {("I", "outer"), ("I'", "inner"), ("I'", "outer")}


def test_C0_small_examples():
    assert pairwise_C0(BV({"p": 1}), BV({"q": 2})) == 2
    assert pairwise_C0(BV({"p": -1}), BV({"q": -2})) == INF


def test_C1_examples():
    assert pairwise_C1(BV({"p": 1}), BV({"p": 1}), BV({})) == 0
    assert pairwise_C1(BV({"p": 1}), BV({"q": -1}), BV({})) == INF


def test_C1_shell_triple():
    fa, fneg, fap = shell(F(1, 80)), shell(F(-1, 80)), shell(F(1, 40))
    parts = brute_triple_partitions(fa.labels, fneg.labels, fap.labels)
    fI = {("I+", k): v for k, v in fa.values.items()} | {("I-", k): v for k, v in fneg.values.items()}
    ref = brute_sup(parts, fI, fap.values)
    assert pairwise_C1(fa, fneg, fap) == ref == F(6870408, 49829473)
    assert ref < 1


def _random_vec(rng, prefix, size):
    return BV({f"{prefix}{k}": F(rng.randint(-5, 5), rng.randint(1, 3)) for k in range(size)})


def test_fast_optimizers_match_reference_and_oracle():
    rng = random.Random(11)
    for _ in range(150):
        f = _random_vec(rng, "i", rng.randint(1, 3))
        fp = _random_vec(rng, "j", rng.randint(0, 3))
        fast = optimize_pair(f, fp)
        slow = _optimize(enum_pair_partitions(f.labels, fp.labels), f, fp)
        ref = brute_sup(brute_pair_partitions(f.labels, fp.labels), {("I", k): v for k, v in f.values.items()}, fp.values)
        assert fast.value == slow.value == ref
        if fast.partition is not None:
            assert feasible_interval(fast.partition, f, fp).sup == fast.value
    for _ in range(100):
        fa = _random_vec(rng, "u", rng.randint(1, 2))
        fn = _random_vec(rng, "v", rng.randint(1, 2))
        fp = _random_vec(rng, "j", rng.randint(0, 3))
        fast = optimize_triple(fa, fn, fp)
        slow = _optimize(enum_triple_partitions(fa.labels, fn.labels, fp.labels), (fa, fn), fp)
        fI = {("I+", k): v for k, v in fa.values.items()} | {("I-", k): v for k, v in fn.values.items()}
        ref = brute_sup(brute_triple_partitions(fa.labels, fn.labels, fp.labels), fI, fp.values)
        assert fast.value == slow.value == ref


# -- I-collections -----------------------------------------------------------------


def symmetric_shell_family(samples):
    return [(a, shell(a)) for a in samples]


def test_shell_family_is_I_collection():
    fam = symmetric_shell_family([F(-1, 40), F(-1, 80), F(0), F(1, 80), F(1, 40)])
    rep = is_I_collection(fam)
    assert rep.is_I_collection
    assert rep.C0 < 1 and rep.C1 < 1
    assert rep.c1_witness.indices == (F(1, 80), F(-1, 80), F(1, 40))


def test_swapped_family_is_not_I_collection():
    # the "bigger" vector sits at the larger index, so a (C >= 1)-partition exists
    fam = [(F(1), BV({"p": 1, "q": -1})), (F(0), BV({"s": 2, "t": -1}))]
    rep = is_I_collection(fam)
    assert not rep.is_I_collection
    assert rep.C0 == 2
    w = rep.c0_witness
    assert w.indices == (F(1), F(0))
    f_hi, f_lo = dict(fam)[F(1)], dict(fam)[F(0)]
    assert all(block_sum(J, f_hi, f_lo, 1) >= 0 for J in w.optimum.partition.blocks)


def test_singleton_family():
    rep = is_I_collection([(F(0), shell(F(0)))])
    assert rep.is_I_collection and rep.C0 == 0 and rep.C1 == 0
    assert rep.c0_witness is None


def test_missing_negative_index_is_skipped_with_warning():
    fam = [(F(1, 80), shell(F(1, 80))), (F(1, 40), shell(F(1, 40)))]
    rep = is_I_collection(fam)
    assert rep.C1 == 0 and len(rep.warnings) == 1


def test_duplicate_indices_rejected():
    with pytest.raises(CapaxError):
        is_I_collection([(F(0), shell(F(0))), (F(0), shell(F(0)))])


def test_parallel_mapper_gives_same_answer():
    from concurrent.futures import ThreadPoolExecutor

    fam = symmetric_shell_family([F(-1, 40), F(0), F(1, 40)])
    with ThreadPoolExecutor(2) as pool:
        assert is_I_collection(fam, mapper=pool.map) == is_I_collection(fam)


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=F(1, 10), max_value=10, max_denominator=10), st.integers(0, 2**32))
def test_rescaling_invariance(c, seed):
    rng = random.Random(seed)
    fam = [(F(k), _random_vec(rng, "x", rng.randint(1, 2))) for k in (-1, 0, 1, 2)]
    a = is_I_collection(fam)
    b = is_I_collection([(i, v.scale(c)) for i, v in fam])
    assert (a.C0, a.C1, a.is_I_collection) == (b.C0, b.C1, b.is_I_collection)


# -- hypotheses of the sufficient criterion ---------------------------------------


def test_shell_family_passes_hypotheses():
    fam = symmetric_shell_family([F(-1, 40), F(0), F(1, 40)])
    rep = check_prop_hypotheses(fam, 2)
    assert rep.all_pass
    assert not rep.conditions["positive_spread"].applicable


def test_missing_minus_one_flags_only_that():
    fam = [(F(0), BV({"a": F(-9, 10), "b": F(6, 5)})), (F(1), BV({"a": F(-9, 10), "b": F(7, 5)}))]
    rep = check_prop_hypotheses(fam, 2)
    assert rep.failed == ["minus_one_attained"]


def test_decreasing_sums_flagged():
    fam = symmetric_shell_family([F(-1, 40), F(0), F(1, 40)])
    flipped = [(-a, v) for a, v in fam]
    rep = check_prop_hypotheses(flipped, 2)
    assert rep.failed == ["sum_increasing"]


def test_each_condition_can_fail():
    base = {"m": F(-1), "p": F(3, 2)}
    cases = {
        "cardinality": (BV(base), 3),
        "lower_bound": (BV({"m": F(-1), "x": F(-2), "p": F(7, 2)}), 3),
        "single_positive": (BV({"m": F(-1), "p": F(1, 2), "q": F(1, 2)}), 3),
        "sum_at_most_one": (BV({"m": F(-1), "p": F(3)}), 2),
    }
    for name, (vec, ell) in cases.items():
        rep = check_prop_hypotheses([(F(0), vec)], ell)
        assert name in rep.failed, name


def test_nonpositive_gap_and_spread():
    # a -0.9 value is too close to -1 + inf(total) = -0.9 -> gap fails
    vec = BV({"m": F(-1), "x": F(-9, 10), "p": F(2)})
    assert "nonpositive_gap" in check_prop_hypotheses([(F(0), vec)], 3).failed
    vec = BV({"m": F(-1), "x": F(-1), "y": F(-1), "p": F(7, 2)})
    rep = check_prop_hypotheses([(F(0), vec), (F(1), BV({"m": F(-1), "x": F(-1), "y": F(-1), "p": F(1, 2) + 3}))], 4)
    assert rep.conditions["positive_spread"].applicable
