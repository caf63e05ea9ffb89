from decimal import Decimal, localcontext
from fractions import Fraction as F

import pytest

from capax.ech import ech_prefix
from capax.errors import CapaxError
from capax.kink import (
    auto_grid,
    capacity_curve,
    kink_certificate,
    refute_finite_generation,
)
from capax.oracles import naive_ech


def sqrt_curve(a):
    with localcontext() as ctx:
        ctx.prec = 60
        return (Decimal(a.numerator) / Decimal(a.denominator)).sqrt()


@pytest.mark.parametrize("a, value", [(2, 1), (1, F(1, 2)), (F(19, 10), F(19, 20))])
def test_curve_examples(a, value):
    curve = capacity_curve(2, [a], 200)
    assert curve.value(a) == value


def test_curve_examples_against_oracle():
    for a in (F(1), F(19, 10)):
        cs, cd = naive_ech((1, 2), 201), naive_ech((1, a), 201)
        assert min(cd[j] / cs[j] for j in range(1, 201)) == capacity_curve(2, [a], 200).value(a)


def test_curve_invariants():
    curve = capacity_curve(2, auto_grid(2, F(1, 10)), 200)
    assert curve.violations() == []
    assert all(v == 1 for a, v in curve.points if a >= 2)


def test_curve_invariants_other_a0():
    curve = capacity_curve(F(3, 2), auto_grid(F(3, 2), F(1, 20), coarse=8), 150)
    assert curve.violations() == []


def test_curve_preconditions():
    with pytest.raises(CapaxError):
        capacity_curve(F(1, 2), [1])
    with pytest.raises(CapaxError):
        capacity_curve(2, [F(1, 2)])


@pytest.mark.parametrize("h", [F(1, 10), F(1, 100)])
def test_kink_certificate(h):
    curve = capacity_curve(2, [2 - h, 2, 2 + h], 200)
    rep = kink_certificate(curve, h)
    assert rep.left == F(1, 2) and rep.right == 0
    assert rep.threshold == F(1, 8) and rep.passed


def test_kink_certificate_errors():
    curve = capacity_curve(2, [F(19, 10), 2, F(21, 10)], 50)
    with pytest.raises(CapaxError):
        kink_certificate(curve, 0)
    with pytest.raises(CapaxError):
        kink_certificate(curve, F(1, 100))


def test_refutation_against_smooth_volume_curve():
    verdict = refute_finite_generation({"volume": sqrt_curve}, 2)
    assert verdict.refuted
    left, right = verdict.inputs["volume"]
    assert abs(float(left) - 2**-1.5) < 1e-6


def test_refutation_accepts_sampled_mapping():
    h = F(1, 10**12)
    sampled = {a: sqrt_curve(a) for a in (2 - h, F(2), 2 + h)}
    assert refute_finite_generation({"vol": sampled, "width": {a: 1 for a in sampled}}, 2, h=h).refuted


def test_target_is_rejected_as_input():
    h = F(1, 100)
    target = dict(capacity_curve(2, [2 - h, 2, 2 + h], 200).points)
    with pytest.raises(CapaxError):
        refute_finite_generation({"target": target}, 2, h=h)


def test_coarse_smooth_input_is_rejected():
    # at h = 1/100 the second-order term of sqrt dwarfs the 1e-9 tolerance
    with pytest.raises(CapaxError):
        refute_finite_generation({"volume": sqrt_curve}, 2, h=F(1, 100))


def test_empty_input_set():
    assert refute_finite_generation({}, 2).refuted


def test_flatness_uses_first_capacity():
    # c_1(E(1, a)) = 1 for every a >= 1, which caps the curve at 1 above a0
    assert ech_prefix((1, F(7, 3)), 2).values[1] == 1
