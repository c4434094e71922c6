from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from logrigid.lfun import LpResult, desmooth, lp_at, lp_derivative0, smoothing_factor
from logrigid.measure import EisensteinMeasure, build_measure, default_ideal
from logrigid.padic import PAdic, PrecisionError, valuation
from logrigid.quadfield import QuadraticField
from logrigid.zeta import delta_c


def synthetic(p, level, hist, disc=689):
    # a measure known only through its norm histogram
    F = QuadraticField(disc)
    I = F.class_group.integral_representative(0)
    m = EisensteinMeasure(disc, p, 5, 0, "[synthetic]", level, I, tuple(I.inverse().basis),
                          mod_exp=level, scale_exp=0)
    m._norm_hist = np.array([h % p ** level for h in hist], dtype=np.int64)
    return m


def delta_pair(p, level, a, b):
    h = [0] * p ** level
    h[a] += 1
    h[b] -= 1
    return synthetic(p, level, h)


@pytest.fixture(scope="module")
def m689():
    F = QuadraticField(689)
    out = {}
    for c in (5, 7):
        for cls in range(8):
            I = default_ideal(F, cls, 3, 35)
            out[c, cls] = build_measure(689, 3, c, cls, 5, field=F, ideal=I, exact=False)
    return F, out


def test_value_at_zero_is_total_mass(m689):
    _, ms = m689
    assert lp_at(ms[5, 0], 0).value.is_zero()


@pytest.mark.parametrize("level", [4, 5])
def test_interpolation_at_minus_two(level):
    # (p - 1) | 2 for p = 3, so <n>^2 = n^2 and the value is Delta_c at s = -2
    F = QuadraticField(689)
    for cls in range(8):
        I = default_ideal(F, cls, 3, 5)
        m = build_measure(689, 3, 5, cls, level, field=F, ideal=I, exact=False)
        res = lp_at(m, -2)
        want = PAdic.from_rational(3, delta_c(F, I, -2, 5, p=3), 20)
        assert res.kappa == level - 2
        assert res.agrees(want)


def test_certified_precision_grows_with_level():
    F = QuadraticField(689)
    I = default_ideal(F, 4, 3, 5)
    ks = [lp_derivative0(build_measure(689, 3, 5, 4, r, field=F, ideal=I, exact=False)).kappa
          for r in (3, 4, 5)]
    assert ks == [1, 2, 3]


def test_smoothing_independence_689(m689):
    _, ms = m689
    for cls in range(8):
        a = desmooth(lp_derivative0(ms[5, cls]), 5)
        b = desmooth(lp_derivative0(ms[7, cls]), 7)
        assert a.kappa >= 2 and a.agrees(b)


def test_derivatives_are_not_all_zero(m689):
    _, ms = m689
    assert any(not lp_derivative0(ms[5, c]).certified().is_zero() for c in range(8))


def test_zero_measure_gives_zero():
    m = synthetic(3, 6, [0] * 3 ** 6)
    assert lp_derivative0(m).value.is_zero()
    assert lp_at(m, -1).value.is_zero()


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3 ** 7 - 1), st.integers(1, 3 ** 7 - 1))
def test_point_masses_give_minus_log_ratio(a, b):
    # [DERIVED] the derivative of delta_a - delta_b is -(log_p a - log_p b)
    if a % 3 == 0 or b % 3 == 0:
        return
    res = lp_derivative0(delta_pair(3, 7, a, b))
    want = -(PAdic.from_int(3, a, 7).log() - PAdic.from_int(3, b, 7).log())
    assert res.kappa == 5
    assert res.agrees(want)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5 ** 5 - 1), st.integers(1, 5 ** 5 - 1), st.sampled_from([-1, -2, -3]))
def test_point_masses_at_negative_integers(a, b, s):
    if a % 5 == 0 or b % 5 == 0:
        return
    res = lp_at(delta_pair(5, 5, a, b), s)

    def bracket(n):
        x = PAdic.from_int(5, n, 5)
        return x / x.teichmuller()
    want = bracket(a) ** (-s) - bracket(b) ** (-s)
    assert res.agrees(want)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=81, max_size=81),
       st.lists(st.integers(-50, 50), min_size=81, max_size=81))
def test_linearity(h1, h2):
    total = [x + y for x, y in zip(h1, h2)]
    a, b, c = (lp_derivative0(synthetic(3, 4, h)) for h in (h1, h2, total))
    assert c.agrees(a.value + b.value)


def test_desmooth_is_inverse_of_smoothing():
    raw = LpResult(PAdic.from_rational(3, Fraction(7, 2), 8), 6)
    for c in (5, 7, 11):
        f = smoothing_factor(c)
        smoothed = LpResult(raw.value * f, raw.kappa)
        back = desmooth(smoothed, c)
        assert back.kappa == 6 - valuation(f, 3)
        assert back.agrees(raw.value)


def test_desmooth_refuses_when_precision_runs_out():
    with pytest.raises(PrecisionError):
        desmooth(LpResult(PAdic.from_int(3, 1, 3), 1), 5)
    with pytest.raises(PrecisionError):
        desmooth(LpResult(PAdic.from_int(3, 1, 3), 2), 3)


def test_output_lives_in_qp(m689):
    _, ms = m689
    res = lp_derivative0(ms[5, 1])
    assert isinstance(res.value, PAdic) and res.value.p == 3
    d = res.to_dict()
    assert d["certified_mod"] == "3^3" and d["class"] == ms[5, 1].form
