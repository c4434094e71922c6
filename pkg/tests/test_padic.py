from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logrigid.padic import (
    PAdic, PrecisionError, RamifiedPrimeError, SplitPrimeError, Unramified,
    inert_check, kronecker, rational_reconstruct, teichmuller, unit_part,
)

P, D, N = 3, 689, 12


def series_log(x: Fraction, p: int, terms: int) -> Fraction:
    # log(1 + z) = sum (-1)^(n+1) z^n / n, truncated
    z = x - 1
    return sum((Fraction((-1) ** (n + 1)) * z ** n / n for n in range(1, terms)), Fraction(0))


def series_exp(x: Fraction, terms: int) -> Fraction:
    out, t = Fraction(0), Fraction(1)
    for n in range(terms):
        out += t
        t = t * x / (n + 1)
    return out


# -- oracles -----------------------------------------------------------------

def test_inert_check_against_legendre():
    # [DERIVED] p inert iff D is a non-square mod p (Euler's criterion)
    for disc in (5, 8, 12, 13, 689, 40, 21):
        for p in (3, 5, 7, 11, 13):
            if disc % p == 0:
                with pytest.raises(RamifiedPrimeError):
                    inert_check(disc, p)
                continue
            euler = pow(disc % p, (p - 1) // 2, p)
            assert inert_check(disc, p) == (euler == p - 1)


def test_kronecker_matches_euler_criterion():
    for p in (3, 5, 7, 11, 13, 17):
        for a in range(-30, 30):
            want = pow(a % p, (p - 1) // 2, p)
            want = {0: 0, 1: 1, p - 1: -1}[want]
            assert kronecker(a, p) == want


def test_split_prime_rejected_by_extension():
    # 5 splits in Q(sqrt 689) since 689 = 4 mod 5 is a square
    with pytest.raises(SplitPrimeError):
        Unramified.from_coords(5, 689, 1, 1)
    with pytest.raises(RamifiedPrimeError):
        Unramified.from_coords(13, 689, 1, 1)


def test_log_of_four_matches_series():
    # [DERIVED] truncated Taylor series of log(1 + 3); terms beyond n = 40 are O(3^20)
    got = PAdic.from_int(3, 4, 20).log()
    want = PAdic.from_rational(3, series_log(Fraction(4), 3, 40), 20)
    assert got.equals(want, 18)


def test_exp_of_three_matches_series():
    got = PAdic.from_int(3, 3, 20).exp()
    want = PAdic.from_rational(3, series_exp(Fraction(3), 60), 20)
    assert got.equals(want, 18)


def test_teichmuller_of_two_is_minus_one():
    t = teichmuller(PAdic.from_int(3, 2, 30))
    assert t.equals(PAdic.from_int(3, -1, 30))


def test_teichmuller_in_extension_has_order_dividing_eight():
    for a, b in [(1, 1), (0, 1), (2, 1), (1, 2)]:
        t = teichmuller(Unramified.from_coords(3, D, a, b, 15))
        assert (t ** 8).equals(Unramified.from_coords(3, D, 1, 0, 15), 14)
        assert (t ** 4).a.with_prec(1).to_int_mod(1) in (1, 2)


def test_log_kills_p_and_roots_of_unity():
    assert PAdic.from_int(3, 3, 20).log().equals(PAdic.zero(3, 20), 19)
    assert PAdic.from_int(3, -1, 20).log().is_zero()
    z = teichmuller(Unramified.from_coords(3, D, 1, 1, 12))
    assert z.log().is_zero()


def test_conjugate_negates_sqrt_coordinate():
    z = Unramified.from_coords(3, D, 5, 7, 10)
    w = z.conjugate()
    assert w.a.equals(z.a) and w.b.equals(-z.b)
    assert (z * w).is_rational()


@pytest.mark.parametrize("num,den,p,k", [(1, 2, 5, 6), (-7, 11, 3, 20), (22, 7, 5, 12)])
def test_rational_reconstruct_examples(num, den, p, k):
    m = p ** k
    x = num * pow(den, -1, m) % m
    assert rational_reconstruct(x, m) == Fraction(num, den)


def test_rational_reconstruct_third_mod_five_power():
    # 3 * 10417 = 31251 = 1 + 2 * 5^6
    assert rational_reconstruct(10417, 5 ** 6) == Fraction(1, 3)


def test_rational_reconstruct_reports_absence():
    # 2 mod 125 has no representative n/d with |n|, d <= 1
    assert rational_reconstruct(2, 125, bound=1) is None
    assert rational_reconstruct(2, 125) == 2


def test_precision_is_tracked_through_division():
    x = PAdic.from_rational(3, Fraction(1, 9), 10)
    assert x.val == -2 and x.prec == 10
    y = PAdic.from_int(3, 9, 10) / PAdic.from_int(3, 9, 10)
    assert y.prec == 8
    with pytest.raises(PrecisionError):
        y.equals(1, 10)


def test_unit_part_is_principal():
    u = unit_part(PAdic.from_int(3, 2 * 27, 20))
    assert (u - 1).val >= 1


# -- properties ---------------------------------------------------------------

units = st.integers(min_value=1, max_value=3 ** N - 1)
ints = st.integers(min_value=-(3 ** N), max_value=3 ** N)
vals = st.integers(min_value=-3, max_value=3)


def padic(n, v=0):
    return PAdic.from_rational(P, Fraction(n) * Fraction(P) ** v, N + max(v, 0))


def unr(a, b, prec=N):
    return Unramified.from_coords(P, D, a, b, prec)


@settings(max_examples=1000, deadline=None)
@given(ints, ints, ints, ints, ints, ints)
def test_extension_ring_axioms(a1, b1, a2, b2, a3, b3):
    x, y, z = unr(a1, b1), unr(a2, b2), unr(a3, b3)
    assert (x + y).equals(y + x)
    assert (x * y).equals(y * x)
    assert ((x + y) + z).equals(x + (y + z))
    assert ((x * y) * z).equals(x * (y * z), N)
    assert (x * (y + z)).equals(x * y + x * z, N)
    assert (x - x).is_zero()


@settings(max_examples=1000, deadline=None)
@given(units, vals, units, vals)
def test_qp_field_laws_against_exact_rationals(n1, v1, n2, v2):
    # [DERIVED] arithmetic of images equals image of exact rational arithmetic
    q1, q2 = Fraction(n1) * Fraction(3) ** v1, Fraction(n2) * Fraction(3) ** v2
    x, y = PAdic.from_rational(3, q1, N), PAdic.from_rational(3, q2, N)
    for got, want in [(x + y, q1 + q2), (x * y, q1 * q2), (x / y, q1 / q2), (x - y, q1 - q2)]:
        k = got.prec
        assert got.equals(PAdic.from_rational(3, want, k + 10), k)


@settings(max_examples=1000, deadline=None)
@given(ints, ints, ints, ints)
def test_log_is_a_homomorphism(a1, b1, a2, b2):
    x, y = unr(3 * a1 + 1, 3 * b1 + 2), unr(3 * a2 + 2, 3 * b2)
    lhs = (x * y).log()
    rhs = x.log() + y.log()
    assert lhs.equals(rhs, min(lhs.prec, rhs.prec) - 1)


@settings(max_examples=300, deadline=None)
@given(ints, ints)
def test_exp_log_round_trip(a, b):
    z = unr(3 * a, 3 * b)
    back = z.exp().log()
    assert back.equals(z, back.prec - 1)
    u = unr(3 * a + 1, 3 * b)
    assert u.log().exp().equals(u, N - 2)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=8), ints, ints)
def test_log_ignores_p_powers_and_roots_of_unity(v, a, b):
    z = unr(3 * a + 1, b)
    scaled = z * unr(Fraction(3) ** v, 0, N + v) * teichmuller(unr(1, 1, N))
    assert scaled.log().equals(z.log(), N - 2)


@settings(max_examples=300, deadline=None)
@given(ints, ints)
def test_norm_commutes_with_log(a, b):
    # log N(z) = Tr log z
    z = unr(3 * a + 1, b)
    assert z.norm().log().equals(z.log().trace(), N - 2)


@settings(max_examples=500, deadline=None)
@given(st.integers(min_value=-10 ** 6, max_value=10 ** 6), st.integers(min_value=1, max_value=10 ** 6))
def test_rational_reconstruct_round_trip(num, den):
    m = 5 ** 22
    if den % 5 == 0:
        den += 1
    x = num * pow(den, -1, m) % m
    assert rational_reconstruct(x, m) == Fraction(num, den)
