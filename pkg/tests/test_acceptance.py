"""Acceptance criteria, one PASS/FAIL line each.

The D = 689 pipeline runs once at level 8 (several minutes).  Set
LOGRIGID_CACHE to a directory to keep the measure tables between runs.
"""
import os
import time
from fractions import Fraction

import pytest

import conftest
from conftest import POLY_689, TABLE_689
from logrigid import selftest
from logrigid.gsunit import (
    NORMALIZATION, Pipeline, fit_normalization, reconstruct_all, unit_min_poly,
)
from logrigid.lfun import lp_at
from logrigid.measure import build_measure, default_ideal, refine_consistency
from logrigid.padic import PAdic, Unramified
from logrigid.quadfield import Form, QuadraticField
from logrigid.zeta import class_zeta, delta_c, dirichlet_oracle

LEVEL = 8
KAPPA = LEVEL - 3
TABLE_ORDER = list(TABLE_689)


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def run689(tmp_path_factory):
    cache = os.environ.get("LOGRIGID_CACHE") or str(tmp_path_factory.mktemp("cache689"))
    t0 = time.time()
    pipe = Pipeline(689, 3, LEVEL, c=5, d=7, cache_dir=cache)
    recs = reconstruct_all(pipe.records(), pipe.field, target=POLY_689)
    return pipe, {r.form: r for r in recs}, recs, time.time() - t0


def by_table_form(pipe, recs_by_form):
    G = pipe.group
    out = {}
    for text in TABLE_ORDER:
        cls = G.class_of_form(Form.parse(text))
        out[text] = next(r for r in recs_by_form.values() if r.cls == cls)
    return out


def test_criterion_1_table_logs(run689):
    pipe, recs, _, seconds = run689
    rows = by_table_form(pipe, recs)
    bad = []
    for text, r in rows.items():
        order, v, A, B = TABLE_689[text]
        s = Fraction(3) ** v
        u = Unramified.from_coords(3, 689, A * s, B * s, 41 + v)
        if r.kappa != KAPPA or not r.log_value.equals(u.log(), KAPPA):
            bad.append(text)
    ok = report(1, not bad, f"log values of all 8 classes agree with the table mod 3^{KAPPA}"
                f" ({seconds:.0f}s){'; mismatch ' + ', '.join(bad) if bad else ''}")
    assert ok and seconds <= 600


def test_criterion_2_valuations(run689):
    pipe, recs, _, _ = run689
    rows = by_table_form(pipe, recs)
    vals = [rows[t].valuation for t in TABLE_ORDER]
    zetas = [class_zeta(pipe.field, rows[t].cls, 0) for t in TABLE_ORDER]
    C = fit_normalization(zetas, [TABLE_689[t][1] for t in TABLE_ORDER])
    want = [-2, 4, 0, 2, -2, -4, 0, 2]
    ok = report(2, vals == want and C == NORMALIZATION,
                f"valuations {vals} in table order, fitted normalization {C}")
    assert ok


def test_criterion_3_polynomial_roots(run689):
    _, recs, ordered, _ = run689
    matched = [r.status == "matched" for r in ordered]
    poly = unit_min_poly(ordered)
    detail = (f"{sum(matched)}/8 units are roots mod 3^{KAPPA}; unit_min_poly: "
              + (str(poly.coefficients) if poly.coefficients else poly.message))
    ok = report(3, all(matched), detail)
    assert ok


def test_criterion_4_trace_law(run689):
    _, _, ordered, _ = run689
    ok689 = all(r.trace_check for r in ordered)
    pipe = Pipeline(12, 5, 4, c=7, d=11)
    ok12 = True
    for cls in range(pipe.group.order):
        st, lp = pipe.st_value(cls), pipe.lp_prime(cls)
        assert min(st.kappa, lp.kappa) >= 2
        ok12 &= (st.value.trace() + lp.value).equals(PAdic.zero(5, 2), 2)
    ok = report(4, ok689 and ok12, f"Tr J + L_p' = 0: D=689 all classes mod 3^{KAPPA} {ok689}, "
                f"D=12 both classes mod 5^2 {ok12}")
    assert ok


def test_criterion_5_interpolation_689(run689):
    pipe, _, _, _ = run689
    F = pipe.field
    ok = True
    for cls in range(8):
        m = pipe.measure(cls, 5)
        res = lp_at(m, -2)
        want = PAdic.from_rational(3, delta_c(F, pipe.ideal(cls), -2, 5, p=3), LEVEL + 5)
        ok &= res.agrees(want)
    ok = report(5, ok, f"D=689: L_p(-2) = Delta_c(-2) mod 3^{LEVEL - 2} for all classes")
    assert ok


def test_criterion_5_interpolation_12_5():
    F = QuadraticField(12)
    ok, kappas = True, []
    for cls in range(2):
        I = default_ideal(F, cls, 5, 7)
        m = build_measure(12, 5, 7, cls, 4, field=F, ideal=I, exact=False)
        res = lp_at(m, -2)
        kappas.append(res.kappa)
        ok &= res.agrees(PAdic.from_rational(5, delta_c(F, I, -2, 7, p=5), 10))
    report(5, ok, f"D=12, p=5: L_p(-2) = Delta_c(-2) mod 5^{min(kappas)}"
           + ("" if ok else " (unattainable: <n>^2 != n^2 when 4 does not divide 2)"))
    if not ok:
        pytest.xfail("s = -2 is not an interpolation point of <.>^(-s) for p = 5")


def test_criterion_6_structural():
    ok = True
    for D, p, c in [(689, 3, 5), (12, 5, 7), (5, 3, 5)]:
        F = QuadraticField(D)
        for cls in range(F.class_group.order):
            I = default_ideal(F, cls, p, c)
            ms = [build_measure(D, p, c, cls, r, field=F, ideal=I, exact=True) for r in (1, 2, 3)]
            ok &= all(m.total_mass() == 0 for m in ms)
            ok &= all(refine_consistency(a, b) for a, b in zip(ms, ms[1:]))
    for D in (5, 8, 12, 13):
        F = QuadraticField(D)
        for k in (1, 2, 3):
            total = sum((class_zeta(F, cls, 1 - k) for cls in range(F.class_group.order)), Fraction(0))
            ok &= total == dirichlet_oracle(D, 1 - k)
    ok &= class_zeta(QuadraticField(5), 0, -1) == Fraction(1, 30)
    ok = report(6, ok, "total mass 0 and refinement at levels 1-3, Dirichlet oracle "
                "for D in {5,8,12,13}, zeta(-1) = 1/30 for Q(sqrt5)")
    assert ok


def test_criterion_7_smoothing_independence(run689):
    _, _, ordered, _ = run689
    agree = [r.lp_prime.agrees(r.lp_prime_alt) for r in ordered]
    k = min(min(r.lp_prime.kappa, r.lp_prime_alt.kappa) for r in ordered)
    ok = report(7, all(agree), f"c=5 and c=7 agree on {sum(agree)}/8 classes mod 3^{k}")
    assert ok


def test_criterion_8_galois(run689):
    _, _, ordered, _ = run689
    good = []
    for r in ordered:
        fixed = r.frobenius_fixed()
        if r.order <= 2:
            good.append(fixed)
        else:
            good.append(not fixed and not r.log_value.b.with_prec(r.kappa).is_zero())
    ok = report(8, all(good), "Frobenius-fixed exactly for the classes of order <= 2, "
                f"nonzero sqrt-coordinate for orders 4 and 8 ({sum(good)}/8)")
    assert ok


def test_criterion_9_property_suites():
    import test_padic
    import test_quadfield
    t0 = time.time()
    test_padic.test_extension_ring_axioms()
    test_padic.test_qp_field_laws_against_exact_rationals()
    test_padic.test_log_is_a_homomorphism()
    test_padic.test_exp_log_round_trip()
    test_padic.test_rational_reconstruct_round_trip()
    test_quadfield.test_genus_theory_two_rank()
    props = time.time() - t0
    t1 = time.time()
    checks = selftest.run(quick=True, echo=None)
    st = time.time() - t1
    ok = all(c.ok for c in checks) and st <= 300
    ok = report(9, ok, f"property suites ({props:.0f}s), genus counts for D < 2000, "
                f"selftest --quick {sum(c.ok for c in checks)}/{len(checks)} in {st:.1f}s")
    assert ok
