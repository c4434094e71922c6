"""
Gross-Stark units from the p-adic integral of the Eisenstein measure.

The integral J[tau] = sum over balls of log_p(tau^t x) nu(x) needs a
p-integral table, so it is evaluated on the ideal-smoothed measure nu and
divided by N(l) - 1 afterwards.  Its trace is minus the derivative of the
p-adic L-function at 0; that relation is checked for every class.

Two ambiguities remain and are resolved by recognition:

* J is defined only up to Z log_p(eps_plus), which depends on the Shintani
  domain.  Small multiples k are searched.
* exp_p recovers the unit only up to a root of unity of F_p; all p^2 - 1
  Teichmuller lifts are tried.

Units are reported in the normalization ``u = p^(C zeta) ...`` with the
global constant C (``NORMALIZATION``) applied to both valuation and
logarithm, and in the embedding of sqrtD fixed by ``CONJUGATE_EMBEDDING``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels as K
from .lfun import LpResult, desmooth, lp_derivative0
from .measure import (EisensteinMeasure, MeasureError, build_auxiliary_measure,
                      build_measure, clear_sweep_cache, default_ideal)
from .padic import (PAdic, PrecisionError, Unramified, _log_unit_coords, format_padic,
                    format_unramified, padic_exp, rational_reconstruct, roots_of_unity,
                    valuation)
from .quadfield import QuadraticField
from .zeta import class_zeta, smoothing_prime

NORMALIZATION = -2
# Reported logs and units are Frobenius-conjugated once: the formal sqrtD of
# the integral corresponds to -sqrtD in the embedding used for the tables.
CONJUGATE_EMBEDDING = True
KMAX = 20
ST_SLACK = 2      # digits held back on the raw integral
RECORD_SLACK = 3  # digits certified end to end

STATUS_MATCHED = "matched"
STATUS_AMBIGUOUS = "ambiguous"
STATUS_FAILED = "failed"
STATUS_PENDING = "pending"


# ---------------------------------------------------------------------------
# the integral
# ---------------------------------------------------------------------------

def _series_length(p: int, r: int) -> int:
    n = 1
    while True:
        if all(k - valuation(k, p) >= r for k in range(n, n + p * r + 2)):
            return n
        n += 1


@lru_cache(maxsize=4)
def log_table(p: int, r: int, disc: int):
    """log_p(1 + p(u + v sqrtD)) mod p^r for u, v mod p^(r-1), as two arrays."""
    nmax = _series_length(p, r)
    R = r + max(valuation(n, p) for n in range(1, nmax))
    if p ** R >= 2 ** 31:
        raise PrecisionError(f"log table modulus {p}^{R} too large")
    mod = p ** R
    inv = np.zeros(nmax, dtype=np.int64)
    for n in range(1, nmax):
        inv[n] = pow(n // p ** valuation(n, p), -1, mod)
    return K.log_table(p, r, disc % mod, R, inv)


@dataclass(frozen=True)
class StResult:
    value: Unramified
    kappa: int

    def certified(self) -> Unramified:
        return self.value.with_prec(self.kappa)


def _unr(p, disc, a, b, prec):
    return Unramified(PAdic._normalise(p, 0, a, prec), PAdic._normalise(p, 0, b, prec), disc)


def st_integral(m: EisensteinMeasure, tau=None) -> StResult:
    """sum over balls of log_p(tau^t x) nu(x), certified mod p^(r-2).

    ``tau`` defaults to the measure's own basis of a^-1, for which the
    precomputed log histogram is used.  Any other basis needs the exact
    table.
    """
    p, r, q, D = m.p, m.level, m.q, m.disc
    kappa = max(r - ST_SLACK, 0)
    if m.balls is not None:
        if sum(m.balls.values(), Fraction(0)) != 0:
            raise MeasureError("total mass is not zero")
    elif m.residues is not None and m.total_mass() != 0:
        raise MeasureError("total mass is not zero")
    if tau is None or tuple(tau) == tuple(m.tau):
        W = m.log_histogram()
        L0, L1 = log_table(p, r, D)
        inv_e = pow(p * p - 1, -1, q)
        a = int(K.pair_sum(W, L0, q)) * inv_e % q
        b = int(K.pair_sum(W, L1, q)) * inv_e % q
        return StResult(_unr(p, D, a, b, r), kappa)
    if m.balls is None:
        raise MeasureError("an exact table is needed for a foreign basis")
    (t1, t2) = tau
    s0 = s1 = 0
    for (x1, x2), v in m.balls.items():
        if v == 0:
            continue
        if v.denominator % p == 0:
            raise MeasureError("ball values are not p-integral")
        A = Fraction(x1 * t1[0] + x2 * t2[0])
        B = Fraction(x1 * t1[1] + x2 * t2[1])
        A = A.numerator * pow(A.denominator, -1, q) % q
        B = B.numerator * pow(B.denominator, -1, q) % q
        l0, l1 = _log_unit_coords(A, B, D, p, r, 2)
        w = v.numerator * pow(v.denominator, -1, q)
        s0 += w * l0
        s1 += w * l1
    return StResult(_unr(p, D, s0 % q, s1 % q, r), kappa)


def log_eps_plus(field: QuadraticField, p: int, prec: int) -> Unramified:
    e = field.eps_plus
    return Unramified.from_coords(p, field.D, e[0], e[1], prec + 1).log().with_prec(prec)


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------

@dataclass
class GrossStarkRecord:
    cls: int
    form: str
    order: int
    two_torsion: bool
    zeta0: Fraction
    valuation: int
    raw_log: Unramified            # desmoothed J or -L'/2, before C and k
    integral: Unramified           # desmoothed J[tau] itself
    lp_prime: LpResult             # desmoothed derivative at 0
    lp_prime_alt: LpResult | None  # same with the second smoothing
    kappa: int
    log_value: Unramified | None = None
    k: int | None = None
    unit: Unramified | None = None
    root: tuple | None = None
    status: str = STATUS_PENDING
    candidates: list = field(default_factory=list)
    trace_check: bool | None = None
    notes: str = ""

    def frobenius_fixed(self) -> bool:
        """Fixedness of the integral for 2-torsion classes, of the log value otherwise.

        For 2-torsion classes the log value is -L'/2 and rational by
        construction; the content is that J itself lands in Q_p.
        """
        v = self.integral if self.two_torsion else self.log_value
        if v is None:
            v = self.raw_log
        return v.with_prec(self.kappa).is_rational()

    def to_dict(self) -> dict:
        def fmt(z):
            return None if z is None else format_unramified(z.with_prec(self.kappa))
        return {
            "class": self.form, "order": self.order, "two_torsion": self.two_torsion,
            "zeta0": str(self.zeta0), "valuation": self.valuation,
            "integral": fmt(self.integral), "raw_log": fmt(self.raw_log),
            "log": fmt(self.log_value),
            "lp_prime": format_padic(self.lp_prime.certified()),
            "k": self.k, "unit": fmt(self.unit), "root_of_unity": self.root,
            "status": self.status, "trace_law": self.trace_check,
            "frobenius_fixed": self.frobenius_fixed(),
            "certified_mod": f"{self.raw_log.p}^{self.kappa}",
            **({"notes": self.notes} if self.notes else {}),
        }


def fit_normalization(zetas, valuations) -> Fraction | None:
    """The constant C with valuations = C * zetas, if one exists."""
    C = None
    for z, v in zip(zetas, valuations):
        z, v = Fraction(z), Fraction(v)
        if z == 0:
            if v != 0:
                return None
            continue
        if C is None:
            C = v / z
        elif v != C * z:
            return None
    return C


@dataclass
class Pipeline:
    """All per-class quantities for one (disc, p) at level r.

    Measures are reduced to their histograms and dropped as soon as they
    are built, so peak memory stays at a few level-r tables.
    """
    disc: int
    p: int
    level: int
    c: int = 5
    d: int = 7
    cache_dir: str | None = None
    kmax: int = KMAX
    normalization: int = NORMALIZATION
    conjugate_embedding: bool = CONJUGATE_EMBEDDING

    def __post_init__(self):
        self.field = QuadraticField(self.disc)
        self.group = self.field.class_group
        self.ell = smoothing_prime(self.field, self.p, avoid=6 * self.p * self.c * self.d)
        self._ideals = {}
        self._lp = {}
        self._st = {}

    @property
    def kappa(self) -> int:
        return max(self.level - RECORD_SLACK, 0)

    def ideal(self, cls: int):
        if cls not in self._ideals:
            self._ideals[cls] = default_ideal(self.field, cls, self.p, self.c * self.d * self.ell[0])
        return self._ideals[cls]

    def form(self, cls: int) -> str:
        return str(self.group.cycles[cls][0])

    def measure(self, cls: int, c: int, exact: bool | None = False) -> EisensteinMeasure:
        m = build_measure(self.disc, self.p, c, cls, self.level, field=self.field,
                          ideal=self.ideal(cls), exact=exact, cache_dir=self.cache_dir)
        return m

    def auxiliary(self, cls: int, exact: bool | None = False) -> EisensteinMeasure:
        return build_auxiliary_measure(self.disc, self.p, cls, self.level, field=self.field,
                                       ideal=self.ideal(cls), ell=self.ell, exact=exact,
                                       cache_dir=self.cache_dir)

    def lp_prime(self, cls: int, c: int | None = None) -> LpResult:
        """Desmoothed L_p'(1_[a],p, 0) with smoothing c."""
        c = self.c if c is None else c
        key = (cls, c)
        if key not in self._lp:
            m = self.measure(cls, c)
            m.drop_table()
            self._lp[key] = desmooth(lp_derivative0(m), c)
        return self._lp[key]

    def st_value(self, cls: int) -> StResult:
        """J[tau] for the class, desmoothed by N(l) - 1."""
        if cls not in self._st:
            m = self.auxiliary(cls)
            raw = st_integral(m)
            m.drop_table()
            clear_sweep_cache()
            ell = self.ell[0]
            val = raw.value / Unramified.from_coords(self.p, self.disc, ell - 1, 0, raw.value.prec)
            self._st[cls] = StResult(val, raw.kappa - valuation(ell - 1, self.p))
        return self._st[cls]

    def prepare(self, cls: int):
        """Both rational smoothings share the sweep that the integral needs next."""
        self.lp_prime(cls, self.c)
        self.lp_prime(cls, self.d)
        self.st_value(cls)

    def record(self, cls: int) -> GrossStarkRecord:
        self.prepare(cls)
        return log_gs_unit(self, cls)

    def records(self, classes=None) -> list[GrossStarkRecord]:
        classes = range(self.group.order) if classes is None else classes
        return [self.record(c) for c in classes]


def log_gs_unit(pipe: Pipeline, cls: int) -> GrossStarkRecord:
    """Log value of the Gross-Stark unit attached to ``cls`` (before k)."""
    G, p = pipe.group, pipe.p
    order = G.element_order(cls)
    two = order <= 2
    z = class_zeta(pipe.field, cls, 0)
    lp = pipe.lp_prime(cls)
    alt = pipe._lp.get((cls, pipe.d))
    st = pipe.st_value(cls)
    kappa = min(pipe.kappa, lp.kappa, st.kappa)
    half = PAdic.from_rational(p, Fraction(-1, 2), lp.value.prec)
    trace_ok = (st.value.trace() + lp.value).equals(PAdic.zero(p, kappa), kappa)
    if two:
        raw = Unramified.from_qp(lp.value * half, pipe.disc)
    else:
        raw = st.value
    C = pipe.normalization
    rec = GrossStarkRecord(cls, pipe.form(cls), order, two, z, int(C * z), raw, st.value, lp,
                           alt, kappa, trace_check=trace_ok)
    rec.log_value = raw * C
    if pipe.conjugate_embedding:
        rec.log_value = rec.log_value.conjugate()
    return rec


# ---------------------------------------------------------------------------
# recognition
# ---------------------------------------------------------------------------

def _unit_from_log(p, disc, v, log, root, prec):
    pv = Unramified.from_coords(p, disc, Fraction(p) ** v, 0, prec + abs(v))
    return pv * root * padic_exp(log.with_prec(prec))


def _k_order(kmax):
    yield 0
    for k in range(1, kmax + 1):
        yield k
        yield -k


def unit_candidates(rec: GrossStarkRecord, log_eps: Unramified, kmax: int = KMAX):
    """(k, root index, unit) for every admissible lift of the record."""
    p, D, kappa = rec.raw_log.p, rec.raw_log.disc, rec.kappa
    roots = roots_of_unity(p, D, kappa + 2)
    base = rec.log_value.with_prec(kappa)
    for k in _k_order(0 if rec.two_torsion else kmax):
        lg = base + log_eps.with_prec(kappa) * k
        for i, zt in enumerate(roots):
            if rec.two_torsion and not zt.is_rational():
                continue
            yield k, i, _unit_from_log(p, D, rec.valuation, lg, zt, kappa)


def _exact_lift(u: Unramified):
    """u as an exact element x + y sqrt D of Q(sqrt D) (digits beyond precision set to 0)."""
    def lift(x: PAdic):
        if x.val is None:
            return Fraction(0)
        return Fraction(x.unit % x.p ** (x.prec - x.val)) * Fraction(x.p) ** x.val
    return (lift(u.a), lift(u.b))


def _qval(z, p) -> int | None:
    vals = []
    for x in z:
        if x != 0:
            vals.append(valuation(x.numerator, p) - valuation(x.denominator, p))
    return min(vals) if vals else None


def root_defect(coeffs, u: Unramified) -> int | None:
    """v(P(u)) - v(P'(u)) - N(u) for the exact lift of u, N(u) its absolute precision.

    A simple root known to absolute precision N moves P by P'(u) p^N, so
    the lift is consistent with being a root iff the defect is >= 0.
    Returns None when P(u) vanishes exactly.
    """
    p, D = u.p, u.disc
    x = _exact_lift(u)
    val = (Fraction(0), Fraction(0))
    der = (Fraction(0), Fraction(0))
    for a in coeffs:
        der = _qadd(_qmul_exact(der, x, D), val)
        val = _qadd(_qmul_exact(val, x, D), (Fraction(a), Fraction(0)))
    vp = _qval(val, p)
    if vp is None:
        return None
    vd = _qval(der, p)
    if vd is None:
        return -10 ** 9
    return vp - vd - u.prec


def _qmul_exact(x, y, D):
    return (x[0] * y[0] + D * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _qadd(x, y):
    return (x[0] + y[0], x[1] + y[1])


def is_root(coeffs, u: Unramified) -> bool:
    d = root_defect(coeffs, u)
    return d is None or d >= 0


def reconstruct_unit(rec: GrossStarkRecord, log_eps: Unramified, target=None,
                     kmax: int = KMAX) -> GrossStarkRecord:
    """Attach a unit to ``rec``; with a target polynomial, keep the lifts that are roots.

    Without a target every lift is a candidate and the status stays
    ambiguous unless only one exists (2-torsion classes over Q_p with p = 3
    have two, the sign).
    """
    rec = replace(rec, candidates=[])
    found = []
    for k, i, u in unit_candidates(rec, log_eps, kmax):
        if target is None or is_root(target, u):
            found.append((k, i, u))
    if target is not None:
        # the smallest |k| carrying a root wins; other k are the Z log eps shadow
        if found:
            kbest = min(abs(k) for k, _, _ in found)
            found = [f for f in found if abs(f[0]) == kbest]
    rec.candidates = [(k, i) for k, i, _ in found]
    if not found:
        rec.status = STATUS_FAILED
        rec.notes = "no lift with |k| <= %d is a root" % kmax if target is not None else "no lift"
        return rec
    k, i, u = found[0]
    rec.k, rec.root, rec.unit = k, (i,), u
    rec.log_value = rec.log_value + log_eps.with_prec(rec.kappa) * k
    rec.status = STATUS_MATCHED if len(found) == 1 else STATUS_AMBIGUOUS
    return rec


def reconstruct_all(records, field: QuadraticField, target=None, kmax: int = KMAX):
    """Reconstruct every class; without a target, prune k by the sum rule."""
    p = records[0].raw_log.p
    kappa = min(r.kappa for r in records)
    le = log_eps_plus(field, p, kappa)
    out = [reconstruct_unit(r, le, target, kmax) for r in records]
    if target is None:
        out = _sum_rule(out, le, kappa, kmax)
    return out


def _sum_rule(records, le, kappa, kmax):
    """Flag whether the chosen lifts satisfy sum of log values = 0."""
    total = sum_of_logs(records, kappa)
    ok = total is not None and total.with_prec(kappa - 1).is_zero()
    for r in records:
        if r.status != STATUS_FAILED:
            extra = "smallest lift chosen without a target polynomial"
            if not ok:
                extra += "; log values do not sum to zero"
            r.notes = (r.notes + "; " if r.notes else "") + extra
    return records


def sum_of_logs(records, kappa) -> Unramified:
    total = None
    for r in records:
        v = r.log_value.with_prec(kappa)
        total = v if total is None else total + v
    return total


# ---------------------------------------------------------------------------
# minimal polynomial
# ---------------------------------------------------------------------------

@dataclass
class PolyResult:
    coefficients: list | None
    status: str
    message: str = ""
    precision: int = 0

    def to_dict(self):
        return {"coefficients": self.coefficients, "status": self.status,
                "message": self.message, "precision": self.precision}


def unit_min_poly(records) -> PolyResult:
    """prod (X - u_a), scaled by p^(sum max(v, 0)) and read off as integers."""
    if any(r.unit is None for r in records):
        return PolyResult(None, STATUS_FAILED, "some classes have no unit")
    p, D = records[0].unit.p, records[0].unit.disc
    kappa = min(r.kappa for r in records)
    shift = sum(max(r.valuation, 0) for r in records)
    # coefficients of p^shift prod (X - u) are p-integral; track with units scaled by p^-v
    # prod (X - p^v w) = prod over v>0 of p^v (p^-v X - w) ... expand directly
    work = kappa + 2 * sum(abs(r.valuation) for r in records)
    poly = [Unramified.from_coords(p, D, 1, 0, work)]
    for r in records:
        u = r.unit
        new = [Unramified.from_coords(p, D, 0, 0, work) for _ in range(len(poly) + 1)]
        for i, a in enumerate(poly):
            new[i] = new[i] + a
            new[i + 1] = new[i + 1] - a * u
        poly = new
    scale = Fraction(p) ** shift
    scaled = [a * Unramified.from_coords(p, D, scale, 0, work) for a in poly]
    # the expansion can lose digits below kappa; only what survives is used
    kappa = min([kappa] + [a.prec for a in scaled])
    if kappa <= 0:
        return PolyResult(None, STATUS_FAILED, "no digits survive the expansion; raise r", 0)
    mod = p ** kappa
    coeffs = []
    for a in scaled:
        if not a.b.with_prec(kappa).is_zero():
            return PolyResult(None, STATUS_FAILED, "coefficient not in Q_p; raise r", kappa)
        x = a.a.with_prec(kappa)
        if x.val is not None and x.val < 0:
            return PolyResult(None, STATUS_FAILED, "coefficient not p-integral; raise r", kappa)
        n = x.to_int_mod(kappa) if x.val is not None else 0
        rr = rational_reconstruct(n, mod)
        if rr is None or rr.denominator != 1:
            return PolyResult(None, STATUS_FAILED,
                              f"coefficients exceed the reconstruction bound at {p}^{kappa}; raise r",
                              kappa)
        coeffs.append(int(rr))
    return PolyResult(coeffs, STATUS_MATCHED, "", kappa)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def galois_dichotomy(records) -> dict:
    """Per class: Frobenius-fixed log value iff the class has order <= 2."""
    out = {}
    for r in records:
        out[r.form] = {"order": r.order, "fixed": r.frobenius_fixed(),
                       "consistent": r.frobenius_fixed() == r.two_torsion}
    return out


def report(pipe: Pipeline, records, poly: PolyResult | None = None) -> dict:
    return {
        "disc": pipe.disc, "p": pipe.p, "c": pipe.c, "d": pipe.d, "level": pipe.level,
        "smoothing_prime": pipe.ell[0], "normalization": pipe.normalization,
        "certified_mod": f"{pipe.p}^{min(r.kappa for r in records)}",
        "classes": [r.to_dict() for r in records],
        "valuations": [r.valuation for r in records],
        "polynomial": None if poly is None else poly.to_dict(),
        "galois": galois_dichotomy(records),
    }


def report_json(pipe, records, poly=None) -> str:
    return json.dumps(report(pipe, records, poly), indent=2, sort_keys=False)
