"""
Level-r ball tables of the smoothed Eisenstein measure on X = Z_p^2 - pZ_p^2.

A ball U_x (x a residue of a^-1 mod p^r, outside p a^-1) receives

    lam(U_x) = Z(c x) - c^2 Z(x)

where Z(y) sums the Shintani-regularized values over lattice points of the
fundamental domain congruent to y.  The table has total mass zero and
satisfies the distribution relation between adjacent levels exactly.

For the p-adic integration an integral representative is also needed; it is
obtained by smoothing with a narrowly principal prime ideal l = (alpha)
instead of a rational integer:

    nu(U_x) = N(l) Z_l(x) - Z(x),

Z_l being the same sum over points of l a^-1.  Both tables come out of one
modular sweep per lattice; small levels are additionally kept as exact
rationals.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _kernels as K
from .padic import require_inert
from .quadfield import Ideal, QuadraticField, lattice_coords
from .zeta import ZetaSweep, cone_coefficients, smoothing_prime

CACHE_VERSION = 1
EXACT_LEVEL = 3  # default: keep exact rationals up to this level


class MeasureError(ValueError):
    pass


def modulus_exponent(p: int) -> int:
    """Largest M with p^M < 2^56."""
    M = 0
    while p ** (M + 1) < 2 ** 56:
        M += 1
    return M


def scale_exponent(p: int, level: int) -> int:
    """v_p of the sweep scale 12 p^(2r)."""
    v, t = 0, 12
    while t % p == 0:
        t //= p
        v += 1
    return 2 * level + v


def scale_unit(p: int, mod: int) -> int:
    """Inverse mod ``mod`` of the prime-to-p part of 12."""
    t = 12
    while t % p == 0:
        t //= p
    return pow(t, -1, mod)


def _cone_polynomial(cone, q: int, m: int, D: int):
    """Coefficients of 12 q^2 zeta(C_q, (i/q, j/q), 0) as a quadratic in (i, j)."""
    co = cone_coefficients(cone.w1, cone.w2, 1, D)
    c20, c11, c02 = co[(2, 0)], co[(1, 1)], co[(0, 2)]
    exact = (12 * c20, 12 * c11, 12 * c02,
             -12 * q * c20 - 6 * q * c11,
             -6 * q * c11 - 12 * q * c02,
             q * q * (2 * c20 + 3 * c11 + 2 * c02))
    out = []
    for v in exact:
        v = Fraction(v)
        out.append(v.numerator * pow(v.denominator, -1, m) % m)
    return out


def modular_sweep(sweep: ZetaSweep, M: int) -> np.ndarray:
    """12 q^2 Z(y) mod p^M for every residue y, indexed y1 * q + y2."""
    if sweep.k != 1:
        raise ValueError("the modular sweep handles s = 0 only")
    q, m = sweep.q, sweep.p ** M
    acc = np.zeros(q * q, dtype=np.int64)
    for cone in sweep.cones:
        A, B, C, Dl, E, F = _cone_polynomial(cone, q, m, sweep.D)
        (m00, m01), (m10, m11) = cone.M
        K.sweep_cone(acc, q, m, A, B, C, Dl, E, F, m00 % q, m01 % q, m10 % q, m11 % q)
    return acc


# a couple of raw sweeps are shared between the c-, d- and l-smoothed builds
_SWEEPS: OrderedDict = OrderedDict()
_SWEEP_SLOTS = 2


def _cached_sweep(key, make):
    if key in _SWEEPS:
        _SWEEPS.move_to_end(key)
        return _SWEEPS[key]
    value = make()
    _SWEEPS[key] = value
    while len(_SWEEPS) > _SWEEP_SLOTS:
        _SWEEPS.popitem(last=False)
    return value


def clear_sweep_cache():
    _SWEEPS.clear()


def _fmt_frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_frac(s: str) -> Fraction:
    return Fraction(s)


@dataclass
class EisensteinMeasure:
    """Ball table at level r for one narrow class.

    ``smoothing`` is "rational" (lam above, smoothing integer c) or "ideal"
    (nu above, c holds the prime N(l)).  ``residues`` stores
    12 q^2 * value mod p^M; ``balls`` the exact values when kept.
    """
    disc: int
    p: int
    c: int
    cls: int
    form: str
    level: int
    ideal: Ideal
    tau: tuple
    smoothing: str = "rational"
    balls: dict | None = None
    residues: np.ndarray | None = None
    mod_exp: int = 0
    scale_exp: int = 0
    provenance: str = ""
    _norm_hist: np.ndarray | None = field(default=None, repr=False)
    _log_hist: np.ndarray | None = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.p ** self.level

    @property
    def modulus(self) -> int:
        return self.p ** self.mod_exp

    @property
    def exact(self) -> bool:
        return self.balls is not None

    def units(self):
        p, q = self.p, self.q
        return [(a, b) for a in range(q) for b in range(q) if a % p or b % p]

    def __getitem__(self, x) -> Fraction:
        if self.balls is None:
            raise MeasureError("exact table not kept at this level")
        return self.balls[(x[0] % self.q, x[1] % self.q)]

    def total_mass(self):
        """Exact total mass when the table is exact, else the scaled residue sum."""
        if self.balls is not None:
            return sum(self.balls.values(), Fraction(0))
        if self.residues is None:
            raise MeasureError("no table kept")
        return int(K.mod_sum(self.residues, self.modulus))

    # -- reductions used by the integrals ----------------------------------

    def norm_form(self):
        """Integer form f with f(x) = N(a) N(tau^t x)."""
        return self.ideal.inverse().form()

    def norm_histogram(self) -> np.ndarray:
        """B[n] = sum of lam(x) over balls with f(c x) = n mod p^r, mod p^(M - e).

        Each bucket is a union of eps_plus-orbits, so its sum is p-integral
        even though single balls need not be.
        """
        if self._norm_hist is None:
            if self.residues is None:
                raise MeasureError("table not kept; rebuild with keep_table")
            f = self.norm_form()
            c = self.c if self.smoothing == "rational" else 1
            H = K.norm_histogram(self.residues, self.q, self.p, self.modulus, f.a, f.b, f.c, c)
            pe = self.p ** self.scale_exp
            if any(int(h) % pe for h in H):
                raise MeasureError("orbit sums are not p-integral")
            mod = self.p ** (self.mod_exp - self.scale_exp)
            u = scale_unit(self.p, mod)
            self._norm_hist = np.array([(int(h) // pe) * u % mod for h in H], dtype=np.int64)
        return self._norm_hist

    def log_histogram(self) -> np.ndarray:
        """W[u, v] = sum of nu(x) over balls with (tau^t x)^(p^2-1) = 1 + p(u + v sqrtD), mod p^r."""
        if self._log_hist is None:
            if self.residues is None:
                raise MeasureError("table not kept; rebuild with keep_table")
            m = self.p ** self.level
            t = []
            for b in self.tau:
                t.append([Fraction(b[0]), Fraction(b[1])])
            red = [[v.numerator * pow(v.denominator, -1, m) % m for v in row] for row in t]
            W, bad = K.log_histogram(self.residues, self.q, self.p, self.scale_exp,
                                     red[0][0], red[1][0], red[0][1], red[1][1],
                                     self.disc % m, self.p * self.p - 1, scale_unit(self.p, m))
            if bad:
                raise MeasureError(f"{bad} ball values are not p-integral")
            self._log_hist = W
        return self._log_hist

    def drop_table(self):
        """Keep only the reductions (norm and, for integral tables, log histograms)."""
        self.norm_histogram()
        if self.smoothing == "ideal":
            self.log_histogram()
        self.residues = None
        self.balls = None

    # -- persistence -------------------------------------------------------

    def header(self) -> dict:
        return {
            "version": CACHE_VERSION,
            "provenance": self.provenance,
            "disc": self.disc,
            "p": self.p,
            "c": self.c,
            "smoothing": self.smoothing,
            "class": self.form,
            "level": self.level,
            "tau": [[_fmt_frac(Fraction(x)), _fmt_frac(Fraction(y))] for x, y in self.tau],
        }

    def to_json(self) -> str:
        doc = self.header()
        if self.balls is not None:
            doc["balls"] = [[x1, x2, _fmt_frac(v)] for (x1, x2), v in sorted(self.balls.items())]
        else:
            doc["balls"] = []
            doc["sidecar"] = True
        return json.dumps(doc, separators=(",", ":"))


def cache_stem(disc, p, c, form, level, smoothing) -> str:
    tag = "c" if smoothing == "rational" else "l"
    cls = form.strip("[]").replace(",", "_")
    return f"m_{disc}_{p}_{tag}{c}_{cls}_r{level}"


def save_measure(m: EisensteinMeasure, cache_dir) -> Path:
    """Write JSON (exact balls) plus .npy sidecars for the reductions."""
    d = Path(cache_dir)
    d.mkdir(parents=True, exist_ok=True)
    stem = cache_stem(m.disc, m.p, m.c, m.form, m.level, m.smoothing)
    path = d / f"{stem}.json"
    path.write_text(m.to_json())
    np.save(d / f"{stem}.norm.npy", m.norm_histogram(), allow_pickle=False)
    if m.smoothing == "ideal":
        np.save(d / f"{stem}.log.npy", m.log_histogram(), allow_pickle=False)
    return path


def load_measure(path, ideal: Ideal, field: QuadraticField | None = None) -> EisensteinMeasure | None:
    """Read a cached table; None when the file is missing or the version differs."""
    path = Path(path)
    if not path.exists():
        return None
    doc = json.loads(path.read_text())
    if doc.get("version") != CACHE_VERSION:
        return None
    field = field or QuadraticField(doc["disc"])
    G = field.class_group
    from .quadfield import Form
    cls = G.class_of_form(Form.parse(doc["class"]))
    tau = tuple((Fraction(x), Fraction(y)) for x, y in doc["tau"])
    m = EisensteinMeasure(doc["disc"], doc["p"], doc["c"], cls, doc["class"], doc["level"],
                          ideal, tau, doc["smoothing"], provenance=doc["provenance"],
                          mod_exp=modulus_exponent(doc["p"]),
                          scale_exp=scale_exponent(doc["p"], doc["level"]))
    if tau != tuple(ideal.inverse().basis):
        return None
    if doc["balls"]:
        m.balls = {(x1, x2): _parse_frac(v) for x1, x2, v in doc["balls"]}
        m.residues = _residues_from_balls(m.balls, m.p, m.level, m.mod_exp)
    stem = path.name[:-len(".json")]
    norm = path.parent / f"{stem}.norm.npy"
    if norm.exists():
        m._norm_hist = np.load(norm, allow_pickle=False)
    log = path.parent / f"{stem}.log.npy"
    if log.exists():
        m._log_hist = np.load(log, allow_pickle=False)
    if m.residues is None and m._norm_hist is None:
        return None
    return m


def _residues_from_balls(balls, p, level, M) -> np.ndarray:
    q = p ** level
    m = p ** M
    arr = np.zeros(q * q, dtype=np.int64)
    s = 12 * q * q
    for (x1, x2), v in balls.items():
        w = v * s
        arr[x1 * q + x2] = w.numerator * pow(w.denominator, -1, m) % m
    return arr


def _provenance(field, ideal, p, level, smoothing, c, sweeps) -> str:
    doc = {
        "disc": field.D,
        "eps_plus": [_fmt_frac(field.eps_plus[0]), _fmt_frac(field.eps_plus[1])],
        "domain": "s + t*eps_plus, s > 0, t >= 0",
        "ideal": [ideal.den, ideal.a, ideal.b, ideal.c],
        "p": p, "level": level, "smoothing": smoothing, "c": c,
        "cones": [[[_fmt_frac(x) for x in cone.w1], [_fmt_frac(x) for x in cone.w2]]
                  for sw in sweeps for cone in sw.cones],
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def _validate(field, p, c, ideal, level):
    if level < 1:
        raise MeasureError("level must be >= 1")
    require_inert(field.D, p)
    n = int(ideal.norm)
    if math.gcd(c, 6 * p * n) != 1:
        raise MeasureError(f"smoothing {c} must be coprime to 6 * {p} * N(a) = {6 * p * n}")


def default_ideal(field: QuadraticField, cls: int, p: int, avoid: int = 1) -> Ideal:
    return field.class_group.integral_representative(cls, 6 * p * avoid)


def _sweep_pair(field, ideal, p, level, sub, M):
    key = (field.D, ideal, p, level, sub)

    def make():
        sw = ZetaSweep(field, ideal, p, level, 1, sub=sub)
        return sw, modular_sweep(sw, M)
    return _cached_sweep(key, make)


def build_measure(disc: int, p: int, c: int, cls: int, level: int, *,
                  field: QuadraticField | None = None, ideal: Ideal | None = None,
                  exact: bool | None = None, cache_dir=None) -> EisensteinMeasure:
    """Rational c-smoothed ball table lam at level r for narrow class ``cls``."""
    field = field or QuadraticField(disc)
    ideal = ideal or default_ideal(field, cls, p, c)
    _validate(field, p, c, ideal, level)
    if exact is None:
        exact = level <= EXACT_LEVEL
    G = field.class_group
    form = str(G.cycles[cls][0])
    if cache_dir is not None:
        hit = load_measure(Path(cache_dir) / f"{cache_stem(disc, p, c, form, level, 'rational')}.json",
                           ideal, field)
        if hit is not None and (hit.exact or not exact):
            return hit
    M = modulus_exponent(p)
    q = p ** level
    sw, Z = _sweep_pair(field, ideal, p, level, None, M)
    m = p ** M
    lam = K.smooth_rational(Z, q, p, m, c % q, c * c % m)
    meas = EisensteinMeasure(disc, p, c, cls, form, level, ideal, tuple(ideal.inverse().basis),
                             "rational", residues=lam, mod_exp=M,
                             scale_exp=scale_exponent(p, level),
                             provenance=_provenance(field, ideal, p, level, "rational", c, [sw]))
    if exact:
        vals = sw.values()
        zero = Fraction(0)
        meas.balls = {x: vals.get(((c * x[0]) % q, (c * x[1]) % q), zero) - c * c * vals.get(x, zero)
                      for x in meas.units()}
    if cache_dir is not None:
        save_measure(meas, cache_dir)
    return meas


def build_auxiliary_measure(disc: int, p: int, cls: int, level: int, *,
                            field: QuadraticField | None = None, ideal: Ideal | None = None,
                            ell: tuple | None = None, exact: bool | None = None,
                            cache_dir=None) -> EisensteinMeasure:
    """Integral ball table nu = N(l) Z_l - Z for a narrowly principal prime l.

    ``ell`` is a (prime, generator, ideal) triple as returned by
    zeta.smoothing_prime; by default the smallest admissible one.
    """
    field = field or QuadraticField(disc)
    if ell is None:
        ell = smoothing_prime(field, p, avoid=6 * p)
    prime, _, lideal = ell
    ideal = ideal or default_ideal(field, cls, p, prime)
    if level < 1:
        raise MeasureError("level must be >= 1")
    require_inert(field.D, p)
    if math.gcd(prime, p * int(ideal.norm)) != 1 or prime % p == 1:
        raise MeasureError(f"smoothing prime {prime} unsuitable for p = {p}, N(a) = {ideal.norm}")
    if exact is None:
        exact = level <= EXACT_LEVEL
    G = field.class_group
    form = str(G.cycles[cls][0])
    if cache_dir is not None:
        hit = load_measure(Path(cache_dir) / f"{cache_stem(disc, p, prime, form, level, 'ideal')}.json",
                           ideal, field)
        if hit is not None and (hit.exact or not exact):
            return hit
    M = modulus_exponent(p)
    q, m = p ** level, p ** M
    sw, Z = _sweep_pair(field, ideal, p, level, None, M)
    sws, Zs = _sweep_pair(field, ideal, p, level, lideal, M)
    nu = K.smooth_sublattice(Z, Zs, q, p, m, prime)
    meas = EisensteinMeasure(disc, p, prime, cls, form, level, ideal, tuple(ideal.inverse().basis),
                             "ideal", residues=nu, mod_exp=M, scale_exp=scale_exponent(p, level),
                             provenance=_provenance(field, ideal, p, level, "ideal", prime, [sw, sws]))
    if exact:
        a, b = sw.values(), sws.values()
        zero = Fraction(0)
        meas.balls = {x: prime * b.get(x, zero) - a.get(x, zero) for x in meas.units()}
    if cache_dir is not None:
        save_measure(meas, cache_dir)
    return meas


def refine_consistency(m1: EisensteinMeasure, m2: EisensteinMeasure) -> bool:
    """lam_r(x) == sum of lam_(r+1) over the p^2 children of x, for every x."""
    keys = ("disc", "p", "c", "cls", "smoothing")
    if any(getattr(m1, k) != getattr(m2, k) for k in keys) or m1.ideal != m2.ideal:
        raise MeasureError("parameter mismatch")
    if m2.level != m1.level + 1:
        raise MeasureError("levels must differ by one")
    p, q = m1.p, m1.q
    if m1.balls is not None and m2.balls is not None:
        for x in m1.units():
            s = sum((m2.balls[(x[0] + q * a, x[1] + q * b)] for a in range(p) for b in range(p)),
                    Fraction(0))
            if s != m1.balls[x]:
                return False
        return True
    if m1.residues is None or m2.residues is None:
        raise MeasureError("tables not kept")
    # scaled residues: level r+1 carries an extra factor p^2
    mod = m1.modulus
    q2 = q * p
    for x in m1.units():
        s = sum(int(m2.residues[(x[0] + q * a) * q2 + x[1] + q * b]) for a in range(p) for b in range(p))
        if s % mod != (int(m1.residues[x[0] * q + x[1]]) * p * p) % mod:
            return False
    return True


def orbit_sums(m: EisensteinMeasure) -> dict:
    """Sum of exact ball values over each eps_plus-orbit of X_r, keyed by orbit minimum."""
    if m.balls is None:
        raise MeasureError("exact table required")
    field = QuadraticField(m.disc)
    eps = field.eps_plus
    basis = m.ideal.inverse().basis
    from .quadfield import mul
    cols = [lattice_coords(basis, mul(eps, b, m.disc), m.disc) for b in basis]
    a, b, c, d = int(cols[0][0]), int(cols[1][0]), int(cols[0][1]), int(cols[1][1])
    q = m.q
    seen, out = set(), {}
    for x in sorted(m.balls):
        if x in seen:
            continue
        orb, y = [], x
        while True:
            orb.append(y)
            y = ((a * y[0] + b * y[1]) % q, (c * y[0] + d * y[1]) % q)
            if y == x:
                break
        seen.update(orb)
        out[min(orb)] = sum((m.balls[z] for z in orb), Fraction(0))
    return out
