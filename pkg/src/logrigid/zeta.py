"""
Exact partial zeta values of real quadratic fields at s = 0, -1, -2.

Values come from Shintani's formula on a unimodular subdivision of the
fundamental domain {s + t*eps_plus : s > 0, t >= 0} of the totally positive
units.  Congruence conditions modulo p^r are handled by one sweep over the
p^r-scaled parallelepipeds, bucketing by residue.  An independent evaluator
via generalized Bernoulli numbers gives the Dedekind zeta value.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd, isqrt, lcm

from .padic import kronecker, require_inert
from .quadfield import (Ideal, QuadraticField, conj, elt, inv, lattice_coords,
                        mul, norm, sign)


# -- Bernoulli numbers ---------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    if n == 0:
        return Fraction(1)
    return -sum(comb(n + 1, j) * bernoulli(j) for j in range(n)) / (n + 1)


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(n: int) -> tuple[Fraction, ...]:
    """Coefficients of B_n(x), constant term first."""
    return tuple(comb(n, j) * bernoulli(n - j) for j in range(n + 1))


def bernoulli_poly(n: int, x) -> Fraction:
    x = Fraction(x)
    acc = Fraction(0)
    for a in reversed(bernoulli_poly_coeffs(n)):
        acc = acc * x + a
    return acc


def generalized_bernoulli(k: int, D: int) -> Fraction:
    """B_{k,chi} for the Kronecker character chi_D of conductor D."""
    f = D
    s = sum(kronecker(D, a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1))
    return Fraction(f) ** (k - 1) * s


def riemann_zeta_neg(k: int) -> Fraction:
    """zeta(1 - k) for k >= 1."""
    if k == 1:
        return Fraction(-1, 2)
    return -bernoulli(k) / k


def dirichlet_oracle(D: int, s: int) -> Fraction:
    """zeta_F(s) = zeta(s) L(s, chi_D) at s = 1 - k <= 0."""
    k = 1 - s
    if k < 1:
        raise ValueError("s must be a non-positive integer")
    return riemann_zeta_neg(k) * (-generalized_bernoulli(k, D) / k)


# -- cone decomposition --------------------------------------------------------

def _primitive(v):
    g = gcd(v[0], v[1])
    return (v[0] // g, v[1] // g)


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _to_int_coords(basis, u, D):
    a, b = lattice_coords(basis, u, D)
    if a.denominator != 1 or b.denominator != 1:
        raise ValueError("element not in lattice")
    return int(a), int(b)


@dataclass(frozen=True)
class Cone:
    """Half-open cone {a*w1 + b*w2 : a > 0, b >= 0}, w_i primitive in L.

    ``M`` holds the L-coordinates of w1 and w2 as columns.
    """
    w1: tuple
    w2: tuple
    M: tuple[tuple[int, int], tuple[int, int]]


def _ray(basis, u, D):
    a, b = lattice_coords(basis, u, D)
    m = lcm(a.denominator, b.denominator)
    return _primitive((int(a * m), int(b * m)))


def unimodular_cones(basis, eps_plus, D: int) -> list[Cone]:
    """Unimodular subdivision of the domain spanned by 1 and eps_plus."""
    one = _ray(basis, elt(1), D)
    eps = _ray(basis, eps_plus, D)
    start, end = eps, one
    if _det(start, end) < 0:
        # mirror: walk with the opposite orientation, same cones
        flip = True
        start, end = (start[1], start[0]), (end[1], end[0])
    else:
        flip = False
    rays = [start]
    w = start
    while w != end:
        # e0 with det(w, e0) = 1 via extended gcd
        g, s, t = _egcd(w[0], w[1])
        e0 = (-t, s)  # w0*s + w1*t = 1 -> det(w, (-t, s)) = 1
        num, den = -_det(e0, end), _det(w, end)
        tmin = -((-num) // den)
        w = (e0[0] + tmin * w[0], e0[1] + tmin * w[1])
        rays.append(w)
    if flip:
        rays = [(r[1], r[0]) for r in rays]
    rays.reverse()  # from 1 towards eps_plus
    (p1, q1), (p2, q2) = basis
    cones = []
    for a, b in zip(rays, rays[1:]):
        w1 = (a[0] * p1 + a[1] * p2, a[0] * q1 + a[1] * q2)
        w2 = (b[0] * p1 + b[1] * p2, b[0] * q1 + b[1] * q2)
        cones.append(Cone(w1, w2, ((a[0], b[0]), (a[1], b[1]))))
    return cones


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


# -- Shintani formula ----------------------------------------------------------

def _poly_mul(f, g, D, deg):
    out = [elt(0)] * (deg + 1)
    for i, a in enumerate(f):
        if a == (0, 0):
            continue
        for j, b in enumerate(g):
            if i + j > deg:
                break
            c = mul(a, b, D)
            out[i + j] = (out[i + j][0] + c[0], out[i + j][1] + c[1])
    return out


def _linear_power(v, e, D, deg):
    """(v + y * v')^e truncated at degree deg, e >= -1."""
    vc = conj(v)
    if e == -1:
        iv = inv(v, D)
        ratio = mul((-vc[0], -vc[1]), iv, D)
        out, term = [], iv
        for _ in range(deg + 1):
            out.append(term)
            term = mul(term, ratio, D)
        return out
    out = [elt(1)] + [elt(0)] * deg
    for _ in range(e):
        out = _poly_mul(out, [v, vc], D, deg)
    return out


def cone_coefficients(v1, v2, k: int, D: int) -> dict[tuple[int, int], Fraction]:
    """c with zeta(C, x, 1 - k) = sum c[l1, l2] B_l1(x1) B_l2(x2).

    Here zeta(C, x, s) = sum_{n >= 0} N((n1 + x1) v1 + (n2 + x2) v2)^(-s).
    """
    d = k - 1
    pref = Fraction(factorial(d) ** 2, 2)
    coeffs = {}
    for l1 in range(2 * k + 1):
        l2 = 2 * k - l1
        f = _linear_power(v1, l1 - 1, D, d)
        g = _linear_power(v2, l2 - 1, D, d)
        top = _poly_mul(f, g, D, d)[d]
        coeffs[(l1, l2)] = pref * 2 * top[0] / (factorial(l1) * factorial(l2))
    return coeffs


def shintani_value(v1, v2, x, k: int, D: int) -> Fraction:
    coeffs = cone_coefficients(v1, v2, k, D)
    return sum((c * bernoulli_poly(l1, x[0]) * bernoulli_poly(l2, x[1])
                for (l1, l2), c in coeffs.items()), Fraction(0))


# -- ray conditions and sweeps -------------------------------------------------

@dataclass(frozen=True)
class RayCondition:
    """Class of the integral ideal ``ideal`` with residue ``v`` mod p^r a^-1.

    ``v`` is given in coordinates of the oriented basis of a^-1, or None at
    level 0.
    """
    ideal: Ideal
    p: int
    level: int = 0
    v: tuple[int, int] | None = None

    def __post_init__(self):
        if self.level == 0 and self.v is not None:
            raise ValueError("level 0 carries no residue")
        if self.level > 0:
            if self.v is None:
                raise ValueError("residue required at positive level")
            if self.v[0] % self.p == 0 and self.v[1] % self.p == 0:
                raise ValueError("residue lies in p a^-1")


class ZetaSweep:
    """Domain-restricted partial zeta sums Z(y) over residues y of a^-1 mod p^r.

    Z(y) = N(a)^(k-1) * sum N(lam)^(k-1) over lam in D cap a^-1 with
    lam = y mod p^r a^-1, regularized by Shintani's formula.

    With ``sub`` an integral ideal l, the sum runs over lam in D cap l a^-1
    instead, still keyed by residues of a^-1.
    """

    def __init__(self, field: QuadraticField, ideal: Ideal, p: int, level: int, k: int = 1,
                 sub: Ideal | None = None):
        if not ideal.is_integral():
            raise ValueError("ideal must be integral")
        if ideal.norm.numerator % p == 0:
            raise ValueError(f"ideal norm {ideal.norm} is not coprime to {p}")
        if sub is not None and sub.norm.numerator % p == 0:
            raise ValueError("sublattice index must be prime to p")
        self.field = field
        self.D = field.D
        self.ideal = ideal
        self.p = p
        self.level = level
        self.k = k
        self.q = p ** level
        self.lattice = ideal.inverse()
        self.basis = self.lattice.basis
        self.sub = sub
        sweep_basis = self.basis if sub is None else (self.lattice * sub).basis
        self.cones = []
        for cone in unimodular_cones(sweep_basis, field.eps_plus, self.D):
            c1 = _to_int_coords(self.basis, cone.w1, self.D)
            c2 = _to_int_coords(self.basis, cone.w2, self.D)
            self.cones.append(Cone(cone.w1, cone.w2, ((c1[0], c2[0]), (c1[1], c2[1]))))
        self._values: dict[tuple[int, int], Fraction] | None = None

    @property
    def eps_matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Integer matrix of multiplication by eps_plus in L-coordinates."""
        cols = [_to_int_coords(self.basis, mul(self.field.eps_plus, b, self.D), self.D) for b in self.basis]
        return ((cols[0][0], cols[1][0]), (cols[0][1], cols[1][1]))

    def values(self) -> dict[tuple[int, int], Fraction]:
        if self._values is None:
            self._values = self._sweep()
        return self._values

    def _sweep(self):
        q, k, D = self.q, self.k, self.D
        scale = Fraction(self.ideal.norm) ** (k - 1)
        bern = {l: [bernoulli_poly(l, Fraction(i, q)) for i in range(q + 1)] for l in range(2 * k + 1)}
        out: dict[tuple[int, int], Fraction] = {}
        for cone in self.cones:
            v1 = (cone.w1[0] * q, cone.w1[1] * q)
            v2 = (cone.w2[0] * q, cone.w2[1] * q)
            coeffs = cone_coefficients(v1, v2, k, D)
            (m00, m01), (m10, m11) = cone.M
            for i in range(1, q + 1):
                for j in range(q):
                    val = sum(c * bern[l1][i] * bern[l2][j] for (l1, l2), c in coeffs.items())
                    key = ((m00 * i + m01 * j) % q, (m10 * i + m11 * j) % q)
                    out[key] = out.get(key, Fraction(0)) + val
        return {key: scale * v for key, v in sorted(out.items())}

    def __call__(self, y) -> Fraction:
        q = self.q
        return self.values().get((y[0] % q, y[1] % q), Fraction(0))

    def unit_residues(self):
        p, q = self.p, self.q
        return [(a, b) for a in range(q) for b in range(q) if a % p or b % p]

    def orbit(self, y) -> list[tuple[int, int]]:
        (a, b), (c, d) = self.eps_matrix
        q = self.q
        y = (y[0] % q, y[1] % q)
        out = [y]
        z = ((a * y[0] + b * y[1]) % q, (c * y[0] + d * y[1]) % q)
        while z != y:
            out.append(z)
            z = ((a * z[0] + b * z[1]) % q, (c * z[0] + d * z[1]) % q)
        return out

    def orbit_representatives(self) -> list[tuple[int, int]]:
        seen, reps = set(), []
        for y in self.unit_residues():
            if y in seen:
                continue
            reps.append(y)
            seen.update(self.orbit(y))
        return reps


def smoothing_prime(field: QuadraticField, p: int, avoid: int = 1, start: int = 5):
    """Smallest prime l = N(alpha), alpha >> 0 in O_F, with l != 0, 1 mod p.

    The ideal (alpha) is narrowly principal of prime norm (split or
    ramified), so l-smoothing
    commutes with the class group action and l - 1 is a p-adic unit.
    Returns (l, alpha, Ideal).
    """
    D = field.D
    half = Fraction(1, 2)
    w = (Fraction(D % 4, 2), half)  # generator of O_F over Z
    bound = 16
    while True:
        found = {}
        for y in range(0, bound + 1):
            for x in range(-bound * isqrt(D) - 2, bound * isqrt(D) + 3):
                a = (x + y * w[0], y * w[1])
                n = norm(a, D)
                if n <= 0 or n.denominator != 1:
                    continue
                ell = int(n)
                if ell < start or ell % p in (0, 1) or gcd(ell, avoid) != 1:
                    continue
                if ell in found or not _is_prime(ell):
                    continue
                if sign(a, D) < 0:
                    a = (-a[0], -a[1])
                found[ell] = a
        if found:
            ell = min(found)
            a = found[ell]
            return ell, a, Ideal.from_generators(D, [a])
        bound *= 2


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _check_prime(D: int, p: int):
    require_inert(D, p)


def partial_zeta(field: QuadraticField, ideal: Ideal, s: int) -> Fraction:
    """zeta([a], s) for the narrow class of the integral ideal a."""
    k = 1 - s
    scale = Fraction(ideal.norm) ** (k - 1)
    basis = ideal.inverse().basis
    total = Fraction(0)
    for cone in unimodular_cones(basis, field.eps_plus, field.D):
        total += shintani_value(cone.w1, cone.w2, (1, 0), k, field.D)
    return scale * total


def class_zeta(field: QuadraticField, cls: int, s: int) -> Fraction:
    """zeta(A, s) for narrow class index A of the field's class group."""
    G = field.class_group
    return partial_zeta(field, G.integral_representative(cls), s)


def siegel_partial_zeta(cond: RayCondition, s: int, field: QuadraticField | None = None) -> Fraction:
    """Ray class partial zeta value at s = 1 - k.

    At level 0 this is zeta([a], s).  At level r >= 1 the value is the sum over
    lam >> 0 in a^-1, lam = v mod p^r a^-1, modulo the units eps_plus^m fixing
    the residue; the p-Euler factor is absent by construction.
    """
    a = cond.ideal
    field = field or QuadraticField(a.D)
    _check_prime(field.D, cond.p)
    if a.norm.numerator % cond.p == 0:
        raise ValueError("ideal not coprime to p")
    if s not in (0, -1, -2):
        raise ValueError("s must be 0, -1 or -2")
    if cond.level == 0:
        return partial_zeta(field, a, s)
    sweep = ZetaSweep(field, a, cond.p, cond.level, 1 - s)
    return sum((sweep(y) for y in sweep.orbit(cond.v)), Fraction(0))


def euler_removed(field: QuadraticField, ideal: Ideal, p: int, s: int) -> Fraction:
    """zeta([a], s) * (1 - p^(-2s)): the value with the p-Euler factor removed."""
    return partial_zeta(field, ideal, s) * (1 - Fraction(p) ** (-2 * s))


def delta_c(field: QuadraticField, ideal: Ideal, s: int, c: int, p: int | None = None,
            level: int = 0, v=None) -> Fraction:
    """Delta_c(eps, s) = L(eps, s) - c^(2k) L(eps_c, s), s = 1 - k.

    eps is the indicator of the class of ``ideal`` (with the p-Euler factor
    removed when p is given), further restricted to the ray class of the
    residue v at positive level.  eps_c(b) = eps((c) b) shifts v to v / c.
    """
    k = 1 - s
    if gcd(c, int(ideal.norm.numerator)) != 1:
        raise ValueError("smoothing not coprime to the ideal")
    if p is not None and c % p == 0:
        raise ValueError("smoothing not coprime to p")
    if level == 0:
        base = euler_removed(field, ideal, p, s) if p is not None else partial_zeta(field, ideal, s)
        return (1 - Fraction(c) ** (2 * k)) * base
    sweep = ZetaSweep(field, ideal, p, level, k)
    q = sweep.q
    cinv = pow(c, -1, q)
    orbit = sweep.orbit(v)
    L = sum((sweep(y) for y in orbit), Fraction(0))
    Lc = sum((sweep((y[0] * cinv, y[1] * cinv)) for y in orbit), Fraction(0))
    return L - Fraction(c) ** (2 * k) * Lc


def signed_quadrant_sum(field: QuadraticField, ideal: Ideal, s: int = 0) -> Fraction:
    """(1/4) sum over the four sign quadrants of sign(N lam) N(a)^-s |N lam|^-s.

    Negative-norm elements of a^-1 are sqrt(D) times totally positive elements
    of (sqrt D)^-1 a^-1, so the sum is (zeta([a]) - zeta([a][sqrt D])) / 2.
    """
    aR = ideal * Ideal.from_generators(field.D, [elt(0, 1)])
    return (partial_zeta(field, ideal, s) - partial_zeta(field, aR, s)) / 2
