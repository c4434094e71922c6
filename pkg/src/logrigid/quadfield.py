"""
Real quadratic fields Q(sqrt D): exact elements, fundamental units, ideals,
indefinite binary quadratic forms and the narrow class group.

Elements are pairs of Fractions ``(x, y)`` standing for ``x + y*sqrt(D)``.
Embeddings are ordered so that sigma_1(sqrt D) > 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

QElt = tuple  # (Fraction, Fraction)


class InvalidDiscriminant(ValueError):
    pass


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental_discriminant(D: int) -> bool:
    if D <= 1:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    n = abs(n)
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- exact arithmetic in Q(sqrt D) -------------------------------------------

def elt(x, y=0) -> QElt:
    return (Fraction(x), Fraction(y))


def add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def mul(u, v, D):
    return (u[0] * v[0] + u[1] * v[1] * D, u[0] * v[1] + u[1] * v[0])


def conj(u):
    return (u[0], -u[1])


def norm(u, D) -> Fraction:
    return u[0] * u[0] - u[1] * u[1] * D


def trace(u) -> Fraction:
    return 2 * u[0]


def inv(u, D):
    n = norm(u, D)
    if n == 0:
        raise ZeroDivisionError("zero element")
    return (u[0] / n, -u[1] / n)


def qpow(u, k, D):
    if k < 0:
        return qpow(inv(u, D), -k, D)
    r = elt(1)
    while k:
        if k & 1:
            r = mul(r, u, D)
        k >>= 1
        if k:
            u = mul(u, u, D)
    return r


def sign(u, D) -> int:
    """Sign of sigma_1(u) = x + y sqrt(D), decided exactly."""
    x, y = u
    if x >= 0 and y >= 0:
        return 0 if x == 0 and y == 0 else 1
    if x <= 0 and y <= 0:
        return -1
    # opposite signs: compare x^2 with y^2 D
    if x * x > y * y * D:
        return 1 if x > 0 else -1
    return 1 if y > 0 else -1


def signs(u, D) -> tuple[int, int]:
    return sign(u, D), sign(conj(u), D)


def is_totally_positive(u, D) -> bool:
    return signs(u, D) == (1, 1)


def embed(u, D) -> tuple[float, float]:
    r = D ** 0.5
    return float(u[0] + 0) + float(u[1]) * r, float(u[0]) - float(u[1]) * r


# -- continued fractions and units -------------------------------------------

def _floor_quad(P: int, Q: int, s: int) -> int:
    # floor((P + sqrt D)/Q) for Q > 0 or Q < 0, s = isqrt(D), D non-square
    if Q > 0:
        return (P + s) // Q
    return (P + s + 1) // Q


def continued_fraction(D: int) -> tuple[int, list[int]]:
    """Partial quotients of (sigma + sqrt D)/2, sigma = D mod 2: (a0, period)."""
    s = isqrt(D)
    P, Q = D % 2, 2
    a0 = _floor_quad(P, Q, s)
    P = a0 * Q - P
    Q = (D - P * P) // Q
    seen = {}
    quotients = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(quotients)
        a = _floor_quad(P, Q, s)
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    if start != 0:
        raise ArithmeticError("first complete quotient not purely periodic")
    return a0, quotients


def fundamental_unit(D: int) -> QElt:
    """Fundamental unit eps > 1 of the maximal order of Q(sqrt D)."""
    s = isqrt(D)
    P, Q = D % 2, 2
    a0 = _floor_quad(P, Q, s)
    P = a0 * Q - P
    Q = (D - P * P) // Q
    P0, Q0 = P, Q
    eps = elt(1)
    while True:
        eps = mul(eps, (Fraction(P, Q), Fraction(1, Q)), D)
        a = _floor_quad(P, Q, s)
        P = a * Q - P
        Q = (D - P * P) // Q
        if (P, Q) == (P0, Q0):
            break
    if sign(sub(eps, elt(1)), D) < 0:
        eps = inv(eps, D)
    return eps


# -- ideals ------------------------------------------------------------------

def _hnf(vectors: list[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF (a, b, c) of the rank-2 lattice spanned by integer vectors (u, v).

    The lattice is Z(a, 0) + Z(b, c) with a, c > 0 and 0 <= b < a.
    """
    vecs = [list(v) for v in vectors if v != (0, 0)]
    # second coordinate gcd by repeated reduction
    while sum(1 for v in vecs if v[1] != 0) > 1:
        nz = sorted((v for v in vecs if v[1] != 0), key=lambda v: abs(v[1]))
        piv = nz[0]
        for v in nz[1:]:
            q = v[1] // piv[1]
            v[0] -= q * piv[0]
            v[1] -= q * piv[1]
        vecs = [v for v in vecs if v != [0, 0]]
    piv = next(v for v in vecs if v[1] != 0)
    if piv[1] < 0:
        piv = [-piv[0], -piv[1]]
    a = 0
    for v in vecs:
        if v[1] == 0:
            a = gcd(a, v[0])
    if a == 0:
        raise ValueError("vectors do not span a lattice of rank 2")
    return a, piv[0] % a, piv[1]


@dataclass(frozen=True)
class Ideal:
    """Fractional ideal (1/den) * (a Z + (b + c w) Z), w = (D + sqrt D)/2."""

    D: int
    den: int
    a: int
    b: int
    c: int

    @staticmethod
    def _to_w(u, D) -> tuple[Fraction, Fraction]:
        # x + y sqrt D = X + Y w with Y = 2y, X = x - y D
        return u[0] - u[1] * D, 2 * u[1]

    @staticmethod
    def _from_w(X, Y, D) -> QElt:
        return (Fraction(X) + Fraction(Y) * D / 2, Fraction(Y) / 2)

    @classmethod
    def from_generators(cls, D: int, gens) -> "Ideal":
        """The Z-module spanned by the O-multiples of the given elements."""
        w = (Fraction(D, 2), Fraction(1, 2))
        zgens = []
        for g in gens:
            zgens.append(g)
            zgens.append(mul(g, w, D))
        return cls.from_zbasis(D, zgens)

    @classmethod
    def from_zbasis(cls, D: int, zgens) -> "Ideal":
        coords = [cls._to_w(g, D) for g in zgens]
        den = 1
        for X, Y in coords:
            den = den * X.denominator // gcd(den, X.denominator)
            den = den * Y.denominator // gcd(den, Y.denominator)
        ints = [(int(X * den), int(Y * den)) for X, Y in coords]
        a, b, c = _hnf(ints)
        g = gcd(gcd(a, b), gcd(c, den))
        return cls(D, den // g, a // g, b // g, c // g)

    @classmethod
    def unit(cls, D: int) -> "Ideal":
        return cls(D, 1, 1, 0, 1)

    @property
    def basis(self) -> tuple[QElt, QElt]:
        """Z-basis (omega_1, omega_2) with det(sigma_i(omega_j)) > 0."""
        w1 = (Fraction(self.a, self.den), Fraction(0))
        w2 = self._from_w(Fraction(self.b, self.den), Fraction(self.c, self.den), self.D)
        return (w2, w1)

    @cached_property
    def norm(self) -> Fraction:
        return Fraction(self.a * self.c, self.den * self.den)

    def __mul__(self, other: "Ideal") -> "Ideal":
        D = self.D
        gens = [mul(u, v, D) for u in self.basis for v in other.basis]
        return Ideal.from_zbasis(D, gens)

    def scale(self, lam) -> "Ideal":
        return Ideal.from_zbasis(self.D, [mul(lam, u, self.D) for u in self.basis])

    def conjugate(self) -> "Ideal":
        return Ideal.from_zbasis(self.D, [conj(u) for u in self.basis])

    def inverse(self) -> "Ideal":
        n = self.norm
        return Ideal.from_zbasis(self.D, [(u[0] / n, u[1] / n) for u in self.conjugate().basis])

    def contains(self, u) -> bool:
        X, Y = self._to_w(u, self.D)
        X, Y = X * self.den, Y * self.den
        if X.denominator != 1 or Y.denominator != 1:
            return False
        if Y % self.c:
            return False
        k = int(Y) // self.c
        return (int(X) - k * self.b) % self.a == 0

    def is_integral(self) -> bool:
        return self.den == 1

    def coordinates(self, u) -> tuple[Fraction, Fraction]:
        """Coordinates of u in self.basis."""
        return lattice_coords(self.basis, u, self.D)

    def form(self) -> "Form":
        """N(x w1 + y w2)/N(I) for the positively oriented basis."""
        w1, w2 = self.basis
        n = self.norm
        A = norm(w1, self.D) / n
        C = norm(w2, self.D) / n
        B = (norm(add(w1, w2), self.D) - norm(w1, self.D) - norm(w2, self.D)) / n
        return Form(int(A), int(B), int(C))


def det_embed(u, v, D) -> QElt:
    """det [[s1(u), s1(v)], [s2(u), s2(v)]] as an element x + y sqrt D."""
    # s1(u) s2(v) - s1(v) s2(u) = 2 sqrt(D) (u1 v0 - u0 v1)... written exactly
    return (Fraction(0), 2 * (u[1] * v[0] - u[0] * v[1]))


def lattice_coords(basis, u, D) -> tuple[Fraction, Fraction]:
    (p, q), (r, s) = basis
    det = p * s - q * r
    return ((u[0] * s - u[1] * r) / det, (p * u[1] - q * u[0]) / det)


def _bezout(x: int, y: int) -> tuple[int, int, int]:
    """(1, z, w) with x w - y z = 1 for coprime x, y."""
    r0, r1, s0, s1, t0, t1 = x, y, 1, 0, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    # x s0 + y t0 = r0 = +-1
    return 1, -t0 * r0, s0 * r0


# -- binary quadratic forms --------------------------------------------------

@dataclass(frozen=True, order=True)
class Form:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __str__(self):
        return f"[{self.a},{self.b},{self.c}]"

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    @classmethod
    def parse(cls, text: str) -> "Form":
        parts = text.strip().strip("[]()").replace(";", ",").split(",")
        if len(parts) != 3:
            raise ValueError(f"cannot parse form {text!r}")
        return cls(*(int(t) for t in parts))

    def is_reduced(self) -> bool:
        D = self.disc
        s = isqrt(D)
        a = abs(self.a)
        return 0 < self.b <= s and self.b + 2 * a >= s + 1 and 2 * a - self.b <= s

    def rho(self) -> "Form":
        D = self.disc
        s = isqrt(D)
        c = self.c
        ac = abs(c)
        m = 2 * ac
        if ac <= s:
            # largest b' <= s with b' = -b mod 2|c|
            b2 = s - ((s + self.b) % m)
        else:
            b2 = (-self.b) % m
            if b2 > ac:
                b2 -= m
        return Form(c, b2, (b2 * b2 - D) // (4 * c))

    def reduce(self) -> "Form":
        f = self
        for _ in range(10 ** 6):
            if f.is_reduced():
                return f
            f = f.rho()
        raise ArithmeticError("reduction did not terminate")

    def cycle(self) -> list["Form"]:
        f = self.reduce()
        out = [f]
        g = f.rho()
        while g != f:
            out.append(g)
            g = g.rho()
        return out

    def ideal(self) -> Ideal:
        """Oriented lattice whose narrow class corresponds to this form."""
        D = self.disc
        a, b = self.a, self.b
        w = (Fraction(-b, 2), Fraction(1, 2))
        base = Ideal.from_zbasis(D, [elt(abs(a)), w])
        if a > 0:
            return base
        return base.scale(elt(0, 1))


def reduced_forms(D: int) -> list[Form]:
    s = isqrt(D)
    out = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4
        n = -ac
        for a in range(1, isqrt(n) + 1):
            if n % a:
                continue
            for A in {a, n // a}:
                for sa in (1, -1):
                    f = Form(sa * A, b, ac // (sa * A))
                    if f.is_reduced():
                        out.append(f)
    return sorted(set(out))


class NarrowClassGroup:
    """Narrow class group Cl^+(D), classes indexed by their reduced cycles."""

    def __init__(self, D: int):
        if not is_fundamental_discriminant(D):
            raise InvalidDiscriminant(f"{D} is not a fundamental discriminant")
        if isqrt(D) ** 2 == D:
            raise InvalidDiscriminant(f"{D} is a square")
        self.D = D
        remaining = set(reduced_forms(D))
        self.cycles: list[list[Form]] = []
        self._index: dict[Form, int] = {}
        # the principal cycle first
        principal = self._principal_form()
        for start in [principal] + sorted(remaining):
            if start not in remaining:
                continue
            cyc = start.cycle()
            for f in cyc:
                remaining.discard(f)
                self._index[f] = len(self.cycles)
            self.cycles.append(cyc)
        self._mult: dict[tuple[int, int], int] = {}

    def _principal_form(self) -> Form:
        return Ideal.unit(self.D).form().reduce()

    def __len__(self):
        return len(self.cycles)

    @property
    def order(self) -> int:
        return len(self.cycles)

    def class_of_form(self, f: Form) -> int:
        if f.disc != self.D:
            raise ValueError(f"form {f} has discriminant {f.disc}, not {self.D}")
        return self._index[f.reduce()]

    def class_of_ideal(self, I: Ideal) -> int:
        return self.class_of_form(I.form())

    def ideal(self, k: int) -> Ideal:
        return self.cycles[k][0].ideal()

    def mul(self, i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in self._mult:
            self._mult[key] = self.class_of_ideal(self.ideal(i) * self.ideal(j))
        return self._mult[key]

    def inverse(self, i: int) -> int:
        return self.class_of_ideal(self.ideal(i).inverse())

    def power(self, i: int, n: int) -> int:
        if n < 0:
            i, n = self.inverse(i), -n
        r = 0
        for _ in range(n):
            r = self.mul(r, i)
        return r

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.mul(x, i)
            k += 1
        return k

    @cached_property
    def R(self) -> int:
        """Class of the principal ideal (sqrt D), i.e. of the opposite orientation."""
        return self.class_of_ideal(Ideal.from_generators(self.D, [elt(0, 1)]))

    def two_torsion(self) -> list[int]:
        return [i for i in range(self.order) if self.mul(i, i) == 0]

    def is_cyclic(self) -> bool:
        return any(self.element_order(i) == self.order for i in range(self.order))

    def generator(self) -> int | None:
        for i in range(self.order):
            if self.element_order(i) == self.order:
                return i
        return None

    def integral_representative(self, i: int, avoid: int = 1, max_norm: int = 10 ** 6) -> Ideal:
        """Integral ideal of smallest norm in class i with norm coprime to avoid."""
        best = None
        f = self.cycles[i][0]
        bound = 1
        while best is None and bound < max_norm:
            bound *= 4
            for x in range(-bound, bound + 1):
                for y in range(0, bound + 1):
                    if gcd(x, y) != 1 or (y == 0 and x != 1):
                        continue
                    n = f(x, y)
                    if n <= 0 or gcd(n, avoid) != 1 or (best is not None and n >= best[0]):
                        continue
                    best = (n, x, y)
        if best is None:
            raise ArithmeticError("no representative found")
        n, x, y = best
        _, z, w = _bezout(x, y)
        # f o [[x, z], [y, w]] with x w - y z = 1
        b = 2 * f.a * x * z + f.b * (x * w + y * z) + 2 * f.c * y * w
        g = Form(n, b, (b * b - self.D) // (4 * n))
        I = g.ideal()
        assert self.class_of_ideal(I) == i
        return I

    def representative_forms(self) -> list[Form]:
        return [c[0] for c in self.cycles]


@dataclass
class QuadraticField:
    D: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.D):
            raise InvalidDiscriminant(f"{self.D} is not a fundamental discriminant")

    @cached_property
    def eps(self) -> QElt:
        return fundamental_unit(self.D)

    @cached_property
    def eps_norm(self) -> int:
        return int(norm(self.eps, self.D))

    @cached_property
    def eps_plus(self) -> QElt:
        """Generator > 1 of the totally positive units."""
        e = self.eps
        return mul(e, e, self.D) if self.eps_norm == -1 else e

    @cached_property
    def class_group(self) -> NarrowClassGroup:
        return NarrowClassGroup(self.D)

    @property
    def ring_of_integers_basis(self) -> tuple[QElt, QElt]:
        return elt(1), (Fraction(self.D, 2), Fraction(1, 2))
