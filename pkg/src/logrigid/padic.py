"""
p-adic numbers at finite precision, in Q_p and in the unramified quadratic
extension Q_p(sqrt D) for an odd prime p inert in Q(sqrt D).

Elements are stored as ``p^val * unit`` with ``unit`` a residue modulo
``p^(prec - val)``; ``prec`` is the absolute precision, so the element is
known modulo ``p^prec``.  Zero carries no valuation (``val is None``) and
only its absolute precision.

Precision is tracked pessimistically: no operation reports more digits than
its inputs justify.  For p odd, ``log`` and ``exp`` lose no digits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

# cap used when an exact rational is converted without an explicit precision
DEFAULT_PREC = 20


class PrecisionError(ArithmeticError):
    pass


class RamifiedPrimeError(ValueError):
    pass


class SplitPrimeError(ValueError):
    pass


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for n > 0."""
    if n <= 0:
        raise ValueError("n must be positive")
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def inert_check(disc: int, p: int) -> bool:
    """True iff the odd prime p is inert in Q(sqrt disc).

    Raises RamifiedPrimeError when p divides disc.
    """
    if p == 2 or p < 2:
        raise ValueError("p must be an odd prime")
    if disc % p == 0:
        raise RamifiedPrimeError(f"{p} ramifies in Q(sqrt {disc})")
    return kronecker(disc, p) == -1


def require_inert(disc: int, p: int) -> None:
    """Raise RamifiedPrimeError or SplitPrimeError unless p is inert."""
    if not inert_check(disc, p):
        raise SplitPrimeError(f"{p} splits in Q(sqrt {disc})")


def _split_val(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class PAdic:
    p: int
    val: int | None
    unit: int
    prec: int

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, p: int, prec: int) -> "PAdic":
        return cls(p, None, 0, prec)

    @classmethod
    def from_rational(cls, p: int, x, prec: int = DEFAULT_PREC) -> "PAdic":
        """Image of the rational x, known modulo p^prec."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        vn, n = _split_val(x.numerator, p)
        vd, d = _split_val(x.denominator, p)
        v = vn - vd
        if v >= prec:
            return cls.zero(p, prec)
        m = p ** (prec - v)
        return cls(p, v, n * pow(d, -1, m) % m, prec)

    @classmethod
    def from_int(cls, p: int, n: int, prec: int = DEFAULT_PREC) -> "PAdic":
        return cls.from_rational(p, n, prec)

    @classmethod
    def _normalise(cls, p: int, v: int, n: int, prec: int) -> "PAdic":
        # n is an integer representing p^v * n modulo p^prec
        m = p ** (prec - v)
        n %= m
        if n == 0:
            return cls.zero(p, prec)
        w, u = _split_val(n, p)
        return cls(p, v + w, u % p ** (prec - v - w), prec)

    # -- queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.val is None

    @property
    def rel_prec(self) -> int:
        return 0 if self.val is None else self.prec - self.val

    def residue(self, n: int | None = None) -> Fraction:
        """Exact rational p^val * unit (the stored representative)."""
        if self.val is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def to_int_mod(self, k: int) -> int:
        """Integer representative modulo p^k; requires val >= 0 and k <= prec."""
        if k > self.prec:
            raise PrecisionError(f"only {self.prec} digits known")
        if self.val is None:
            return 0
        if self.val < 0:
            raise ValueError("element is not integral")
        return self.unit * self.p ** self.val % self.p ** k

    def lift(self, k: int | None = None) -> int:
        return self.to_int_mod(self.prec if k is None else k)

    def _check(self, other):
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise ValueError("different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PAdic.from_rational(self.p, other, self.prec + _rational_val_slack(other, self.p))
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------
    def __neg__(self):
        if self.val is None:
            return self
        return PAdic(self.p, self.val, (-self.unit) % self.p ** (self.prec - self.val), self.prec)

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec, other.prec)
        if self.val is None:
            return other.with_prec(prec)
        if other.val is None:
            return self.with_prec(prec)
        v = min(self.val, other.val)
        if v >= prec:
            return PAdic.zero(self.p, prec)
        p = self.p
        n = self.unit * p ** (self.val - v) + other.unit * p ** (other.val - v)
        return PAdic._normalise(p, v, n, prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.val is None and other.val is None:
            return PAdic.zero(p, self.prec + other.prec)
        if self.val is None:
            return PAdic.zero(p, self.prec + other.val)
        if other.val is None:
            return PAdic.zero(p, other.prec + self.val)
        v = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        m = p ** (prec - v)
        return PAdic(p, v, self.unit * other.unit % m, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PAdic":
        if self.val is None:
            raise ZeroDivisionError("p-adic zero")
        rel = self.prec - self.val
        m = self.p ** rel
        return PAdic(self.p, -self.val, pow(self.unit, -1, m), rel - self.val)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PAdic(self.p, 0, 1, max(self.rel_prec, 1))
        base = self
        result = None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def with_prec(self, prec: int) -> "PAdic":
        """Reduce to absolute precision prec (never increases precision)."""
        if prec > self.prec:
            prec = self.prec
        if self.val is None:
            return PAdic.zero(self.p, prec)
        if self.val >= prec:
            return PAdic.zero(self.p, prec)
        return PAdic(self.p, self.val, self.unit % self.p ** (prec - self.val), prec)

    def equals(self, other, prec: int | None = None) -> bool:
        """Equality modulo p^prec (default: the common known precision)."""
        other = self._check(other)
        k = min(self.prec, other.prec) if prec is None else prec
        if k > min(self.prec, other.prec):
            raise PrecisionError("comparison beyond known precision")
        return (self - other).with_prec(k).is_zero()

    def __eq__(self, other):
        if not isinstance(other, (PAdic, int, Fraction)):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    # -- analytic functions ------------------------------------------------
    def log(self) -> "PAdic":
        return iwasawa_log(self)

    def exp(self) -> "PAdic":
        return padic_exp(self)

    def teichmuller(self) -> "PAdic":
        return teichmuller(self)

    def __str__(self):
        return format_padic(self)

    def __repr__(self):
        return f"PAdic({format_padic(self)})"


def _rational_val_slack(x, p) -> int:
    x = Fraction(x)
    if x == 0:
        return 0
    return max(0, valuation(x.numerator, p) - valuation(x.denominator, p))


def _digits(n: int, p: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        n, d = divmod(n, p)
        out.append(d)
    return out


def format_padic(x: PAdic, with_error: bool = True) -> str:
    """Canonical text ``p^v * (d0,d1,...) + O(p^N)``, digits little-endian."""
    tail = f" + O({x.p}^{x.prec})" if with_error else ""
    if x.val is None:
        return f"0{tail}"
    digits = ",".join(str(d) for d in _digits(x.unit, x.p, x.prec - x.val))
    return f"{x.p}^{x.val} * ({digits}){tail}"


# ---------------------------------------------------------------------------
# unramified quadratic extension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Unramified:
    """a + b*sqrt(disc) with a, b in Q_p; p inert in Q(sqrt disc)."""

    a: PAdic
    b: PAdic
    disc: int

    def __post_init__(self):
        if self.a.p != self.b.p:
            raise ValueError("coordinates over different primes")
        if not inert_check(self.disc, self.a.p):
            raise SplitPrimeError(f"{self.a.p} is not inert in Q(sqrt {self.disc})")

    @classmethod
    def from_coords(cls, p: int, disc: int, a, b, prec: int = DEFAULT_PREC) -> "Unramified":
        return cls(PAdic.from_rational(p, a, prec), PAdic.from_rational(p, b, prec), disc)

    @classmethod
    def from_qp(cls, x: PAdic, disc: int) -> "Unramified":
        return cls(x, PAdic.zero(x.p, x.prec), disc)

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def prec(self) -> int:
        return min(self.a.prec, self.b.prec)

    @property
    def val(self) -> int | None:
        vals = [v for v in (self.a.val, self.b.val) if v is not None]
        return min(vals) if vals else None

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def is_rational(self) -> bool:
        """Frobenius-fixed at the known precision."""
        return self.b.with_prec(self.prec).is_zero()

    def _lift(self, other):
        if isinstance(other, Unramified):
            if other.disc != self.disc:
                raise ValueError("different extensions")
            return other
        if isinstance(other, PAdic):
            return Unramified.from_qp(other, self.disc)
        if isinstance(other, (int, Fraction)):
            return Unramified.from_qp(PAdic.from_rational(self.p, other, self.prec), self.disc)
        return NotImplemented

    def __neg__(self):
        return Unramified(-self.a, -self.b, self.disc)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Unramified(self.a + other.a, self.b + other.b, self.disc)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Unramified(self.a - other.a, self.b - other.b, self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        return Unramified(a * c + b * d * self.disc, a * d + b * c, self.disc)

    __rmul__ = __mul__

    def conjugate(self) -> "Unramified":
        return conjugate(self)

    def trace(self) -> PAdic:
        return self.a + self.a

    def norm(self) -> PAdic:
        return self.a * self.a - self.b * self.b * self.disc

    def inverse(self) -> "Unramified":
        n = self.norm()
        if n.is_zero():
            raise ZeroDivisionError("p-adic zero")
        ninv = n.inverse()
        return Unramified(self.a * ninv, -self.b * ninv, self.disc)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Unramified.from_qp(PAdic(self.p, 0, 1, self.prec - 2 * min(self.val or 0, 0)), self.disc)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def with_prec(self, prec: int) -> "Unramified":
        return Unramified(self.a.with_prec(prec), self.b.with_prec(prec), self.disc)

    def equals(self, other, prec: int | None = None) -> bool:
        other = self._lift(other)
        return self.a.equals(other.a, prec) and self.b.equals(other.b, prec)

    def __eq__(self, other):
        if not isinstance(other, (Unramified, PAdic, int, Fraction)):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        return hash((self.a, self.b, self.disc))

    def log(self) -> "Unramified":
        return iwasawa_log(self)

    def exp(self) -> "Unramified":
        return padic_exp(self)

    def teichmuller(self) -> "Unramified":
        return teichmuller(self)

    def __str__(self):
        return format_unramified(self)

    def __repr__(self):
        return f"Unramified({format_unramified(self)})"


def format_unramified(z: Unramified) -> str:
    """Canonical text ``x + y*sqrtD + O(p^N)``."""
    return (f"{format_padic(z.a.with_prec(z.prec), False)} + "
            f"{format_padic(z.b.with_prec(z.prec), False)}*sqrt{z.disc} + O({z.p}^{z.prec})")


def conjugate(z: Unramified) -> Unramified:
    """Frobenius a + b sqrt(D) -> a - b sqrt(D)."""
    return Unramified(z.a, -z.b, z.disc)


# ---------------------------------------------------------------------------
# integer kernels: elements of Z_p[sqrt D] / p^k as integer pairs
# ---------------------------------------------------------------------------

def _qmul(x, y, disc, m):
    return ((x[0] * y[0] + x[1] * y[1] * disc) % m, (x[0] * y[1] + x[1] * y[0]) % m)


def _qpow(x, n, disc, m):
    r = (1 % m, 0)
    while n:
        if n & 1:
            r = _qmul(r, x, disc, m)
        n >>= 1
        if n:
            x = _qmul(x, x, disc, m)
    return r


def _log_one_plus(z, disc, p, k):
    """log(1 + z) mod p^k for z = (z0, z1) integral with z = 0 mod p."""
    # terms z^n / n: valuation >= n - v_p(n); extra working digits absorb the 1/n
    extra = 1
    while p ** extra <= 2 * k + 2:
        extra += 1
    m = p ** (k + extra)
    total = (0, 0)
    power = (1, 0)
    n = 0
    while True:
        n += 1
        power = _qmul(power, z, disc, m)
        if n - valuation(n, p) >= k + 1 and n > k + extra:
            break
        vn = valuation(n, p)
        inv = pow(n // p ** vn, -1, m)
        t0 = power[0] * inv % m
        t1 = power[1] * inv % m
        # exact division by p^vn: power = z^n is divisible by p^n >= p^vn
        t0 //= p ** vn
        t1 //= p ** vn
        if n % 2 == 0:
            t0, t1 = -t0, -t1
        total = (total[0] + t0, total[1] + t1)
    mk = p ** k
    return (total[0] % mk, total[1] % mk)


def _exp_int(z, disc, p, k):
    """exp(z) mod p^k for z = (z0, z1) with z = 0 mod p (p odd)."""
    # v(z^n/n!) >= n - (n-1)/(p-1); keep enough working digits for n!
    extra = 1
    while p ** extra <= 2 * k + 2:
        extra += 1
    nmax = 1
    while nmax - (nmax - 1) // (p - 1) < k + 1:
        nmax += 1
    fact_v = sum(nmax // p ** i for i in range(1, 64) if p ** i <= nmax)
    m = p ** (k + fact_v + extra)
    total = (1, 0)
    power = (1, 0)
    fact = 1
    for n in range(1, nmax + 1):
        power = _qmul(power, z, disc, m)
        fact *= n
        vf, uf = _split_val(fact, p)
        inv = pow(uf, -1, m)
        t0 = power[0] * inv % m // p ** vf
        t1 = power[1] * inv % m // p ** vf
        total = (total[0] + t0, total[1] + t1)
    mk = p ** k
    return (total[0] % mk, total[1] % mk)


def _unit_coords(z: Unramified):
    """(v, (A, B), k): z = p^v (A + B sqrt D), A + B sqrt D a unit known mod p^k."""
    v = z.val
    if v is None:
        raise ZeroDivisionError("p-adic zero")
    k = z.prec - v
    p = z.p

    def coord(x: PAdic):
        if x.val is None:
            return 0
        return x.unit * p ** (x.val - v) % p ** k

    return v, (coord(z.a), coord(z.b)), k


def _log_unit_coords(A: int, B: int, disc: int, p: int, k: int, degree: int):
    m = p ** (k + 1)
    e = p ** degree - 1
    w = _qpow((A % m, B % m), e, disc, m)
    z = ((w[0] - 1) % m, w[1] % m)
    l0, l1 = _log_one_plus(z, disc, p, k + 1)
    inv = pow(e, -1, p ** k)
    return (l0 * inv % p ** k, l1 * inv % p ** k)


def iwasawa_log(x):
    """Iwasawa logarithm (log_p(p) = 0, kills roots of unity)."""
    if isinstance(x, PAdic):
        if x.val is None:
            raise ZeroDivisionError("log of p-adic zero")
        k = x.prec - x.val
        l0, _ = _log_unit_coords(x.unit, 0, 1, x.p, k, 1)
        return PAdic._normalise(x.p, 0, l0, k)
    if isinstance(x, Unramified):
        v, (A, B), k = _unit_coords(x)
        l0, l1 = _log_unit_coords(A, B, x.disc, x.p, k, 2)
        return Unramified(PAdic._normalise(x.p, 0, l0, k), PAdic._normalise(x.p, 0, l1, k), x.disc)
    raise TypeError(type(x))


def padic_exp(x):
    """p-adic exponential on the disc v(x) >= 1."""
    if isinstance(x, PAdic):
        if x.val is not None and x.val < 1:
            raise ValueError("exp_p needs valuation >= 1")
        k = x.prec
        if k <= 0:
            raise PrecisionError("no digits")
        z0 = x.to_int_mod(k)
        e0, _ = _exp_int((z0, 0), 1, x.p, k)
        return PAdic._normalise(x.p, 0, e0, k)
    if isinstance(x, Unramified):
        v = x.val
        if v is not None and v < 1:
            raise ValueError("exp_p needs valuation >= 1")
        k = x.prec
        z = (x.a.to_int_mod(k), x.b.to_int_mod(k))
        e0, e1 = _exp_int(z, x.disc, x.p, k)
        return Unramified(PAdic._normalise(x.p, 0, e0, k), PAdic._normalise(x.p, 0, e1, k), x.disc)
    raise TypeError(type(x))


def teichmuller(x):
    """Root of unity of order dividing p^d - 1 congruent to the unit part of x."""
    if isinstance(x, PAdic):
        if x.val is None:
            raise ZeroDivisionError("Teichmuller lift of zero")
        k = x.prec - x.val
        m = x.p ** k
        t = x.unit % m
        for _ in range(k):
            t = pow(t, x.p, m)
        return PAdic(x.p, 0, t, k)
    if isinstance(x, Unramified):
        v, (A, B), k = _unit_coords(x)
        m = x.p ** k
        t = (A, B)
        for _ in range(k):
            t = _qpow(t, x.p * x.p, x.disc, m)
        return Unramified(PAdic._normalise(x.p, 0, t[0], k), PAdic._normalise(x.p, 0, t[1], k), x.disc)
    raise TypeError(type(x))


def unit_part(x):
    """<x> = x / (p^v * teichmuller(x)), a principal unit."""
    if isinstance(x, PAdic):
        u = PAdic(x.p, 0, x.unit, x.prec - x.val)
        return u / teichmuller(x)
    v, (A, B), k = _unit_coords(x)
    u = Unramified(PAdic._normalise(x.p, 0, A, k), PAdic._normalise(x.p, 0, B, k), x.disc)
    return u / teichmuller(x)


def roots_of_unity(p: int, disc: int, prec: int) -> list[Unramified]:
    """The p^2 - 1 Teichmuller representatives of F_p^x, as elements of F_p."""
    out = []
    for a in range(p):
        for b in range(p):
            if a == 0 and b == 0:
                continue
            out.append(teichmuller(Unramified.from_coords(p, disc, a, b, prec)))
    return out


# ---------------------------------------------------------------------------
# rational reconstruction
# ---------------------------------------------------------------------------

def rational_reconstruct(residue: int, modulus: int, bound: int | None = None) -> Fraction | None:
    """The rational n/d with |n|, d <= bound and n = d * residue mod modulus.

    Default bound is the largest B with 2 B^2 <= modulus.  Returns None when no
    such rational exists.
    """
    if bound is None:
        bound = isqrt(modulus // 2)
    residue %= modulus
    if residue == 0:
        return Fraction(0)
    r0, r1 = modulus, residue
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    num, den = (r1, s1) if s1 > 0 else (-r1, -s1)
    if gcd(den, modulus) != 1 or (num - den * residue) % modulus:
        return None
    return Fraction(num, den)


def symmetric_residue(n: int, m: int) -> int:
    n %= m
    return n - m if n > m // 2 else n
