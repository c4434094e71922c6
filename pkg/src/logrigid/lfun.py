"""
p-adic L-values and the derivative at s = 0 as Riemann sums over a ball table.

The integrand <N(a) N(c tau^t x)>^(-s) is constant on eps_plus-orbits, so the
sums reduce to the norm histogram of the measure: one p-integral weight per
residue n of the norm form mod p^r.  The integrand is evaluated at the
representative n in [0, p^r); any other lift moves it by p^r.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .measure import EisensteinMeasure
from .padic import PAdic, PrecisionError, _log_unit_coords, format_padic, valuation

SLACK = 2  # digits reserved for the normalisation and summation


@dataclass(frozen=True)
class LpResult:
    value: PAdic
    kappa: int
    params: dict = field(default_factory=dict)

    def certified(self) -> PAdic:
        return self.value.with_prec(self.kappa)

    def agrees(self, other, k: int | None = None) -> bool:
        if isinstance(other, LpResult):
            k = min(self.kappa, other.kappa) if k is None else k
            other = other.value
        k = self.kappa if k is None else k
        o = other
        return self.value.equals(o, k)

    def to_dict(self) -> dict:
        return {"value": format_padic(self.certified()),
                "certified_mod": f"{self.value.p}^{self.kappa}", **self.params}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _kappa(m: EisensteinMeasure) -> int:
    return max(m.level - SLACK, 0)


def _params(m: EisensteinMeasure, **extra) -> dict:
    return {"disc": m.disc, "p": m.p, "c": m.c, "smoothing": m.smoothing,
            "class": m.form, "level": m.level, **extra}


def _weights(m: EisensteinMeasure):
    """(n, B[n]) with B[n] reduced mod p^r, skipping empty buckets."""
    H = m.norm_histogram()
    mod = m.q
    for n, b in enumerate(H):
        b = int(b) % mod
        if b and n % m.p:
            yield n, b


def lp_at(m: EisensteinMeasure, s: int) -> LpResult:
    """L_p(1_{[a],p}, s) for s = 1 - k <= 0 as sum <n>^(k-1) B[n]."""
    if s > 0:
        raise ValueError("only s <= 0 is supported")
    p, r, q = m.p, m.level, m.q
    kappa = _kappa(m)
    if s == 0:
        # the Riemann sum is the total mass
        return LpResult(PAdic.zero(p, kappa), kappa, _params(m, s=0))
    e = 1 - s - 1
    total = 0
    for n, b in _weights(m):
        teich = pow(n, p ** (r - 1), q)
        unit = n * pow(teich, -1, q) % q
        total += b * pow(unit, e, q)
    return LpResult(PAdic.from_int(p, total % q, r), kappa, _params(m, s=s))


def lp_derivative0(m: EisensteinMeasure) -> LpResult:
    """L_p'(1_{[a],p}, 0) = -sum log_p<n> B[n]."""
    p, r, q = m.p, m.level, m.q
    total = 0
    for n, b in _weights(m):
        lg, _ = _log_unit_coords(n, 0, 1, p, r, 1)
        total += b * lg
    return LpResult(PAdic.from_int(p, -total % q, r), _kappa(m), _params(m, derivative=1))


def smoothing_factor(c: int, k: int = 1) -> int:
    return 1 - c ** (2 * k)


def desmooth(res: LpResult, c: int, k: int = 1) -> LpResult:
    """Divide out the rational smoothing factor 1 - c^(2k).

    Every digit of p in the factor is charged to the certified precision;
    when nothing would remain the division is refused.
    """
    p = res.value.p
    f = smoothing_factor(c, k)
    if f == 0 or c % p == 0:
        raise PrecisionError(f"smoothing {c} cannot be removed at p = {p}")
    loss = valuation(f, p)
    if loss >= res.kappa and res.kappa > 0:
        raise PrecisionError(f"1 - {c}^{2 * k} eats all {res.kappa} certified digits")
    value = res.value / PAdic.from_int(p, f, res.value.prec)
    return LpResult(value, max(res.kappa - loss, 0), {**res.params, "desmoothed": True})
