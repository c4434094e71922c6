"""Compiled inner loops for the level-r sweeps.

All arithmetic is modulo an odd prime power m < 2^56 so that sums of two
residues and products with 7-bit integers stay inside int64.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def mulmod(a, b, m):
    """a*b mod m for 0 <= a, b < m < 2^56."""
    if b < 128:
        return (a * b) % m
    r = 0
    shift = 7
    while (b >> shift) > 0:
        shift += 7
    while shift > 0:
        shift -= 7
        r = (r * 128) % m
        chunk = (b >> shift) & 127
        r = (r + (a * chunk) % m) % m
    return r


@njit(cache=True)
def sweep_cone(acc, q, m, A, B, C, Dl, E, F, m00, m01, m10, m11):
    """acc[M(i, j)] += S(i, j) for i in [1, q], j in [0, q).

    S(i, j) = A i^2 + B i j + C j^2 + Dl i + E j + F mod m, stepped by finite
    differences so the loop body only adds.  M is the cone's coordinate
    matrix reduced mod q; acc is indexed by k1 * q + k2.
    """
    s0 = (A + Dl) % m
    s0 = (s0 + F) % m
    ds0 = (mulmod(3, A, m) + Dl) % m
    dds0 = (2 * A) % m
    dj0 = ((B + C) % m + E) % m
    ddj = (2 * C) % m
    for i in range(1, q + 1):
        s = s0
        dj = dj0
        k1 = (m00 * i) % q
        k2 = (m10 * i) % q
        for _ in range(q):
            idx = k1 * q + k2
            t = acc[idx] + s
            if t >= m:
                t -= m
            acc[idx] = t
            s += dj
            if s >= m:
                s -= m
            dj += ddj
            if dj >= m:
                dj -= m
            k1 += m01
            if k1 >= q:
                k1 -= q
            k2 += m11
            if k2 >= q:
                k2 -= q
        s0 += ds0
        if s0 >= m:
            s0 -= m
        ds0 += dds0
        if ds0 >= m:
            ds0 -= m
        dj0 += B
        if dj0 >= m:
            dj0 -= m


@njit(cache=True)
def mod_sum(arr, m):
    s = 0
    for v in arr:
        s += v
        if s >= m:
            s -= m
    return s


@njit(cache=True)
def smooth_rational(Z, q, p, m, c, c2):
    """lam(x) = Z(c x) - c^2 Z(x) on X_r, zero on pZ^2."""
    out = np.zeros(q * q, dtype=np.int64)
    for x1 in range(q):
        for x2 in range(q):
            if x1 % p == 0 and x2 % p == 0:
                continue
            y = ((c * x1) % q) * q + (c * x2) % q
            v = Z[y] - mulmod(c2, Z[x1 * q + x2], m)
            if v < 0:
                v += m
            out[x1 * q + x2] = v
    return out


@njit(cache=True)
def smooth_sublattice(Z, Zs, q, p, m, ell):
    """nu(x) = l Zs(x) - Z(x) on X_r, zero on pZ^2."""
    out = np.zeros(q * q, dtype=np.int64)
    for x1 in range(q):
        for x2 in range(q):
            if x1 % p == 0 and x2 % p == 0:
                continue
            i = x1 * q + x2
            v = mulmod(ell % m, Zs[i], m) - Z[i]
            if v < 0:
                v += m
            out[i] = v
    return out


@njit(cache=True)
def norm_histogram(lam, q, p, m, fa, fb, fc, c):
    """H[n] = sum of lam(x) over x in X_r with f(c x) = n mod q."""
    H = np.zeros(q, dtype=np.int64)
    for x1 in range(q):
        for x2 in range(q):
            if x1 % p == 0 and x2 % p == 0:
                continue
            y1 = (c * x1) % q
            y2 = (c * x2) % q
            n = (fa * y1 * y1 + fb * y1 * y2 + fc * y2 * y2) % q
            t = H[n] + lam[x1 * q + x2]
            if t >= m:
                t -= m
            H[n] = t
    return H


@njit(cache=True)
def _qmul(a0, a1, b0, b1, D, mod):
    return (a0 * b0 + D * ((a1 * b1) % mod)) % mod, (a0 * b1 + a1 * b0) % mod


@njit(cache=True)
def log_histogram(nu, q, p, pe, t00, t01, t10, t11, D, e, unit):
    """W[u, v] = sum of unit * nu(x)/p^pe over x in X_r with (tau^t x)^e = 1 + p(u + v sqrtD).

    tau^t x has coordinates (t00 x1 + t01 x2, t10 x1 + t11 x2) mod q on the
    basis (1, sqrtD); e = p^2 - 1 sends units to principal units.  Returns
    W mod q and the number of balls whose value was not divisible by p^pe.
    """
    q1 = q // p
    W = np.zeros((q1, q1), dtype=np.int64)
    div = 1
    for _ in range(pe):
        div *= p
    bad = 0
    for x1 in range(q):
        for x2 in range(q):
            if x1 % p == 0 and x2 % p == 0:
                continue
            v = nu[x1 * q + x2]
            if v == 0:
                continue
            if v % div != 0:
                bad += 1
                continue
            v = ((v // div) % q) * unit % q
            a0 = (t00 * x1 + t01 * x2) % q
            a1 = (t10 * x1 + t11 * x2) % q
            r0 = 1
            r1 = 0
            k = e
            while k > 0:
                if k & 1:
                    r0, r1 = _qmul(r0, r1, a0, a1, D, q)
                a0, a1 = _qmul(a0, a1, a0, a1, D, q)
                k >>= 1
            u = ((r0 - 1) % q) // p
            w = r1 // p
            W[u, w] = (W[u, w] + v) % q
    return W, bad


@njit(cache=True)
def log_table(p, r, D, R, inv_units):
    """log(1 + p(u + v sqrtD)) mod p^r for all u, v mod p^(r-1).

    Works modulo p^R with R large enough to absorb the p-parts of the series
    denominators; inv_units[n] is the inverse mod p^R of the prime-to-p part
    of n, and the series runs for n < len(inv_units).
    """
    q1 = 1
    for _ in range(r - 1):
        q1 *= p
    q = q1 * p
    mod = 1
    for _ in range(R):
        mod *= p
    L0 = np.zeros((q1, q1), dtype=np.int64)
    L1 = np.zeros((q1, q1), dtype=np.int64)
    nmax = len(inv_units)
    for u in range(q1):
        for v in range(q1):
            y0 = (p * u) % mod
            y1 = (p * v) % mod
            z0 = y0
            z1 = y1
            s0 = 0
            s1 = 0
            for n in range(1, nmax):
                vn = 0
                nn = n
                while nn % p == 0:
                    nn //= p
                    vn += 1
                d = 1
                for _ in range(vn):
                    d *= p
                t0 = ((z0 // d) * inv_units[n]) % mod
                t1 = ((z1 // d) * inv_units[n]) % mod
                if n % 2 == 1:
                    s0 = (s0 + t0) % mod
                    s1 = (s1 + t1) % mod
                else:
                    s0 = (s0 - t0) % mod
                    s1 = (s1 - t1) % mod
                z0, z1 = _qmul(z0, z1, y0, y1, D, mod)
            L0[u, v] = s0 % q
            L1[u, v] = s1 % q
    return L0, L1


@njit(cache=True)
def pair_sum(W, L, mod):
    s = 0
    n0, n1 = W.shape
    for i in range(n0):
        for j in range(n1):
            s = (s + (W[i, j] % mod) * (L[i, j] % mod)) % mod
    return s
