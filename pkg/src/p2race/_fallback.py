"""Pure Python / numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``;
``p2race._backend`` picks one at import.  Outputs must agree bit for bit.
"""

import math

import numpy as np

from .arith import is_probable_prime

NAME = "python"


def sieve_segment(lo, hi, base):
    """Primes in [lo, hi); ``base`` holds every prime <= isqrt(hi - 1)."""
    lo, hi = int(lo), int(hi)
    out = [np.array([2], dtype=np.uint64)] if lo <= 2 < hi else []
    first = max(lo, 3) | 1
    if first < hi:
        n_odd = (hi - first + 1) // 2
        mask = np.ones(n_odd, dtype=bool)
        for p in base.tolist():
            if p == 2:
                continue
            sq = p * p
            if sq >= hi:
                break
            start = max(sq, (first + p - 1) // p * p)
            if not start & 1:
                start += p
            if start < hi:
                mask[(start - first) // 2 :: p] = False
        if first == 1:
            mask[0] = False
        out.append(first + 2 * np.flatnonzero(mask).astype(np.uint64))
    if not out:
        return np.empty(0, dtype=np.uint64)
    return np.concatenate(out).astype(np.uint64, copy=False)


def residues(limbs, primes):
    """|d| mod p for every p, with |d| given as big-endian base-2**32 limbs."""
    p = primes.astype(np.uint64)
    r = np.zeros_like(p)
    for limb in limbs.tolist():
        r = ((r << np.uint64(32)) | np.uint64(limb)) % p
    return r


def jacobi_odd(a, n):
    """Jacobi symbols (a_i / n_i) for odd n_i >= 1."""
    a = a.astype(np.uint64) % n.astype(np.uint64)
    n = n.astype(np.uint64).copy()
    t = np.ones(a.shape, dtype=np.int8)
    idx = np.flatnonzero(a)
    one, three, five, seven = (np.uint64(v) for v in (1, 3, 5, 7))
    while idx.size:
        av, nv, tv = a[idx], n[idx], t[idx]
        even = (av & one) == 0
        while even.any():
            av[even] >>= one
            r = nv[even] & seven
            tv[even] *= np.where((r == three) | (r == five), -1, 1).astype(np.int8)
            even = (av & one) == 0
        flip = ((av & three) == three) & ((nv & three) == three)
        tv[flip] *= -1
        av, nv = nv % av, av
        a[idx], n[idx], t[idx] = av, nv, tv
        idx = idx[av != 0]
    return np.where(n == 1, t, 0).astype(np.int8)


def pair_counts(signs, primes, pplus, pminus, x, i0, i1):
    """Strict (a < b) sign-pair counts and diagonal counts for a-indices [i0, i1).

    Returns (s_pp, s_pm, s_mp, s_mm, diag_p, diag_m); the caller guarantees
    primes[i]**2 <= x for i < i1 and that the table reaches x // primes[i0].
    """
    if i1 <= i0:
        return (0, 0, 0, 0, 0, 0)
    idx = np.arange(i0, i1)
    a = primes[i0:i1]
    j = np.searchsorted(primes, np.uint64(x) // a, side="right") - 1
    plus_b = pplus[j] - pplus[idx]
    minus_b = pminus[j] - pminus[idx]
    sa = signs[i0:i1]
    pos, neg = sa == 1, sa == -1
    return (
        int(plus_b[pos].sum()),
        int(minus_b[pos].sum()),
        int(plus_b[neg].sum()),
        int(minus_b[neg].sum()),
        int(pos.sum()),
        int(neg.sum()),
    )


def neumaier_window(terms, start):
    """Compensated total of ``terms`` plus min/max of partial sums from ``start`` on."""
    s = 0.0
    c = 0.0
    lo = math.inf
    hi = -math.inf
    for k, t in enumerate(terms.tolist()):
        u = s + t
        if abs(s) >= abs(t):
            c += (s - u) + t
        else:
            c += (t - u) + s
        s = u
        if k >= start:
            v = s + c
            if v < lo:
                lo = v
            if v > hi:
                hi = v
    total = s + c
    if lo > hi:
        lo = hi = total
    return total, lo, hi


def kronecker_small(d, primes):
    """(d/p) over table primes for a machine-size d."""
    p = primes.astype(np.uint64)
    out = np.zeros(p.shape, dtype=np.int8)
    odd = p != 2
    r = (np.int64(d) % p[odd].astype(np.int64)).astype(np.uint64)
    out[odd] = jacobi_odd(r, p[odd])
    if (~odd).any():
        out[~odd] = (0, 1, 0, -1, 0, -1, 0, 1)[int(d) % 8]
    return out


def curly_scan(ds, primes, start):
    """Truncated sum of (d/p)/p over ``primes`` for each d, with window extremes."""
    n = len(ds)
    values = np.empty(n)
    lo = np.empty(n)
    hi = np.empty(n)
    pf = primes.astype(np.float64)
    for i, d in enumerate(ds.tolist()):
        terms = kronecker_small(d, primes).astype(np.float64) / pf
        values[i], lo[i], hi[i] = neumaier_window(terms, start)
    return values, lo, hi


def _sqrt_mod(a, p):
    """Some square root of a modulo odd prime p, or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def use_sieve(bound, n):
    # sieve polynomial values when the sieving primes cost about as much as the range
    return bound <= (1 << 26) and bound <= 32 * n + (1 << 16)


def poly_prime_count(A, x0, x1):
    """Number of x in [x0, x1) with |x*x + x + A| prime; |f| < 2**62 on the range.

    Sieves the polynomial values by the roots of x^2 + x + A mod p.
    """
    A, x0, x1 = int(A), int(x0), int(x1)
    if x1 <= x0:
        return 0
    bound = math.isqrt(max(abs(x0 * x0 + x0 + A), abs((x1 - 1) * x1 + A), abs(A)))
    if not use_sieve(bound, x1 - x0):
        # below 2**64 the primality test is deterministic
        return sum(1 for x in range(x0, x1) if is_probable_prime(abs(x * x + x + A)))
    xs = np.arange(x0, x1, dtype=np.int64)
    f = np.abs(xs * xs + xs + A)
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    small = np.flatnonzero(flags)

    composite = f < 2
    for p in small.tolist():
        if p == 2:
            roots = [0, 1] if A % 2 == 0 else []
        else:
            s = _sqrt_mod(1 - 4 * A, p)
            if s is None:
                continue
            inv2 = (p + 1) // 2
            roots = {(-1 + s) * inv2 % p, (-1 - s) * inv2 % p}
        for r in roots:
            composite[(r - x0) % p :: p] = True
    # values that are themselves sieving primes were marked by their own root
    tiny = np.flatnonzero(f <= bound)
    composite[tiny] = ~flags[f[tiny]]
    return int(np.count_nonzero(~composite))
