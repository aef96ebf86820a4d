# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same signatures and results as ``_fallback``."""

import math

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint32_t, int8_t, uint8_t
from libc.math cimport fabs, INFINITY

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cnp.import_array()

NAME = "cython"


def use_sieve(bound, n):
    # sieve polynomial values when the sieving primes cost about as much as the range
    return bound <= (1 << 26) and bound <= 32 * n + (1 << 16)


def sieve_segment(lo, hi, cnp.ndarray base not None):
    cdef uint64_t ulo = lo, uhi = hi
    cdef uint64_t first, n_odd, nwords, p, sq, start, k, w, bits
    cdef const uint64_t[::1] bv = np.ascontiguousarray(base, dtype=np.uint64)
    cdef Py_ssize_t i, nb = bv.shape[0], count = 0, pos = 0
    cdef uint64_t[::1] words
    cdef uint64_t[::1] res
    has_two = ulo <= 2 < uhi
    first = (ulo if ulo > 3 else 3) | 1
    if first >= uhi:
        return np.array([2], dtype=np.uint64) if has_two else np.empty(0, dtype=np.uint64)
    n_odd = (uhi - first + 1) // 2
    nwords = (n_odd + 63) // 64
    wa = np.full(nwords, 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
    words = wa
    with nogil:
        if n_odd % 64:
            words[nwords - 1] = (<uint64_t>1 << (n_odd % 64)) - 1
        for i in range(nb):
            p = bv[i]
            if p == 2:
                continue
            sq = p * p
            if sq >= uhi:
                break
            start = (first + p - 1) // p * p
            if start < sq:
                start = sq
            if not (start & 1):
                start += p
            k = (start - first) // 2
            while k < n_odd:
                words[k >> 6] &= ~(<uint64_t>1 << (k & 63))
                k += p
        if first == 1:
            words[0] &= ~(<uint64_t>1)
        for i in range(<Py_ssize_t>nwords):
            count += __builtin_popcountll(words[i])
    ra = np.empty(count + (1 if has_two else 0), dtype=np.uint64)
    res = ra
    if has_two:
        res[0] = 2
        pos = 1
    with nogil:
        for i in range(<Py_ssize_t>nwords):
            w = words[i]
            while w:
                bits = __builtin_ctzll(w)
                res[pos] = first + 2 * (<uint64_t>i * 64 + bits)
                pos += 1
                w &= w - 1
    return ra



def residues(cnp.ndarray limbs not None, cnp.ndarray primes not None):
    cdef const uint32_t[::1] lv = np.ascontiguousarray(limbs, dtype=np.uint32)
    cdef const uint64_t[::1] pv = np.ascontiguousarray(primes, dtype=np.uint64)
    out = np.empty(pv.shape[0], dtype=np.uint64)
    cdef uint64_t[::1] ov = out
    cdef Py_ssize_t i, j, nl = lv.shape[0]
    cdef uint64_t r, p
    with nogil:
        for i in range(pv.shape[0]):
            p = pv[i]
            r = 0
            for j in range(nl):
                r = ((r << 32) | lv[j]) % p
            ov[i] = r
    return out


cdef inline int8_t _jacobi(uint64_t a, uint64_t n) noexcept nogil:
    cdef int8_t t = 1
    cdef uint64_t r, tmp
    a %= n
    while a:
        while not (a & 1):
            a >>= 1
            r = n & 7
            if r == 3 or r == 5:
                t = -t
        tmp = a
        a = n
        n = tmp
        if (a & 3) == 3 and (n & 3) == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def jacobi_odd(cnp.ndarray a not None, cnp.ndarray n not None):
    cdef const uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef const uint64_t[::1] nv = np.ascontiguousarray(n, dtype=np.uint64)
    out = np.empty(av.shape[0], dtype=np.int8)
    cdef int8_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(av.shape[0]):
            ov[i] = _jacobi(av[i], nv[i])
    return out


cdef inline Py_ssize_t _last_le(const uint64_t[::1] primes, uint64_t v) noexcept nogil:
    # index of the last prime <= v, or -1
    cdef Py_ssize_t lo = 0, hi = primes.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if primes[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo - 1


def pair_counts(cnp.ndarray signs not None, cnp.ndarray primes not None,
                cnp.ndarray pplus not None, cnp.ndarray pminus not None,
                x, Py_ssize_t i0, Py_ssize_t i1):
    cdef const int8_t[::1] sv = np.ascontiguousarray(signs, dtype=np.int8)
    cdef const uint64_t[::1] pv = np.ascontiguousarray(primes, dtype=np.uint64)
    cdef const int64_t[::1] pp = np.ascontiguousarray(pplus, dtype=np.int64)
    cdef const int64_t[::1] pm = np.ascontiguousarray(pminus, dtype=np.int64)
    cdef uint64_t ux = x
    cdef int64_t s_pp = 0, s_pm = 0, s_mp = 0, s_mm = 0, d_p = 0, d_m = 0
    cdef int64_t nplus, nminus
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(i0, i1):
            j = _last_le(pv, ux // pv[i])
            nplus = pp[j] - pp[i]
            nminus = pm[j] - pm[i]
            if sv[i] == 1:
                s_pp += nplus
                s_pm += nminus
                d_p += 1
            elif sv[i] == -1:
                s_mp += nplus
                s_mm += nminus
                d_m += 1
    return (s_pp, s_pm, s_mp, s_mm, d_p, d_m)


cdef inline void _neumaier_step(double t, double* s, double* c) noexcept nogil:
    cdef double u = s[0] + t
    if fabs(s[0]) >= fabs(t):
        c[0] += (s[0] - u) + t
    else:
        c[0] += (t - u) + s[0]
    s[0] = u


def neumaier_window(cnp.ndarray terms not None, Py_ssize_t start):
    cdef const double[::1] tv = np.ascontiguousarray(terms, dtype=np.float64)
    cdef double s = 0.0, c = 0.0, v, lo = INFINITY, hi = -INFINITY
    cdef Py_ssize_t k
    with nogil:
        for k in range(tv.shape[0]):
            _neumaier_step(tv[k], &s, &c)
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


cdef inline int8_t _kron_small(int64_t d, uint64_t p) noexcept nogil:
    cdef int64_t r
    cdef int m
    if p == 2:
        m = <int>(((d % 8) + 8) % 8)
        if m == 1 or m == 7:
            return 1
        if m == 3 or m == 5:
            return -1
        return 0
    r = d % <int64_t>p
    if r < 0:
        r += <int64_t>p
    return _jacobi(<uint64_t>r, p)


def kronecker_small(d, cnp.ndarray primes not None):
    cdef int64_t dd = d
    cdef const uint64_t[::1] pv = np.ascontiguousarray(primes, dtype=np.uint64)
    out = np.empty(pv.shape[0], dtype=np.int8)
    cdef int8_t[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(pv.shape[0]):
            ov[i] = _kron_small(dd, pv[i])
    return out


def curly_scan(cnp.ndarray ds not None, cnp.ndarray primes not None, Py_ssize_t start):
    cdef const int64_t[::1] dv = np.ascontiguousarray(ds, dtype=np.int64)
    cdef const uint64_t[::1] pv = np.ascontiguousarray(primes, dtype=np.uint64)
    cdef Py_ssize_t n = dv.shape[0], i, k
    values = np.empty(n)
    los = np.empty(n)
    his = np.empty(n)
    cdef double[::1] vv = values, lv = los, hv = his
    cdef double s, c, v, lo, hi, t
    with nogil:
        for i in range(n):
            s = 0.0
            c = 0.0
            lo = INFINITY
            hi = -INFINITY
            for k in range(pv.shape[0]):
                t = <double>_kron_small(dv[i], pv[k]) / <double>pv[k]
                _neumaier_step(t, &s, &c)
                if k >= start:
                    v = s + c
                    if v < lo:
                        lo = v
                    if v > hi:
                        hi = v
            vv[i] = s + c
            if lo > hi:
                lo = s + c
                hi = s + c
            lv[i] = lo
            hv[i] = hi
    return values, los, his


cdef inline uint64_t _mulmod(uint64_t a, uint64_t b, uint64_t m) noexcept nogil:
    return <uint64_t>((<u128>a * b) % m)


cdef inline uint64_t _powmod(uint64_t b, uint64_t e, uint64_t m) noexcept nogil:
    cdef uint64_t r = 1
    b %= m
    while e:
        if e & 1:
            r = _mulmod(r, b, m)
        b = _mulmod(b, b, m)
        e >>= 1
    return r


cdef uint64_t[12] _BASES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
cdef uint64_t[11] _SMALL = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]


cdef bint _is_prime_u64(uint64_t n) noexcept nogil:
    cdef uint64_t d, x, a
    cdef int s, i, r
    cdef bint ok
    if n < 2:
        return False
    for i in range(11):
        if n == _SMALL[i]:
            return True
        if n % _SMALL[i] == 0:
            return False
    if n < 37 * 37:
        return True
    d = n - 1
    s = 0
    while not (d & 1):
        d >>= 1
        s += 1
    for i in range(12):
        a = _BASES[i]
        x = _powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        ok = False
        for r in range(s - 1):
            x = _mulmod(x, x, n)
            if x == n - 1:
                ok = True
                break
        if not ok:
            return False
    return True


cdef int64_t _sqrt_mod(int64_t a, int64_t p) noexcept nogil:
    # Tonelli-Shanks; -1 when a is a non-residue.  p < 2**32
    cdef uint64_t q, z, c, t, r, b, t2, up = p
    cdef int m, i, s
    a %= p
    if a < 0:
        a += p
    if a == 0:
        return 0
    if _powmod(a, (up - 1) // 2, up) != 1:
        return -1
    if p % 4 == 3:
        return <int64_t>_powmod(a, (up + 1) // 4, up)
    q = up - 1
    s = 0
    while not (q & 1):
        q >>= 1
        s += 1
    z = 2
    while _powmod(z, (up - 1) // 2, up) != up - 1:
        z += 1
    m = s
    c = _powmod(z, q, up)
    t = _powmod(a, q, up)
    r = _powmod(a, (q + 1) // 2, up)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = _mulmod(t2, t2, up)
            i += 1
        b = _powmod(c, (<uint64_t>1) << (m - i - 1), up)
        m = i
        c = _mulmod(b, b, up)
        t = _mulmod(t, c, up)
        r = _mulmod(r, b, up)
    return <int64_t>r


def poly_prime_count(A, x0, x1):
    """Number of x in [x0, x1) with |x*x + x + A| prime; |f| < 2**62 on the range."""
    cdef int64_t a = A
    cdef int64_t lo = x0, hi = x1, x, f, p, r, s, inv2, n, j
    cdef int k
    cdef uint64_t count = 0
    if hi <= lo:
        return 0
    n = hi - lo
    bound = math.isqrt(max(abs(x0 * x0 + x0 + A), abs((x1 - 1) * x1 + A), abs(A)))
    if not use_sieve(bound, n):
        with nogil:
            x = lo
            while x < hi:
                f = x * x + x + a
                if f < 0:
                    f = -f
                if _is_prime_u64(<uint64_t>f):
                    count += 1
                x += 1
        return count

    flags_arr = np.ones(bound + 1, dtype=np.uint8)
    flags_arr[:2] = 0
    for q in range(2, math.isqrt(bound) + 1):
        if flags_arr[q]:
            flags_arr[q * q :: q] = 0
    small_arr = np.flatnonzero(flags_arr).astype(np.int64)
    comp_arr = np.zeros(n, dtype=np.uint8)
    cdef const uint8_t[::1] flags = flags_arr
    cdef const int64_t[::1] small = small_arr
    cdef uint8_t[::1] comp = comp_arr
    cdef Py_ssize_t ip, np_ = small.shape[0]
    cdef int64_t cbound = bound
    with nogil:
        for ip in range(np_):
            p = small[ip]
            if p == 2:
                if a % 2 == 0:
                    j = 0
                    while j < n:
                        comp[j] = 1
                        j += 1
                continue
            s = _sqrt_mod((1 - 4 * (a % p)) % p, p)
            if s < 0:
                continue
            inv2 = (p + 1) // 2
            for k in range(2):
                if k == 1:
                    if s == 0:
                        break
                    s = p - s
                r = ((s + p - 1) * inv2) % p
                j = (r - lo % p) % p
                if j < 0:
                    j += p
                while j < n:
                    comp[j] = 1
                    j += p
        for j in range(n):
            x = lo + j
            f = x * x + x + a
            if f < 0:
                f = -f
            if f <= cbound:
                # values that are sieving primes were struck by their own root
                comp[j] = 0 if flags[f] else 1
            if not comp[j]:
                count += 1
    return count
