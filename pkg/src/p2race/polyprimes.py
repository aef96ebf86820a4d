"""Prime values of x^2 + x + A against the Hardy-Littlewood prediction."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .arith import is_probable_prime
from .charsum import LEstimate, _signs_chunk, window_start
from .errors import SingularRangeError, UndefinedRatioError
from .sieve import PrimeTable

__all__ = [
    "PolySpec",
    "FReport",
    "discriminant_of_poly",
    "prime_value_count",
    "li_poly",
    "hl_constant",
    "conjecture_f_report",
    "EXACT_LIMIT",
]

# largest |f| the word-size kernels handle exactly
EXACT_LIMIT = 2**62


def discriminant_of_poly(A: int) -> int:
    return 1 - 4 * int(A)


@dataclass(frozen=True)
class PolySpec:
    A: int
    delta: int

    def __post_init__(self):
        if self.delta != 1 - 4 * self.A:
            raise ValueError("delta must equal 1 - 4A")

    @classmethod
    def from_A(cls, A: int) -> PolySpec:
        A = int(A)
        return cls(A, discriminant_of_poly(A))

    def __call__(self, x: int) -> int:
        return x * x + x + self.A

    def max_abs(self, n: int) -> int:
        # f is increasing on x >= 0, so |f| peaks at an endpoint
        return max(abs(self.A), abs(self(n)))


def _count_probable(A: int, x0: int, x1: int, rounds: int) -> int:
    count = 0
    for x in range(x0, x1):
        if is_probable_prime(abs(x * x + x + A), rounds):
            count += 1
    return count


def prime_value_count(
    spec: PolySpec,
    n: int,
    primality_rounds: int = 32,
    threads: int = 1,
    method: str = "auto",
) -> int:
    """Number of x in [0, n] with |x^2 + x + A| prime.

    ``method="exact"`` uses the word-size kernels (needs |f| < 2**62 on the
    range); ``"probable"`` tests each value with :func:`is_probable_prime`;
    ``"auto"`` takes the exact route whenever it applies.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    fits = spec.max_abs(n) < EXACT_LIMIT
    if method == "auto":
        method = "exact" if fits else "probable"
    if method == "exact" and not fits:
        raise ValueError("polynomial values exceed the exact word-size range")
    if method not in ("exact", "probable"):
        raise ValueError(f"unknown method {method!r}")

    edges = np.linspace(0, n + 1, max(1, threads) * 4 + 1).astype(int) if threads > 1 else [0, n + 1]
    spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    if method == "exact":
        def work(span):
            return kernels.poly_prime_count(spec.A, span[0], span[1])
    else:
        def work(span):
            return _count_probable(spec.A, span[0], span[1], primality_rounds)

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(work, spans))
    return sum(work(s) for s in spans)


def _singular_interval(A: int, n: int):
    """Sub-interval of [0, n] where |f| <= e, or None."""
    e = math.e
    f0, fn = A, n * n + n + A
    if f0 > e or fn < -e:
        return None

    def root(c):
        return (-1.0 + math.sqrt(1.0 - 4.0 * (A - c))) / 2.0

    lo = 0.0 if f0 >= -e else root(-e)
    hi = float(n) if fn <= e else root(e)
    return lo, hi


def _adaptive_simpson(g, a: float, b: float, rel_tol: float, panels: int = 64) -> float:
    edges = np.linspace(a, b, panels + 1)
    total_guess = 0.0
    stack = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = g(lo), g(mid), g(hi)
        whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        total_guess += whole
        stack.append((lo, hi, flo, fmid, fhi, whole, 0))
    tol_density = rel_tol * abs(total_guess) / (b - a)

    parts = []
    while stack:
        lo, hi, flo, fmid, fhi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = g(lm), g(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol_density * (hi - lo) or depth >= 50:
            parts.append(left + right + delta / 15.0)
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return math.fsum(parts)


def li_poly(spec: PolySpec, n: int, rel_tol: float = 1e-8) -> float:
    """2 * integral_0^n dx / log|x^2 + x + A| by adaptive Simpson."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0
    bad = _singular_interval(spec.A, n)
    if bad is not None:
        raise SingularRangeError(
            f"|x^2 + x + {spec.A}| <= e for x in [{bad[0]:.6g}, {bad[1]:.6g}]; "
            "the integrand 1/log|f| is singular or unbounded there",
            bad,
        )
    A = float(spec.A)

    def g(x):
        return 1.0 / math.log(abs(x * x + x + A))

    return 2.0 * _adaptive_simpson(g, 0.0, float(n), rel_tol)


def hl_constant(delta: int, table: PrimeTable, cutoff: int) -> LEstimate:
    """Truncated product over odd primes p <= cutoff of 1 - (delta/p)/(p - 1)."""
    table.check(cutoff)
    n = table.count_le(cutoff)
    if n == 0:
        return LEstimate(1.0, int(cutoff), 0.0)
    primes = table.primes[:n]
    chi = _signs_chunk(int(delta), primes).astype(np.float64)
    chi[primes == 2] = 0.0  # the product runs over odd primes
    terms = np.log1p(-chi / (primes.astype(np.float64) - 1.0))
    total, lo, hi = kernels.neumaier_window(terms, window_start(table, cutoff))
    value = math.exp(total)
    return LEstimate(value, int(cutoff), max(math.exp(hi) - value, value - math.exp(lo)))


@dataclass(frozen=True)
class FReport:
    P: int
    L: float
    C: LEstimate
    ratio: float


def conjecture_f_report(
    spec: PolySpec,
    n: int,
    table: PrimeTable,
    cutoff: int,
    primality_rounds: int = 32,
    threads: int = 1,
) -> FReport:
    """Observed prime count next to C(delta) * L_A(n), and their ratio."""
    if n <= 0:
        raise UndefinedRatioError("the predicted count is 0 for n = 0; ratio undefined")
    L = li_poly(spec, n)
    C = hl_constant(spec.delta, table, cutoff)
    P = prime_value_count(spec, n, primality_rounds, threads)
    return FReport(P, L, C, P / (C.value * L))
