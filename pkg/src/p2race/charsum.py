"""Truncated prime sums attached to a quadratic character.

Every estimator returns an :class:`LEstimate`: the partial sum at the cutoff
together with how much the partial sums still moved over the last octave of
primes.  Nothing here claims a rigorous tail bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .arith import CharacterSpec, kronecker
from .errors import OutOfRangeError
from .sieve import PrimeTable

__all__ = [
    "E_LOWER",
    "E_UPPER",
    "LEstimate",
    "SignCache",
    "chi_on_primes",
    "curly_l",
    "e_chi",
    "l1_euler_product",
    "l1_interval_from_curly_l",
    "prime_char_sum",
    "window_start",
]

# Universal bounds for the correction term E(chi):
#   sum_p (log(1 - 1/p) + 1/p) <= E(chi) <= sum_p (log(1 + 1/p) - 1/p)
E_LOWER = -0.315718
E_UPPER = -0.18198

DEFAULT_CUTOFF = 10**7


@dataclass(frozen=True)
class LEstimate:
    """A truncated series value, its cutoff and a last-octave oscillation."""

    value: float
    cutoff: int
    oscillation: float

    def as_dict(self):
        return {"value": self.value, "cutoff": self.cutoff, "oscillation": self.oscillation}


@dataclass(frozen=True, eq=False)
class SignCache:
    """chi(p) for every prime of a table, with running counts of +1 and -1 signs."""

    d: int
    signs: np.ndarray
    prefix_plus: np.ndarray
    prefix_minus: np.ndarray

    @classmethod
    def from_signs(cls, d: int, signs: np.ndarray) -> SignCache:
        signs = np.ascontiguousarray(signs, dtype=np.int8)
        plus = np.cumsum(signs == 1, dtype=np.int64)
        minus = np.cumsum(signs == -1, dtype=np.int64)
        for arr in (signs, plus, minus):
            arr.flags.writeable = False
        return cls(int(d), signs, plus, minus)

    def __len__(self):
        return len(self.signs)


def _limbs(n: int) -> np.ndarray:
    n = abs(n)
    count = max(1, (n.bit_length() + 31) // 32)
    return np.array([(n >> (32 * i)) & 0xFFFFFFFF for i in reversed(range(count))], dtype=np.uint32)


def _signs_chunk(d: int, primes: np.ndarray) -> np.ndarray:
    if abs(d) < 2**62:
        return kernels.kronecker_small(d, primes)
    # big d: reduce |d| mod p once per prime, then a word-size Jacobi symbol
    out = np.empty(len(primes), dtype=np.int8)
    odd = primes != 2
    podd = primes[odd]
    sym = kernels.jacobi_odd(kernels.residues(_limbs(d), podd), podd)
    if d < 0:
        # (-1/p) = -1 exactly when p = 3 mod 4
        sym = np.where(podd % np.uint64(4) == np.uint64(3), -sym, sym).astype(np.int8)
    out[odd] = sym
    out[~odd] = kronecker(d, 2)
    return out


def chi_on_primes(spec: CharacterSpec | int, table: PrimeTable, threads: int = 1) -> SignCache:
    """Evaluate the character at every table prime."""
    d = spec.d if isinstance(spec, CharacterSpec) else int(spec)
    primes = table.primes
    if len(primes) == 0:
        raise ValueError("prime table is empty")
    if abs(d) >= 2**62 and table.limit >= 2**32:
        raise OutOfRangeError("big discriminants need a prime table below 2**32")
    if threads > 1 and len(primes) > 1 << 16:
        chunks = np.array_split(primes, threads * 4)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            signs = np.concatenate(list(pool.map(lambda c: _signs_chunk(d, c), chunks)))
    else:
        signs = _signs_chunk(d, primes)
    return SignCache.from_signs(d, signs)


def window_start(table: PrimeTable, cutoff: int) -> int:
    """Index of the first prime >= cutoff/2."""
    return table.count_le((cutoff + 1) // 2 - 1)


def _estimate(cache: SignCache, table: PrimeTable, cutoff: int, terms, exp_scale=False) -> LEstimate:
    table.check(cutoff)
    n = table.count_le(cutoff)
    if len(cache) < n:
        raise OutOfRangeError(f"sign cache covers {len(cache)} primes, cutoff needs {n}")
    if n == 0:
        return LEstimate(1.0 if exp_scale else 0.0, int(cutoff), 0.0)
    u = cache.signs[:n].astype(np.float64) / table.primes[:n].astype(np.float64)
    total, lo, hi = kernels.neumaier_window(terms(u), window_start(table, cutoff))
    if exp_scale:
        value = math.exp(total)
        return LEstimate(value, int(cutoff), max(math.exp(hi) - value, value - math.exp(lo)))
    return LEstimate(total, int(cutoff), max(hi - total, total - lo))


def curly_l(cache: SignCache, table: PrimeTable, cutoff: int) -> LEstimate:
    """Truncation of sum_p chi(p)/p at ``cutoff`` (conditionally convergent)."""
    return _estimate(cache, table, cutoff, lambda u: u)


def e_chi(cache: SignCache, table: PrimeTable, cutoff: int) -> LEstimate:
    """Truncation of E(chi) = sum_p [chi(p)/p + log(1 - chi(p)/p)]."""
    return _estimate(cache, table, cutoff, lambda u: u + np.log1p(-u))


def l1_euler_product(cache: SignCache, table: PrimeTable, cutoff: int) -> LEstimate:
    """Truncated Euler product for L(1, chi), accumulated in log space."""
    return _estimate(cache, table, cutoff, lambda u: -np.log1p(-u), exp_scale=True)


def l1_interval_from_curly_l(curly: LEstimate) -> tuple[float, float]:
    """Range of L(1, chi) compatible with ``curly`` and the universal E(chi) bounds."""
    return math.exp(curly.value - E_UPPER), math.exp(curly.value - E_LOWER)


def prime_char_sum(cache: SignCache, table: PrimeTable, x: int) -> int:
    """sum_{p <= x} chi(p), read off the prefix counts."""
    table.check(x)
    j = table.count_le(x) - 1
    if j < 0:
        return 0
    return int(cache.prefix_plus[j] - cache.prefix_minus[j])
