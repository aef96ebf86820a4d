"""Integer arithmetic: Kronecker symbol, discriminant checks and primality.

Python's ``int`` is the arbitrary-precision integer type throughout; the
helpers here only add strict decimal parsing on top of it.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidDiscriminantError

__all__ = [
    "parse_bigint",
    "format_bigint",
    "kronecker",
    "jacobi",
    "Validation",
    "validate_discriminant",
    "CharacterSpec",
    "is_probable_prime",
    "small_primes",
]

_DECIMAL = re.compile(r"[+-]?[0-9]+")

# (2/n) indexed by n mod 8
_TWO_TABLE = (0, 1, 0, -1, 0, -1, 0, 1)


def parse_bigint(text: str) -> int:
    """Parse a signed base-10 integer, rejecting anything else (spaces, '_', hex)."""
    text = text.strip()
    if not _DECIMAL.fullmatch(text):
        raise ValueError(f"malformed integer: {text!r}")
    return int(text)


def format_bigint(n: int) -> str:
    return str(int(n))


def small_primes(limit: int) -> list[int]:
    """Primes <= limit by a plain sieve; for trial division and test tables."""
    if limit < 2:
        return []
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).tolist()


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 0.

    Binary elimination with quadratic reciprocity, so n is never factored.
    Negative ``d`` works because Python's ``&`` sees the 2-adic expansion.
    """
    if n < 0:
        raise ValueError("kronecker: n must be nonnegative")
    a, b = int(d), int(n)
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if not (a & 1 or b & 1):
        return 0
    v = (b & -b).bit_length() - 1
    b >>= v
    k = _TWO_TABLE[a & 7] if v & 1 else 1
    while a:
        v = (a & -a).bit_length() - 1
        a >>= v
        if v & 1:
            k *= _TWO_TABLE[b & 7]
        if a & b & 2:
            k = -k
        r = abs(a)
        a = b % r
        b = r
    return k if b == 1 else 0


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or not n & 1:
        raise ValueError("jacobi: n must be odd and positive")
    return kronecker(a, n)


class Validation(str, Enum):
    FUNDAMENTAL = "fundamental"
    NOT_FUNDAMENTAL = "not_fundamental"
    TRIAL_CHECKED = "trial_checked"


def validate_discriminant(d: int, trial_bound: int = 10**6) -> Validation:
    """Decide whether ``d`` is a fundamental discriminant.

    The congruence conditions are checked exactly.  Squarefreeness of the
    relevant part is proven when trial division by primes up to
    ``trial_bound`` leaves a cofactor that is 1, a prime below 2**64, or
    smaller than the square of the next untried prime.  Otherwise the result
    is ``TRIAL_CHECKED``: no square of a prime <= trial_bound divides it.
    """
    d = int(d)
    if d in (0, 1):
        raise InvalidDiscriminantError("d must be a fundamental discriminant ≠ 0, 1")
    if trial_bound < 2:
        raise ValueError("trial_bound must be >= 2")
    if d % 4 == 1:
        m = d
    elif d % 4 == 0:
        m = d // 4
        if m % 4 not in (2, 3):
            return Validation.NOT_FUNDAMENTAL
    else:
        return Validation.NOT_FUNDAMENTAL

    r = abs(m)
    bound = min(trial_bound, math.isqrt(r))
    for p in small_primes(bound):
        if p * p > r:
            return Validation.FUNDAMENTAL
        if r % p == 0:
            r //= p
            if r % p == 0:
                return Validation.NOT_FUNDAMENTAL
    if r == 1 or bound < trial_bound:
        # every prime up to sqrt(|m|) was tried
        return Validation.FUNDAMENTAL
    if math.isqrt(r) ** 2 == r:
        return Validation.NOT_FUNDAMENTAL
    if r < (trial_bound + 1) ** 2 or (r < 2**64 and is_probable_prime(r)):
        return Validation.FUNDAMENTAL
    return Validation.TRIAL_CHECKED


@dataclass(frozen=True)
class CharacterSpec:
    """The real character n -> (d/n) attached to a discriminant ``d``.

    ``validation`` is one of ``"verified"``, ``"trial_checked"`` or
    ``"unchecked"``; ``trial_bound`` records the bound behind the middle case.
    """

    d: int
    validation: str = "unchecked"
    trial_bound: int | None = None

    def __post_init__(self):
        if self.d in (0, 1):
            raise InvalidDiscriminantError("d must be a fundamental discriminant ≠ 0, 1")
        if self.validation not in ("verified", "trial_checked", "unchecked"):
            raise ValueError(f"unknown validation state {self.validation!r}")

    @classmethod
    def create(cls, d: int, trial_bound: int = 10**6) -> CharacterSpec:
        status = validate_discriminant(d, trial_bound)
        if status is Validation.NOT_FUNDAMENTAL:
            raise InvalidDiscriminantError(f"{d} is not a fundamental discriminant")
        if status is Validation.FUNDAMENTAL:
            return cls(int(d), "verified", trial_bound)
        return cls(int(d), "trial_checked", trial_bound)

    def __call__(self, n: int) -> int:
        return kronecker(self.d, n)


_TRIAL_PRIMES = small_primes(1000)
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _strong_lucas(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1
    D = 5
    while True:
        j = kronecker(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4

    d, s = n + 1, 0
    while not d & 1:
        d >>= 1
        s += 1

    def half(v):
        v %= n
        return (v + n) // 2 if v & 1 else v // 2

    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = half(P * U + V), half(D * U + P * V)
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def is_probable_prime(n: int, rounds: int = 32) -> bool:
    """Primality test, exact below 2**64.

    Above 2**64: strong probable-prime test to base 2 plus ``rounds`` witnesses
    drawn from a generator seeded by ``n`` (so verdicts are reproducible), then
    one strong Lucas test.  A ``False`` answer is always correct.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n = int(n)
    if n < 2:
        return False
    for p in _TRIAL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 1000 * 1000:
        return True
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    if n < 2**64:
        return all(_strong_probable_prime(n, a, d, s) for a in _DETERMINISTIC_BASES)
    if not _strong_probable_prime(n, 2, d, s):
        return False
    rng = random.Random(n)
    for _ in range(rounds):
        if not _strong_probable_prime(n, rng.randrange(3, n - 1), d, s):
            return False
    return _strong_lucas(n)
