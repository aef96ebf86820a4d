"""Exact counts for the race among products of two primes.

For a character chi and a bound x, ordered prime pairs (a, b) with ab <= x
are split by the sign pair (chi(a), chi(b)); pairs touching a prime that
divides d are dropped.  The race ratio compares one sign class with a
quarter of all remaining pairs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .arith import CharacterSpec
from .charsum import DEFAULT_CUTOFF, LEstimate, SignCache, curly_l
from .errors import DomainError, OutOfRangeError, UndefinedRatioError
from .sieve import PrimeTable

__all__ = [
    "Convention",
    "RaceTally",
    "RaceRow",
    "tally_semiprimes",
    "bias_ratio",
    "exact_bias_ratio",
    "landau_residual",
    "predicted_bias",
    "race_series",
]


class Convention(str, Enum):
    ORDERED_WITH_EQUAL = "ordered_with_equal"
    ORDERED_STRICT = "ordered_strict"
    UNORDERED = "unordered"


@dataclass(frozen=True)
class RaceTally:
    x: int
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    n_coprime: int
    convention: Convention = Convention.ORDERED_WITH_EQUAL

    def __post_init__(self):
        if self.n_pp + self.n_pm + self.n_mp + self.n_mm != self.n_coprime:
            raise ValueError("sign-pair counts do not partition n_coprime")

    def count(self, eta: int) -> int:
        return self.n_mm if _check_eta(eta) < 0 else self.n_pp

    def as_dict(self):
        return {
            "x": self.x,
            "n_pp": self.n_pp,
            "n_pm": self.n_pm,
            "n_mp": self.n_mp,
            "n_mm": self.n_mm,
            "n_coprime": self.n_coprime,
            "convention": self.convention.value,
        }


def _check_eta(eta: int) -> int:
    if eta not in (-1, 1):
        raise ValueError("eta must be -1 or +1")
    return eta


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _strict_and_diagonal(signs, primes, pplus, pminus, x: int, threads: int):
    n_a = int(np.searchsorted(primes, np.uint64(math.isqrt(x)), side="right"))
    ranges = _split(n_a, max(1, threads) * 4) if threads > 1 else [(0, n_a)]

    def work(r):
        return kernels.pair_counts(signs, primes, pplus, pminus, x, r[0], r[1])

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, ranges))
    else:
        parts = [work(r) for r in ranges]
    return [sum(col) for col in zip(*parts)] if parts else [0] * 6


def tally_semiprimes(
    spec: CharacterSpec | None,
    cache: SignCache,
    table: PrimeTable,
    x: int,
    convention: Convention | str = Convention.ORDERED_WITH_EQUAL,
    threads: int = 1,
) -> RaceTally:
    """Count prime pairs with ab <= x by sign class.

    Loops over primes a <= sqrt(x) and reads the number of primes b in
    (a, x/a] of each sign from the cache's prefix counts.
    """
    convention = Convention(convention)
    if spec is not None and int(spec.d) != cache.d:
        raise ValueError("sign cache was built for a different character")
    if x > table.limit:
        raise OutOfRangeError(
            f"x={x} needs a prime table up to {x}, table stops at {table.limit}", required=int(x)
        )
    n = table.count_le(x)
    if len(cache) < n:
        raise OutOfRangeError(f"sign cache covers {len(cache)} primes, x={x} needs {n}")
    if x < 4:
        return RaceTally(int(x), 0, 0, 0, 0, 0, convention)

    s_pp, s_pm, s_mp, s_mm, d_p, d_m = _strict_and_diagonal(
        cache.signs, table.primes, cache.prefix_plus, cache.prefix_minus, x, threads
    )
    if convention is Convention.UNORDERED:
        n_pp, n_mm = s_pp + d_p, s_mm + d_m
        n_pm, n_mp = s_pm, s_mp
    else:
        diag = convention is Convention.ORDERED_WITH_EQUAL
        n_pp = 2 * s_pp + (d_p if diag else 0)
        n_mm = 2 * s_mm + (d_m if diag else 0)
        n_pm = n_mp = s_pm + s_mp
    return RaceTally(int(x), n_pp, n_pm, n_mp, n_mm, n_pp + n_pm + n_mp + n_mm, convention)


def exact_bias_ratio(tally: RaceTally, eta: int) -> Fraction:
    """The race ratio as an exact fraction 4 * n_eta / n_coprime."""
    if tally.n_coprime == 0:
        raise UndefinedRatioError(f"no coprime prime pairs up to x={tally.x}")
    return Fraction(4 * tally.count(eta), tally.n_coprime)


def bias_ratio(tally: RaceTally, eta: int) -> float:
    if tally.n_coprime == 0:
        raise UndefinedRatioError(f"no coprime prime pairs up to x={tally.x}")
    return tally.count(eta) / (tally.n_coprime / 4)


def landau_residual(table: PrimeTable, x: int) -> tuple[int, float]:
    """Ordered prime pairs with ab <= x, and count * log x / (2x) - log log x."""
    if x < 4:
        raise DomainError("landau_residual needs x >= 4")
    table.check(x)
    n = table.count_le(x)
    ones = np.ones(n, dtype=np.int8)
    running = np.arange(1, n + 1, dtype=np.int64)
    s_pp, _, _, _, d_p, _ = _strict_and_diagonal(
        ones, table.primes[:n], running, np.zeros(n, dtype=np.int64), x, 1
    )
    count = 2 * s_pp + d_p
    return count, count * math.log(x) / (2 * x) - math.log(math.log(x))


def predicted_bias(curly: LEstimate | float, x: int, eta: int) -> float:
    """First-order prediction 1 + eta * curly / log log x of the race ratio."""
    if x < 16:
        raise DomainError("predicted_bias needs x >= 16")
    value = curly.value if isinstance(curly, LEstimate) else float(curly)
    return 1.0 + _check_eta(eta) * value / math.log(math.log(x))


@dataclass(frozen=True)
class RaceRow:
    x: int
    r: float
    predicted: float | None
    tally: RaceTally


def race_series(
    spec: CharacterSpec | None,
    cache: SignCache,
    table: PrimeTable,
    xs,
    eta: int,
    convention: Convention | str = Convention.ORDERED_WITH_EQUAL,
    curly: LEstimate | None = None,
    threads: int = 1,
) -> list[RaceRow]:
    """One row per x: tally, observed ratio and predicted ratio."""
    xs = [int(x) for x in xs]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("xs must be strictly ascending")
    if not xs:
        return []
    table.check(xs[-1])
    if curly is None:
        curly = curly_l(cache, table, min(DEFAULT_CUTOFF, table.limit))
    rows = []
    for x in xs:
        tally = tally_semiprimes(spec, cache, table, x, convention, threads)
        predicted = predicted_bias(curly, x, eta) if x >= 16 else None
        rows.append(RaceRow(x, bias_ratio(tally, eta), predicted, tally))
    return rows
