"""Segmented prime sieve, prime-counting queries and the two Mertens sums."""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ._backend import kernels
from .errors import OutOfRangeError, ResourceLimitError

__all__ = [
    "PrimeTable",
    "build_prime_table",
    "prime_count",
    "prime_reciprocal_sum",
    "prime_log_sum",
    "write_prime_cache",
    "read_prime_cache",
    "load_or_build",
    "DEFAULT_SEGMENT",
    "MEMORY_BUDGET",
]

DEFAULT_SEGMENT = 1 << 20
MEMORY_BUDGET = 4 << 30  # bytes

CACHE_MAGIC = b"P2RPRIME"
CACHE_VERSION = 1
_HEADER = struct.Struct("<8sIQQ")


class PrimeTable:
    """All primes up to ``limit``, ascending, as a read-only uint64 array."""

    __slots__ = ("limit", "primes")

    def __init__(self, limit: int, primes: np.ndarray):
        self.limit = int(limit)
        primes = np.ascontiguousarray(primes, dtype=np.uint64)
        primes.flags.writeable = False
        self.primes = primes

    def __len__(self):
        return len(self.primes)

    def __repr__(self):
        return f"PrimeTable(limit={self.limit}, count={len(self.primes)})"

    def __eq__(self, other):
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.primes, other.primes)

    def check(self, x: int) -> None:
        if x > self.limit:
            raise OutOfRangeError(
                f"x={x} exceeds the prime table limit {self.limit}", required=int(x)
            )

    def count_le(self, x: int) -> int:
        """Number of table primes <= x (no range check)."""
        if x < 2:
            return 0
        return int(np.searchsorted(self.primes, np.uint64(x), side="right"))

    def restrict(self, limit: int) -> PrimeTable:
        """The table of primes up to a smaller ``limit``, sharing memory."""
        self.check(limit)
        return PrimeTable(limit, self.primes[: self.count_le(limit)])


def _estimated_bytes(limit: int) -> int:
    if limit < 100:
        return 1024
    return int(8 * 1.26 * limit / math.log(limit))


def build_prime_table(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT,
    threads: int = 1,
    memory_budget: int | None = None,
) -> PrimeTable:
    """Sieve every prime <= ``limit`` segment by segment.

    ``segment_size`` is the width of one segment in integers (odd-only bit
    packing makes that ``segment_size / 16`` bytes).  Output does not depend on
    ``segment_size`` or ``threads``.
    """
    limit = int(limit)
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if limit >= 2**63:
        raise ResourceLimitError("prime tables are limited to 64-bit bounds")
    budget = MEMORY_BUDGET if memory_budget is None else memory_budget
    need = _estimated_bytes(limit)
    if need > budget:
        raise ResourceLimitError(
            f"a prime table up to {limit} needs about {need >> 20} MiB; "
            f"the memory budget is {budget >> 20} MiB"
        )
    segment_size = max(int(segment_size), 64)

    root = math.isqrt(limit)
    base = kernels.sieve_segment(0, root + 1, _bootstrap(root))
    bounds = [(lo, min(lo + segment_size, limit + 1)) for lo in range(0, limit + 1, segment_size)]

    def work(span):
        return kernels.sieve_segment(span[0], span[1], base)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(span) for span in bounds]
    return PrimeTable(limit, np.concatenate(parts))


def _bootstrap(n: int) -> np.ndarray:
    # primes up to isqrt(n), enough to sieve [0, n]
    m = math.isqrt(n)
    flags = np.ones(m + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(m) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.uint64)


def prime_count(table: PrimeTable, x: int) -> int:
    """pi(x) by binary search in the table."""
    table.check(x)
    return table.count_le(x)


def _mertens(table: PrimeTable, x: int, weight) -> float:
    table.check(x)
    n = table.count_le(x)
    if n == 0:
        return 0.0
    p = table.primes[:n].astype(np.float64)
    total, _, _ = kernels.neumaier_window(weight(p), n)
    return total


def prime_reciprocal_sum(table: PrimeTable, x: int) -> float:
    """Sum of 1/p over primes p <= x, compensated."""
    return _mertens(table, x, lambda p: 1.0 / p)


def prime_log_sum(table: PrimeTable, x: int) -> float:
    """Sum of log(p)/p over primes p <= x, compensated."""
    return _mertens(table, x, lambda p: np.log(p) / p)


def _encode_varints(values: np.ndarray) -> bytes:
    values = values.astype(np.uint64)
    nbytes = np.ones(len(values), dtype=np.int64)
    for k in range(1, 10):
        nbytes += values >= np.uint64(1 << (7 * k))
    offsets = np.cumsum(nbytes) - nbytes
    out = np.zeros(int(nbytes.sum()), dtype=np.uint8)
    for k in range(int(nbytes.max(initial=0))):
        sel = nbytes > k
        chunk = (values[sel] >> np.uint64(7 * k)) & np.uint64(0x7F)
        cont = np.where(nbytes[sel] > k + 1, 0x80, 0).astype(np.uint64)
        out[offsets[sel] + k] = (chunk | cont).astype(np.uint8)
    return out.tobytes()


def _decode_varints(data: bytes, count: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8)
    ends = np.flatnonzero((raw & 0x80) == 0)
    if len(ends) != count or (count and ends[-1] != len(raw) - 1):
        raise ValueError("corrupt prime cache: gap stream does not match the stored count")
    starts = np.concatenate(([0], ends[:-1] + 1)).astype(np.int64)
    lengths = ends - starts + 1
    values = np.zeros(count, dtype=np.uint64)
    for k in range(int(lengths.max(initial=0))):
        sel = lengths > k
        values[sel] |= (raw[starts[sel] + k].astype(np.uint64) & np.uint64(0x7F)) << np.uint64(7 * k)
    return values


def write_prime_cache(table: PrimeTable, path) -> None:
    """Write ``table`` in the P2RPRIME binary format (delta-encoded varint gaps)."""
    gaps = np.diff(table.primes, prepend=np.uint64(0))
    payload = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.limit, len(table)) + _encode_varints(gaps)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    tmp.replace(path)


def read_prime_cache(path) -> PrimeTable:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError("corrupt prime cache: truncated header")
    magic, version, limit, count = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise ValueError("not a prime cache file (bad magic)")
    if version != CACHE_VERSION:
        raise ValueError(f"unsupported prime cache version {version}")
    gaps = _decode_varints(data[_HEADER.size :], count)
    primes = np.cumsum(gaps, dtype=np.uint64)
    if count and primes[-1] > limit:
        raise ValueError("corrupt prime cache: primes exceed the stored limit")
    return PrimeTable(limit, primes)


def load_or_build(limit: int, cache_path=None, threads: int = 1, **kwargs) -> PrimeTable:
    """Reuse a cached table covering ``limit`` if one exists, else sieve (and cache)."""
    if cache_path is not None:
        path = Path(cache_path)
        if path.exists():
            try:
                cached = read_prime_cache(path)
            except (OSError, ValueError):
                cached = None
            if cached is not None and cached.limit >= limit:
                return cached.restrict(limit)
    table = build_prime_table(limit, threads=threads, **kwargs)
    if cache_path is not None:
        write_prime_cache(table, cache_path)
    return table
