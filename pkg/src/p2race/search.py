"""Scans over small fundamental discriminants ranked by the truncated prime sum."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._backend import kernels
from .charsum import E_LOWER, E_UPPER, LEstimate, window_start
from .errors import UndefinedRatioError
from .sieve import PrimeTable

__all__ = [
    "DiscriminantRecord",
    "ScanResult",
    "enumerate_fundamental_discriminants",
    "scan_discriminants",
    "tail_proportion",
    "curly_threshold_from_l1",
]

SIGN_CLASSES = ("positive", "negative", "both")
EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class DiscriminantRecord:
    d: int
    curly: LEstimate

    @property
    def sign_class(self) -> str:
        return "positive" if self.d > 0 else "negative"


class ScanResult(NamedTuple):
    most_negative: list
    most_positive: list
    records: list


def _squarefree_flags(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[0] = False
    for p in range(2, math.isqrt(n) + 1):
        flags[p * p :: p * p] = False
    return flags


def enumerate_fundamental_discriminants(D: int, signs: str = "both", d_min: int = 0) -> np.ndarray:
    """All fundamental discriminants with d_min <= |d| <= D.

    Ordered by |d|, positive before negative at equal |d|.
    """
    if signs not in SIGN_CLASSES:
        raise ValueError(f"signs must be one of {SIGN_CLASSES}")
    sf = _squarefree_flags(D)
    k = np.arange(D + 1, dtype=np.int64)
    quarter = k // 4
    four = (k % 4 == 0) & sf[quarter]
    # d = k > 0: k = 1 mod 4 squarefree, or k = 4m with m = 2, 3 mod 4
    pos = ((k % 4 == 1) & sf & (k != 1)) | (four & np.isin(quarter % 4, (2, 3)))
    # d = -k: -k = 1 mod 4, or -k = 4m with m = -k/4 = 2, 3 mod 4
    neg = ((k % 4 == 3) & sf) | (four & np.isin(quarter % 4, (1, 2)))
    keep = k >= d_min
    parts = []
    if signs in ("positive", "both"):
        parts.append(2 * k[pos & keep])
    if signs in ("negative", "both"):
        parts.append(2 * k[neg & keep] + 1)
    keys = np.sort(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)
    return np.where(keys & 1, -(keys >> 1), keys >> 1)


def _rank(ds: np.ndarray, values: np.ndarray, top_k: int, largest: bool) -> np.ndarray:
    key = -values if largest else values
    order = np.lexsort((ds < 0, np.abs(ds), key))
    return order[:top_k]


def scan_discriminants(
    D: int,
    signs: str,
    table: PrimeTable,
    cutoff: int,
    top_k: int = 10,
    threads: int = 1,
    d_min: int = 0,
    chunk: int = 4096,
    on_record: Callable[[DiscriminantRecord], None] | None = None,
) -> ScanResult:
    """Truncated prime sum for every fundamental |d| <= D; extremes ranked.

    Ties in value break by |d| ascending, then positive before negative.
    ``on_record`` sees every record in enumeration order as chunks complete.
    """
    if D < 3:
        raise ValueError("D must be >= 3")
    table.check(cutoff)
    n = table.count_le(cutoff)
    primes = table.primes[:n]
    start = window_start(table, cutoff)
    ds = enumerate_fundamental_discriminants(D, signs, d_min)
    pieces = [ds[i : i + chunk] for i in range(0, len(ds), chunk)]

    def work(piece):
        return kernels.curly_scan(piece, primes, start)

    records = []
    values = np.empty(len(ds))

    def consume(i, piece, out):
        vals, lo, hi = out
        values[i * chunk : i * chunk + len(piece)] = vals
        for d, v, a, b in zip(piece.tolist(), vals.tolist(), lo.tolist(), hi.tolist()):
            rec = DiscriminantRecord(d, LEstimate(v, int(cutoff), max(b - v, v - a)))
            records.append(rec)
            if on_record is not None:
                on_record(rec)

    if threads > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, (piece, out) in enumerate(zip(pieces, pool.map(work, pieces))):
                consume(i, piece, out)
    else:
        for i, piece in enumerate(pieces):
            consume(i, piece, work(piece))

    most_negative = [records[i] for i in _rank(ds, values, top_k, largest=False)]
    most_positive = [records[i] for i in _rank(ds, values, top_k, largest=True)]
    return ScanResult(most_negative, most_positive, records)


def tail_proportion(records, tau: float, side: str = "ge") -> float:
    """Fraction of scanned records whose truncated value is >= tau (or <= tau)."""
    values = np.array([r.curly.value if isinstance(r, DiscriminantRecord) else r for r in records], dtype=float)
    if len(values) == 0:
        raise UndefinedRatioError("tail proportion of an empty scan")
    if side == "ge":
        hits = values >= tau
    elif side == "le":
        hits = values <= tau
    else:
        raise ValueError("side must be 'ge' or 'le'")
    return float(np.count_nonzero(hits)) / len(values)


def curly_threshold_from_l1(l1_threshold: float, side: str = "ge") -> float:
    """Necessary prime-sum threshold for ``L(1, chi) >= l1_threshold`` (or ``<=``).

    log L(1, chi) = curly - E with E in [E_LOWER, E_UPPER], so L(1, chi) >= t
    forces curly >= log t + E_LOWER and L(1, chi) <= t forces
    curly <= log t + E_UPPER.  For the e^gamma * tau scale pass
    ``l1_threshold = exp(EULER_GAMMA) * tau``.
    """
    if side not in ("ge", "le"):
        raise ValueError("side must be 'ge' or 'le'")
    return math.log(l1_threshold) + (E_LOWER if side == "ge" else E_UPPER)
