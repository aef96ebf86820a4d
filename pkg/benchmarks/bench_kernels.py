"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--limit 1000000] [--repeat 3]

Both backends get identical inputs; outputs are compared before any timing
is printed.
"""

import argparse
import math
import time

import numpy as np

from p2race._backend import compiled, fallback
from p2race.charsum import _limbs, window_start
from p2race.presets import RECORD_D
from p2race.search import enumerate_fundamental_discriminants
from p2race.sieve import build_prime_table


def best_of(repeat, fn):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        if a.dtype.kind == "f":
            return np.allclose(a, b, rtol=0, atol=1e-12)
        return np.array_equal(a, b)
    if isinstance(a, float):
        return abs(a - b) <= 1e-12
    return a == b


def cases(limit):
    table = build_prime_table(limit)
    primes = table.primes
    base = primes[primes <= math.isqrt(limit)]
    odd = primes[1:]
    limbs = _limbs(RECORD_D)
    res = compiled.residues(limbs, odd)
    signs = compiled.jacobi_odd(res, odd).astype(np.int8)
    signs = np.concatenate([np.array([1], dtype=np.int8), signs])
    pplus = np.cumsum(signs > 0, dtype=np.int64)
    pminus = np.cumsum(signs < 0, dtype=np.int64)
    n_a = int(np.searchsorted(primes, math.isqrt(limit), side="right"))
    terms = signs / primes.astype(np.float64)
    start = window_start(table, limit)
    ds = enumerate_fundamental_discriminants(200)
    return [
        ("sieve_segment", "sieve_segment", (0, limit + 1, base)),
        ("residues (72-digit d)", "residues", (limbs, odd)),
        ("jacobi_odd", "jacobi_odd", (res, odd)),
        ("kronecker_small (d=-163)", "kronecker_small", (-163, primes)),
        ("pair_counts (x=limit)", "pair_counts", (signs, primes, pplus, pminus, limit, 0, n_a)),
        ("neumaier_window", "neumaier_window", (terms, start)),
        ("curly_scan (|d|<=200)", "curly_scan", (ds, primes[: len(primes) // 10], start // 10)),
        ("poly_prime_count (A=41)", "poly_prime_count", (41, 0, limit // 10)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    print(f"{'kernel':28} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for label, name, call_args in cases(args.limit):
        tc, oc = best_of(args.repeat, lambda: getattr(compiled, name)(*call_args))
        tp, op = best_of(args.repeat, lambda: getattr(fallback, name)(*call_args))
        if not same(oc, op):
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:28} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
