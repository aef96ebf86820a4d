import math

import numpy as np
import pytest

from p2race.arith import CharacterSpec, kronecker
from p2race.charsum import (
    E_LOWER,
    E_UPPER,
    LEstimate,
    chi_on_primes,
    curly_l,
    e_chi,
    l1_euler_product,
    l1_interval_from_curly_l,
    prime_char_sum,
)
from p2race.errors import OutOfRangeError
from p2race.search import enumerate_fundamental_discriminants
from p2race.sieve import build_prime_table

from conftest import RECORD_D


def leibniz_quarter_pi(n=10**6):
    """pi/4 from the Leibniz series, averaging two consecutive partial sums."""
    k = np.arange(n + 1, dtype=np.float64)
    terms = np.where(k % 2 == 0, 1.0, -1.0) / (2 * k + 1)
    s_n = math.fsum(terms[:n].tolist())
    return 0.5 * (s_n + s_n + terms[n])


QUARTER_PI = leibniz_quarter_pi()


def test_leibniz_oracle():
    assert abs(QUARTER_PI - math.pi / 4) < 1e-12


@pytest.fixture(scope="module")
def cache4(table7):
    return chi_on_primes(CharacterSpec.create(-4), table7)


def test_signs_small_example():
    table = build_prime_table(10)
    cache = chi_on_primes(-4, table)
    assert cache.signs.tolist() == [0, -1, 1, -1]
    assert int(cache.prefix_minus[3]) == 2
    assert int(cache.prefix_plus[3]) == 1


@pytest.mark.parametrize("d", [-4, 12, -163, 21, RECORD_D, -RECORD_D])
def test_signs_match_kronecker(d, table6):
    cache = chi_on_primes(d, table6)
    head = table6.primes[:3000].tolist()
    assert cache.signs[:3000].tolist() == [kronecker(d, p) for p in head]
    for p in head:
        if d % p == 0:
            assert cache.signs[head.index(p)] == 0


def test_signs_thread_invariant(table7):
    a = chi_on_primes(RECORD_D, table7, threads=1)
    b = chi_on_primes(RECORD_D, table7, threads=4)
    assert np.array_equal(a.signs, b.signs)
    c = chi_on_primes(-163, table7, threads=3)
    assert np.array_equal(c.signs, chi_on_primes(-163, table7).signs)


def test_prefix_counts_invariants(cache4):
    assert np.all(np.diff(cache4.prefix_plus) >= 0)
    assert np.all(np.diff(cache4.prefix_minus) >= 0)
    idx = np.arange(1, len(cache4) + 1)
    assert np.all(cache4.prefix_plus + cache4.prefix_minus <= idx)


def unramified_e_bounds(d, table, cutoff):
    """E(chi) lies between the all-(+1) and all-(-1) sums over primes not dividing d."""
    p = np.array([q for q in table.primes[: table.count_le(cutoff)].tolist() if d % q], dtype=float)
    low = math.fsum((np.log1p(-1 / p) + 1 / p).tolist())
    high = math.fsum((np.log1p(1 / p) - 1 / p).tolist())
    return low, high


def test_curly_l_examples(cache4, table7):
    assert curly_l(cache4, table7, 2) == LEstimate(0.0, 2, 0.0)
    est = curly_l(cache4, table7, 10**6)
    low, high = unramified_e_bounds(-4, table7, 10**6)
    assert math.log(QUARTER_PI) + low <= est.value <= math.log(QUARTER_PI) + high
    assert est.cutoff == 10**6 and est.oscillation >= 0
    # the sum over odd primes of chi_{-4}(p)/p is about -0.33498
    assert est.value == pytest.approx(-0.33498, abs=1e-4)


def test_stated_e_bounds_need_unramified_small_primes(cache4, table7):
    # p = 2 divides -4, so its (negative) term is missing and E rises above E_UPPER
    assert e_chi(cache4, table7, 10**6).value > E_UPPER


def test_curly_l_matches_direct_sum(cache4, table7):
    primes = table7.primes[: table7.count_le(10**5)].tolist()
    direct = math.fsum(kronecker(-4, p) / p for p in primes)
    assert curly_l(cache4, table7, 10**5).value == pytest.approx(direct, abs=1e-15)


def test_oscillation_definition(table4):
    cache = chi_on_primes(-3, table4)
    cutoff = 5000
    primes = table4.primes[: table4.count_le(cutoff)].tolist()
    partial, s = [], 0.0
    for p in primes:
        s = math.fsum([s, kronecker(-3, p) / p])
        partial.append((p, s))
    final = partial[-1][1]
    expected = max(abs(v - final) for p, v in partial if 2 * p >= cutoff)
    est = curly_l(cache, table4, cutoff)
    assert est.value == pytest.approx(final, abs=1e-15)
    assert est.oscillation == pytest.approx(expected, abs=1e-15)


def test_e_chi_examples(cache4, table7):
    assert e_chi(cache4, table7, 2).value == 0.0
    est = e_chi(cache4, table7, 10**6)
    low, high = unramified_e_bounds(-4, table7, 10**6)
    assert low <= est.value <= high
    assert est.oscillation < 1e-5
    curly = curly_l(cache4, table7, 10**6).value
    assert abs(curly - (math.log(QUARTER_PI) + est.value)) < 1e-2


@pytest.mark.parametrize("d", [-4, 8, 12, -8, 24])
def test_l1_trivial_cutoff(d, table4):
    cache = chi_on_primes(d, table4)
    assert l1_euler_product(cache, table4, 2).value == 1.0


def test_l1_minus_four(cache4, table7):
    est = l1_euler_product(cache4, table7, 10**6)
    assert abs(est.value - QUARTER_PI) < 1e-2


def test_interval_examples():
    lo, hi = l1_interval_from_curly_l(LEstimate(0.0, 10, 0.0))
    assert lo == pytest.approx(math.exp(0.18198)) and hi == pytest.approx(math.exp(0.315718))
    assert (round(lo, 4), round(hi, 4)) == (1.1996, 1.3712)
    lo, hi = l1_interval_from_curly_l(LEstimate(-2.1108, 10, 0.0))
    assert (round(lo, 4), round(hi, 4)) == (0.1453, 0.1661)
    a = l1_interval_from_curly_l(LEstimate(-1.0, 10, 0.0))
    b = l1_interval_from_curly_l(LEstimate(-0.5, 10, 0.0))
    assert a[0] < b[0] and a[1] < b[1]


def test_prime_char_sum(cache4, table7):
    assert prime_char_sum(cache4, table7, 2) == 0
    assert prime_char_sum(cache4, table7, 1) == 0
    assert prime_char_sum(cache4, table7, 0) == 0
    assert prime_char_sum(cache4, table7, 100) == -2


def test_prime_char_sum_steps(table4):
    cache = chi_on_primes(-3, table4)
    primes = set(table4.primes.tolist())
    prev = prime_char_sum(cache, table4, 0)
    for x in range(1, 10**4 + 1):
        cur = prime_char_sum(cache, table4, x)
        assert cur - prev == (kronecker(-3, x) if x in primes else 0)
        prev = cur


def test_out_of_range(cache4, table6):
    for fn in (curly_l, e_chi, l1_euler_product):
        with pytest.raises(OutOfRangeError):
            fn(cache4, table6, 10**6 + 1)
    with pytest.raises(OutOfRangeError):
        prime_char_sum(cache4, table6, 10**7)


def test_identity_and_bounds_small_d(table6):
    for d in enumerate_fundamental_discriminants(1000).tolist():
        cache = chi_on_primes(d, table6)
        c = curly_l(cache, table6, 10**6)
        e = e_chi(cache, table6, 10**6)
        l1 = l1_euler_product(cache, table6, 10**6)
        assert abs(c.value - math.log(l1.value) - e.value) < 1e-12, d
        low, high = unramified_e_bounds(d, table6, 10**6)
        assert low - 1e-15 <= e.value <= high + 1e-15, d
        assert E_LOWER <= e.value <= 0.0, d
        assert e.oscillation < 1e-5


def test_stated_e_bounds_for_record_character(table7):
    cache = chi_on_primes(RECORD_D, table7)
    e = e_chi(cache, table7, 10**6)
    assert E_LOWER <= e.value <= E_UPPER


@pytest.mark.parametrize("d", [-4, -3, 5, -163, 8, RECORD_D])
def test_absolutely_convergent_oscillation_shrinks(d, table7, table6):
    big = chi_on_primes(d, table7)
    for fn in (e_chi, l1_euler_product):
        assert fn(big, table7, 10**7).oscillation <= fn(big, table7, 10**6).oscillation
