import math

import numpy as np
import pytest

from p2race.sieve import build_prime_table

RECORD_D = 133007243922787512412600341028518035429251391005992761399935498154029253
RECORD_A = -33251810980696878103150085257129508857312847751498190349983874538507313

_ACCEPTANCE = []


def simple_primes(n):
    """Independent oracle: primes <= n by trial division against smaller primes."""
    primes = []
    for k in range(2, n + 1):
        r = math.isqrt(k)
        if all(k % p for p in primes if p <= r):
            primes.append(k)
    return primes


def is_prime_td(k):
    if k < 2:
        return False
    return all(k % q for q in range(2, math.isqrt(k) + 1))


def euler_legendre(d, p):
    """(d/p) for an odd prime p by Euler's criterion."""
    v = pow(d % p, (p - 1) // 2, p)
    return 0 if v == 0 else (1 if v == 1 else -1)


@pytest.fixture(scope="session")
def table7():
    return build_prime_table(10**7)


@pytest.fixture(scope="session")
def table6(table7):
    return table7.restrict(10**6)


@pytest.fixture(scope="session")
def table4(table7):
    return table7.restrict(10**4)


@pytest.fixture
def criterion():
    def record(number, text, ok, detail=""):
        _ACCEPTANCE.append((number, text, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, ok, detail in sorted(_ACCEPTANCE, key=lambda r: str(r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{number}] {text}  {detail}")
