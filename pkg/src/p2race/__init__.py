"""Prime races among products of two primes and the quadratic characters behind them."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .arith import CharacterSpec, is_probable_prime, kronecker, validate_discriminant
from .charsum import (
    LEstimate,
    SignCache,
    chi_on_primes,
    curly_l,
    e_chi,
    l1_euler_product,
    l1_interval_from_curly_l,
    prime_char_sum,
)
from .polyprimes import PolySpec, conjecture_f_report, hl_constant, li_poly, prime_value_count
from .race import (
    Convention,
    RaceTally,
    bias_ratio,
    landau_residual,
    predicted_bias,
    race_series,
    tally_semiprimes,
)
from .search import scan_discriminants, tail_proportion
from .sieve import PrimeTable, build_prime_table, prime_count, prime_log_sum, prime_reciprocal_sum
