"""
Configuration settings for fpure-cli.
"""
import os
from pathlib import Path

# Arithmetic bounds
MAX_PRIME = 2**31          # primes must satisfy p < MAX_PRIME
MAX_EXPONENT = 2**31 - 1   # largest exponent a monomial may carry
MAX_VARIABLES = 16
MAX_EXPANDED_TERMS = 10**6  # term bound for expanding a power of a sum in the parser

# Monomial orders
DEFAULT_ORDER = "degrevlex"
ORDERS = ("degrevlex", "deglex", "lex")

# Computation budgets; exceeding one raises BudgetExhaustedError
PAIR_BUDGET = 2_000_000        # S-pairs processed by one Buchberger run
LOEWY_SCAN_CAP = 10**6        # monomials examined by one Loewy-length scan
NU_PRODUCT_BUDGET = 10**6      # generator products formed by one nu search
OPERATOR_BUDGET = 2_000_000    # divided-power applications in one sweep
LINEAR_COLON_CAP = 250_000     # standard monomials allowed in a linear-algebra colon
RADICAL_CHECK_EXPONENT = 64    # largest power tried when certifying I in rad(J)

# Re-reduce every S-pair of a finished basis (slow, used by the tests)
CHECK_BUCHBERGER_CRITERION = False

# Replay cache
CACHE_ENV_VAR = "FPURE_CACHE_DIR"
CACHE_DB_NAME = "fpure_reports.db"

# Logging settings
LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def get_cache_dir(explicit=None):
    """Resolve the cache directory: explicit flag, then environment, else None (disabled)."""
    if explicit:
        return str(Path(explicit))
    from_env = os.environ.get(CACHE_ENV_VAR)
    if from_env:
        return str(Path(from_env))
    return None


def get_cache_db_path(cache_dir):
    """Get the SQLite file used for cached reports inside cache_dir."""
    return str(Path(cache_dir) / CACHE_DB_NAME)
