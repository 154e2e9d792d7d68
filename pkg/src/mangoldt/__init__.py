"""Generalized von Mangoldt functions and average orders of multiplicative
functions: prime-power tables, Dirichlet-convolution identities, streamed
weighted sums, Euler-product constants, and asymptotic-expansion fitting.
"""

from .errors import CapacityError, DomainError, NumericError
from .mf import (
    CATALOG,
    DENSE_LIMIT,
    MultiplicativeFunction,
    enumerate_support,
    eval_local,
    function_from_config,
    get_function,
    sf_const,
    sieve_values,
)
from .sequences import CoeffSeq, dirichlet_convolve, log_weight
from .lambdaf import (
    LambdaTable,
    PartitionTerm,
    faa_terms,
    lambda_dense,
    lambda_fh,
    lambda_prime_power,
    lambda_table,
)
from .sums import (
    HypothesisReport,
    SumSeries,
    build_grid,
    check_integral_iteration,
    check_hypothesis,
    check_binomial_moments,
    compensated_sum,
    g_log_series,
    lambda_fh_over_n_series,
    lambda_fh_over_n_sum,
    logn_power_series,
    s_k_series,
    s_k_sum,
    weighted_sum,
)
from .asymptotics import (
    DEFAULT_MARGIN,
    AsymptoticFit,
    RootSet,
    VerifyReport,
    characteristic_roots,
    euler_product,
    falling_leading,
    fit_expansion,
    gamma_eval,
    mean_value_constant,
    reference_margin,
    report_to_json_dict,
    theoretical_leading,
    verify_theorem,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
