"""Self-contained invariant suite behind the `selfcheck` CLI subcommand.

Each check returns None on success or a failure description; the CLI
prints one pass/fail line per property.  Scales follow the documented
test points (identity checks at n <= 1e5, compensation at X = 1e5 for
runtime, the heavier X = 1e6 variant lives in the pytest suite).
"""

import random
from math import log

import numpy as np

from .asymptotics import characteristic_roots, euler_product, fit_expansion
from .lambdaf import faa_terms, lambda_dense, lambda_fh, lambda_table
from .mf import CATALOG, sf_const, sieve_values, enumerate_support
from .sequences import CoeffSeq, dirichlet_convolve, log_powers
from .sums import (
    SumSeries,
    build_grid,
    check_binomial_moments,
    compensated_sum,
    g_log_series,
    weighted_sum,
)

_CHECK_FUNCS = dict(CATALOG)
_CHECK_FUNCS["sf_const(0.5)"] = sf_const(0.5)

_IDENTITY_N = 10**5


def _identity_residual(f, h, n_max):
    fvals = sieve_values(f, n_max)
    lam = lambda_fh(f, h, n_max)
    conv = dirichlet_convolve(fvals, lam)
    lhs = fvals.values * log_powers(n_max, h)
    denom = 1.0 + np.abs(lhs)
    return float(np.max(np.abs(lhs - conv.values) / denom))


def check_catalog_nonnegative():
    for name, f in _CHECK_FUNCS.items():
        vals = sieve_values(f, 10**4).values
        if np.any(vals < 0):
            return f"{name} has negative values"
    return None


def check_multiplicativity():
    rng = random.Random(20240117)
    n_max = 10**4
    for name, f in _CHECK_FUNCS.items():
        vals = sieve_values(f, n_max).values
        tried = 0
        while tried < 300:
            m = rng.randrange(2, 317)
            n = rng.randrange(2, n_max // m)
            if np.gcd(m, n) != 1:
                continue
            tried += 1
            lhs = vals[m * n]
            rhs = vals[m] * vals[n]
            if abs(lhs - rhs) > 1e-12 * (1.0 + abs(rhs)):
                return f"{name}: f({m}*{n}) = {lhs} but f({m})f({n}) = {rhs}"
    return None


def check_sieve_vs_enumeration():
    n_max = 10**5
    for name, f in _CHECK_FUNCS.items():
        vals = sieve_values(f, n_max).values
        bad = []

        def visit(n, v, _vals=vals, _bad=bad):
            if abs(_vals[n] - v) > 1e-12 * (1.0 + abs(v)):
                _bad.append(n)

        count = enumerate_support(f, n_max, visit)
        if bad:
            return f"{name}: sieve and enumeration disagree at n={bad[0]}"
        if count != int(np.count_nonzero(vals)):
            return f"{name}: enumeration visited {count}, sieve has "\
                f"{int(np.count_nonzero(vals))} nonzero entries"
    return None


def check_defining_identity():
    for name, f in _CHECK_FUNCS.items():
        for h in (1, 2, 3, 4):
            res = _identity_residual(f, h, _IDENTITY_N)
            if res > 1e-9:
                return f"{name}, h={h}: relative residual {res:.3e}"
    return None


def check_selberg_symmetry():
    n_max = _IDENTITY_N
    lam = np.zeros(n_max + 1)
    table = lambda_table(CATALOG["one"], n_max)
    lam[table.n] = np.log(table.p.astype(np.float64))
    lhs = lambda_fh(CATALOG["one"], 2, n_max).values
    conv = dirichlet_convolve(CoeffSeq(lam.copy()), CoeffSeq(lam.copy())).values
    rhs = lam * log_powers(n_max, 1) + conv
    err = float(np.max(np.abs(lhs - rhs)))
    return None if err <= 1e-9 else f"max deviation {err:.3e}"


def check_first_order_support():
    n_max = _IDENTITY_N
    is_pp = np.zeros(n_max + 1, dtype=bool)
    for name, f in _CHECK_FUNCS.items():
        lam = lambda_fh(f, 1, n_max).values
        table = lambda_table(f, n_max)
        is_pp[:] = False
        is_pp[table.n] = True
        off = lam[~is_pp]
        if np.any(off != 0.0):
            return f"{name}: first-order values off prime powers"
    return None


def check_partition_counts():
    expected = {1: 1, 2: 2, 3: 3, 4: 5, 5: 7, 6: 11}
    for h, want in expected.items():
        got = len(faa_terms(h))
        if got != want:
            return f"h={h}: {got} terms, expected {want}"
    return None


def check_compensated_order():
    x = 10**5
    for name, f in _CHECK_FUNCS.items():
        terms = []
        enumerate_support(f, x, lambda n, v: terms.append(v / n * log(n) if n > 1 else 0.0))
        fwd = compensated_sum(terms)
        rev = compensated_sum(reversed(terms))
        if abs(fwd - rev) > 1e-13 * (1.0 + abs(fwd)):
            return f"{name}: forward/reverse differ by {abs(fwd - rev):.3e}"
    return None


def check_binomial_moment_identity():
    u = log(10**4)
    for name, f in _CHECK_FUNCS.items():
        for k in range(5):
            res = check_binomial_moments(f, u, k)
            lhs = abs(weighted_sum(f, 10**4, k, "log_n"))
            if res > 1e-10 * (1.0 + lhs):
                return f"{name}, k={k}: residual {res:.3e}"
    return None


def check_g_series_monotone():
    grid = build_grid(10, 24, x_max=10**5)
    for name, f in _CHECK_FUNCS.items():
        for j in (0, 1, 2):
            s = g_log_series(f, j, grid).sums
            if np.any(s < -1e-12):
                return f"{name}, j={j}: negative values"
            if np.any(np.diff(s) < -1e-9 * (1.0 + np.abs(s[1:]))):
                return f"{name}, j={j}: not non-decreasing"
    return None


def check_roots_vieta():
    for h in (1, 2, 3):
        for kappa in (0.3, 0.5, 1.0, 2.0):
            rs = characteristic_roots(h, kappa)
            rhs = float(np.prod([kappa + j for j in range(h + 1)]))
            prod = complex(np.prod(rs.roots))
            want_prod = (-1.0) ** (h + 1) * (-rhs)
            want_sum = h * (h + 1) / 2.0
            got_sum = complex(np.sum(rs.roots))
            if abs(prod - want_prod) > 1e-8 * (1.0 + abs(want_prod)):
                return f"h={h}, kappa={kappa}: product of roots {prod}"
            if abs(got_sum - want_sum) > 1e-8 * (1.0 + abs(want_sum)):
                return f"h={h}, kappa={kappa}: sum of roots {got_sum}"
    return None


def check_root_translates():
    # kappa + h is always a translate; -kappa joins it exactly when h is odd
    # and 2*kappa is an integer (then -kappa = kappa - 2kappa).
    for h in (1, 2, 3):
        for kappa in (0.3, 0.5, 1.0, 2.0):
            rs = characteristic_roots(h, kappa)
            found = sorted(z.real for z, _ in rs.integer_translates())
            want = {kappa + h}
            if h % 2 == 1 and abs(2 * kappa - round(2 * kappa)) < 1e-12:
                want.add(-kappa)
            want = sorted(want)
            if len(found) != len(want) or any(
                abs(a - b) > 1e-8 for a, b in zip(found, want)
            ):
                return f"h={h}, kappa={kappa}: translates {found}, expected {want}"
    return None


def check_fit_scale_equivariance():
    grid = build_grid(1000, 24, x_max=10**6)
    t = np.log(grid.astype(np.float64))
    sums = 2.0 * t**2 + 0.25 * t
    series = SumSeries("synthetic", "logn_pow", 1, grid, sums)
    scaled = SumSeries("synthetic", "logn_pow", 1, grid, 8.0 * sums)
    fit1 = fit_expansion(series, 1.0, 0, margin=1.0)
    fit2 = fit_expansion(scaled, 1.0, 0, margin=1.0)
    if abs(fit2.C_hat - 8.0 * fit1.C_hat) > 1e-12 * abs(8.0 * fit1.C_hat):
        return f"C_hat not scale-equivariant: {fit1.C_hat} vs {fit2.C_hat}"
    return None


def check_euler_truncation_monotone():
    f = CATALOG["mu_sq"]
    values = []
    tail = 0.0
    for p_max in (10**3, 10**4, 10**5, 10**6):
        v, tail = euler_product(f, 1.0, p_max)
        values.append(v)
    floor_value = values[-1] - tail * values[-1]
    for a, b in zip(values, values[1:]):
        if a < b:
            return f"partial products not decreasing: {a} < {b}"
    if any(v < floor_value for v in values):
        return "partial product fell below the tail-bound floor"
    return None


def check_convolution_basics():
    n_max = 10**4
    e = CoeffSeq.unit(n_max)
    if float(np.max(np.abs(dirichlet_convolve(e, e).values - e.values))) != 0.0:
        return "unit element is not idempotent"
    ones = CoeffSeq(np.ones(n_max + 1))
    lam = lambda_dense(CATALOG["one"], n_max)
    logs = log_powers(n_max, 1)
    err = float(np.max(np.abs(dirichlet_convolve(lam, ones).values - logs)))
    return None if err <= 1e-10 else f"log identity deviation {err:.3e}"


CHECKS = [
    ("catalog_values_nonnegative", check_catalog_nonnegative),
    ("multiplicativity_random_pairs", check_multiplicativity),
    ("sieve_vs_enumeration_agreement", check_sieve_vs_enumeration),
    ("defining_identity_h1_to_h4", check_defining_identity),
    ("selberg_symmetry_crosscheck", check_selberg_symmetry),
    ("first_order_prime_power_support", check_first_order_support),
    ("partition_term_counts", check_partition_counts),
    ("compensated_sum_order_independence", check_compensated_order),
    ("binomial_log_moment_identity", check_binomial_moment_identity),
    ("g_series_nonnegative_monotone", check_g_series_monotone),
    ("roots_vieta", check_roots_vieta),
    ("root_integer_translates", check_root_translates),
    ("fit_scale_equivariance", check_fit_scale_equivariance),
    ("euler_product_truncation_monotone", check_euler_truncation_monotone),
    ("convolution_unit_and_log_identity", check_convolution_basics),
]


def run_selfcheck():
    """Run every invariant; returns a list of (name, ok, detail)."""
    results = []
    for name, fn in CHECKS:
        try:
            detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            detail = f"exception: {exc}"
        results.append((name, detail is None, detail))
    return results
