from math import fsum, log

import numpy as np
import pytest

from mangoldt import (
    CATALOG,
    DomainError,
    build_grid,
    check_integral_iteration,
    check_hypothesis,
    check_binomial_moments,
    compensated_sum,
    enumerate_support,
    g_log_series,
    lambda_fh_over_n_sum,
    lambda_fh_over_n_series,
    logn_power_series,
    s_k_series,
    s_k_sum,
    sieve_values,
    weighted_sum,
)
from mangoldt.sums import SumSeries


def _weighted_brute(f, x, k, weight):
    """Independent oracle: dense sieve + fsum in ascending n."""
    limit = int(x)
    vals = sieve_values(f, limit).values
    terms = []
    for n in range(1, limit + 1):
        if vals[n] != 0.0:
            w = log(n) if weight == "log_n" else log(x / n)
            terms.append(vals[n] / n * w**k)
    return fsum(terms)


# --- weighted_sum -----------------------------------------------------------


def test_weighted_sum_examples():
    assert weighted_sum(CATALOG["delta_1"], 7.5, 1, "log_X_over_n") == pytest.approx(
        log(7.5), abs=1e-15
    )
    oracle = log(4) + log(2) / 2 + log(4 / 3) / 3  # three squarefree terms
    got = weighted_sum(CATALOG["mu_sq"], 4, 1, "log_X_over_n")
    assert got == pytest.approx(oracle, abs=1e-14)
    assert got == pytest.approx(1.8287619755504568, abs=1e-12)
    assert weighted_sum(CATALOG["one"], 2, 0, "log_n") == 1.5
    assert weighted_sum(CATALOG["one"], 2, 0, "log_X_over_n") == 1.5


def test_weighted_sum_against_brute(catalog):
    for name, f in catalog.items():
        for k in (0, 1, 3):
            for weight in ("log_n", "log_X_over_n"):
                got = weighted_sum(f, 3000.0, k, weight)
                want = _weighted_brute(f, 3000.0, k, weight)
                assert got == pytest.approx(want, rel=1e-12, abs=1e-12), (name, k, weight)


def test_weighted_sum_errors():
    with pytest.raises(DomainError):
        weighted_sum(CATALOG["one"], 0.5, 1, "log_n")
    with pytest.raises(DomainError):
        weighted_sum(CATALOG["one"], 10, 1, "bogus")


# --- prime-power sums -------------------------------------------------------


def test_s_k_examples():
    assert s_k_sum(CATALOG["one"], 3, 0) == pytest.approx(
        log(2) / 2 + log(3) / 3, abs=1e-15
    )
    assert s_k_sum(CATALOG["mu_sq"], 1, 4) == 0.0
    assert s_k_sum(CATALOG["mu_sq"], 4, 0) == pytest.approx(
        log(2) / 2 + log(3) / 3 - log(2) / 4, abs=1e-15
    )


def test_s_k_series_matches_pointwise():
    grid = build_grid(10, 12, x_max=10**4)
    series = s_k_series(CATALOG["mu_sq"], 1, grid)
    for q, s in zip(series.grid, series.sums):
        assert s == pytest.approx(s_k_sum(CATALOG["mu_sq"], float(q), 1), abs=1e-13)


def test_lambda_fh_over_n_examples():
    assert lambda_fh_over_n_sum(CATALOG["delta_1"], 2, 10**4) == 0.0
    got = lambda_fh_over_n_sum(CATALOG["one"], 1, 3)
    assert got == pytest.approx(s_k_sum(CATALOG["one"], 3, 0), abs=1e-15)
    got = lambda_fh_over_n_sum(CATALOG["one"], 2, 4)
    want = log(2) ** 2 / 2 + log(3) ** 2 / 3 + 3 * log(2) ** 2 / 4
    assert got == pytest.approx(want, abs=1e-14)


def test_lambda_fh_over_n_series_matches_pointwise():
    grid = build_grid(5, 10, x_max=2000)
    series = lambda_fh_over_n_series(CATALOG["mu_sq"], 2, grid)
    for q, s in zip(series.grid, series.sums):
        assert s == pytest.approx(
            lambda_fh_over_n_sum(CATALOG["mu_sq"], 2, float(q)), abs=1e-12
        )


# --- grids and series -------------------------------------------------------


def test_build_grid():
    grid = build_grid(1000, 64, x_max=10**7)
    assert grid[0] == 1000 and grid[-1] == 10**7
    assert len(grid) == 64
    assert np.all(np.diff(grid) > 0)
    with pytest.raises(DomainError):
        build_grid(1, 64, x_max=100)
    with pytest.raises(DomainError):
        build_grid(1000, 64)


def test_series_validation():
    with pytest.raises(DomainError):
        SumSeries("x", "nope", 0, np.array([1, 2]), np.array([0.0, 0.0]))
    with pytest.raises(DomainError):
        SumSeries("x", "G_j", 0, np.array([2, 2]), np.array([0.0, 0.0]))


def test_g_series_monotone_nonnegative(catalog):
    grid = build_grid(10, 16, x_max=10**4)
    for name, f in catalog.items():
        for j in (0, 1, 2):
            s = g_log_series(f, j, grid).sums
            assert np.all(s >= -1e-12), (name, j)
            assert np.all(np.diff(s) >= -1e-9 * (1 + np.abs(s[1:]))), (name, j)


def test_g_series_matches_direct_single_x():
    grid = build_grid(10, 10, x_max=10**4)
    for j in (1, 2):
        series = g_log_series(CATALOG["mu_sq"], j, grid)
        for q, s in zip(series.grid, series.sums):
            direct = weighted_sum(CATALOG["mu_sq"], float(q), j, "log_X_over_n")
            assert s == pytest.approx(direct, rel=1e-11, abs=1e-11)


def test_logn_series_cumulative():
    grid = build_grid(10, 10, x_max=10**4)
    series = logn_power_series(CATALOG["tau_2"], 2, grid)
    for q, s in zip(series.grid, series.sums):
        assert s == pytest.approx(
            weighted_sum(CATALOG["tau_2"], float(q), 2, "log_n"), rel=1e-13, abs=1e-13
        )


# --- compensation -----------------------------------------------------------


def test_compensated_sum_order_independence(catalog):
    x = 10**6
    for name, f in catalog.items():
        terms = []
        enumerate_support(f, x, lambda n, v: terms.append(v / n * log(n)))
        fwd = compensated_sum(terms)
        rev = compensated_sum(reversed(terms))
        assert abs(fwd - rev) <= 1e-13 * (1.0 + abs(fwd)), name


def test_compensated_sum_hard_case():
    # 1 + 1e-16 repeated: plain summation loses the tail, compensation keeps it
    terms = [1.0] + [1e-16] * 10**4
    assert compensated_sum(terms) == pytest.approx(1.0 + 1e-12, rel=1e-15)


# --- hypothesis --------------------------------------------------------------


def test_hypothesis_delta_1():
    grid = build_grid(1000, 16, x_max=10**5)
    rep = check_hypothesis(CATALOG["delta_1"], 0.0, 2, grid)
    assert rep.eta0_hat == 0.0
    assert rep.A_hat == 0.0
    assert rep.max_scaled_residual == 0.0


def test_hypothesis_one_constant():
    # S_0(Q) - log Q converges to -euler_gamma; frozen measured value at 1e6
    grid = build_grid(1000, 32, x_max=10**6)
    rep = check_hypothesis(CATALOG["one"], 1.0, 1, grid)
    assert rep.eta0_hat == pytest.approx(-0.5772156649, abs=5e-3)
    assert rep.A_hat >= rep.max_scaled_residual  # equality by construction
    assert rep.grid_size == 32
    assert rep.eta_k_hat[0] == rep.eta0_hat


def test_hypothesis_scaled_residual_construction():
    grid = build_grid(1000, 24, x_max=10**6)
    rep = check_hypothesis(CATALOG["mu_sq"], 1.0, 1, grid)
    assert np.isfinite(rep.A_hat)
    assert rep.max_scaled_residual <= rep.A_hat
    # recompute the invariant directly
    q = rep.grid.astype(float)
    scaled = np.abs(rep.s0 - 1.0 * np.log(q) - rep.eta0_hat) * np.log(2 * q) ** 1
    assert rep.A_hat == pytest.approx(float(np.max(scaled)), rel=1e-15)


def test_hypothesis_errors():
    with pytest.raises(DomainError):
        check_hypothesis(CATALOG["one"], 1.0, 1, np.array([], dtype=np.int64))
    with pytest.raises(DomainError):
        check_hypothesis(CATALOG["one"], 1.0, 1, np.array([10, 100]))


# --- exact identity checks ---------------------------------------------------


def test_integral_iteration_delta_1():
    # G_0 == 1 for t >= 1, so the integral is exactly log X
    assert check_integral_iteration(CATALOG["delta_1"], 50.0, 1, 1e-6) <= 1e-6 + 1e-12 * log(50)


def test_integral_iteration_examples():
    for name in ("one", "mu_sq"):
        f = CATALOG[name]
        for k in (1, 2):
            x = 10**3
            res = check_integral_iteration(f, x, k, 1e-6)
            g_val = abs(weighted_sum(f, x, k, "log_X_over_n"))
            assert res <= 1e-6 * (1 + g_val), (name, k, res)


def test_integral_iteration_errors():
    with pytest.raises(DomainError):
        check_integral_iteration(CATALOG["one"], 100.0, 0, 1e-6)
    with pytest.raises(DomainError):
        check_integral_iteration(CATALOG["one"], 100.0, 1, -1.0)


def test_binomial_moments_zero_order_exact():
    for f in (CATALOG["one"], CATALOG["mu_sq"]):
        assert check_binomial_moments(f, 3.0, 0) == 0.0


def test_binomial_moments_examples():
    res = check_binomial_moments(CATALOG["mu_sq"], log(10**4), 3)
    lhs = abs(weighted_sum(CATALOG["mu_sq"], 10**4, 3, "log_n"))
    assert res <= 1e-10 * (1 + lhs)

    res = check_binomial_moments(CATALOG["one"], log(10**3), 2)
    lhs = abs(weighted_sum(CATALOG["one"], 10**3, 2, "log_n"))
    assert res <= 1e-10 * (1 + lhs)


def test_binomial_moments_all_catalog(catalog):
    u = log(10**4)
    for name, f in catalog.items():
        for k in range(5):
            res = check_binomial_moments(f, u, k)
            lhs = abs(weighted_sum(f, 10**4, k, "log_n"))
            assert res <= 1e-10 * (1 + lhs), (name, k, res)


def test_binomial_moments_errors():
    with pytest.raises(DomainError):
        check_binomial_moments(CATALOG["one"], 0.0, 2)
