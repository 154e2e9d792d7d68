from math import gamma, log, pi, sqrt

import numpy as np
import pytest

from mangoldt import (
    CATALOG,
    DEFAULT_MARGIN,
    DomainError,
    NumericError,
    build_grid,
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
    weighted_sum,
)
from mangoldt.sums import SumSeries


# --- gamma -------------------------------------------------------------------


def test_gamma_classics():
    assert gamma_eval(1.0) == 1.0
    assert gamma_eval(5.0) == 24.0
    assert gamma_eval(0.5) == pytest.approx(sqrt(pi), rel=1e-14)
    assert gamma_eval(3.7) == pytest.approx(gamma(3.7), rel=0)
    with pytest.raises(DomainError):
        gamma_eval(0.0)
    with pytest.raises(DomainError):
        gamma_eval(-2.5)


# --- Euler products ----------------------------------------------------------


def test_euler_product_exact_cancellations():
    v, tail = euler_product(CATALOG["one"], 1.0, 10**4)
    assert v == pytest.approx(1.0, abs=1e-9)
    assert tail <= 1e-9
    v, tail = euler_product(CATALOG["tau_2"], 2.0, 10**4)
    assert v == pytest.approx(1.0, abs=1e-9)
    assert tail <= 1e-9


def test_euler_product_mu_sq_zeta2():
    # oracle: prod_p (1 - 1/p^2) = 1/zeta(2) = 6/pi^2
    v, tail = euler_product(CATALOG["mu_sq"], 1.0, 10**6)
    assert abs(v - 6 / pi**2) <= tail * v
    assert v == pytest.approx(6 / pi**2, abs=1e-6)


def test_euler_product_monotone_truncation():
    vals = []
    tail = 0.0
    for p_max in (10**3, 10**4, 10**5, 10**6):
        v, tail = euler_product(CATALOG["mu_sq"], 1.0, p_max)
        vals.append(v)
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    floor = vals[-1] * (1 - tail)
    assert all(v >= floor for v in vals)


def test_euler_product_errors():
    with pytest.raises(DomainError):
        euler_product(CATALOG["one"], 1.0, 50)
    # f(p^k) growing like p^k makes the local sums non-summable
    from mangoldt.mf import MultiplicativeFunction

    bad = MultiplicativeFunction("diverge", lambda p, k: float(p) ** k, 1.0)
    with pytest.raises(NumericError):
        euler_product(bad, 1.0, 100)
    # a signed f can drive a local factor to zero: log-space breaks down
    signed = MultiplicativeFunction(
        "signed", lambda p, k: -2.0 if k == 1 else 0.0, 1.0,
        support_hint="squarefree_sparse",
    )
    with pytest.raises(DomainError):
        euler_product(signed, 1.0, 100)


# --- predicted leading coefficients -----------------------------------------


def test_theoretical_leading_examples():
    assert theoretical_leading(CATALOG["delta_1"], 0.0, 3) == 0.0
    lead = theoretical_leading(CATALOG["mu_sq"], 1.0, 0)
    assert lead == pytest.approx((6 / pi**2) / 2, abs=2e-6)
    lead = theoretical_leading(CATALOG["one"], 1.0, 0)
    assert lead == pytest.approx(0.5, abs=1e-9)
    lead = theoretical_leading(CATALOG["tau_2"], 2.0, 0)
    assert lead == pytest.approx(1 / 3, abs=1e-9)


def test_theoretical_leading_brute_force_one():
    # sum_{n<=X} log(n)/n = (log X)^2/2 + O(1): the measured ratio approaches 1/2
    x = 10**6
    s = weighted_sum(CATALOG["one"], x, 1, "log_n")
    lead = theoretical_leading(CATALOG["one"], 1.0, 0)
    assert abs(s - lead * log(x) ** 2) <= 1.0
    assert s / log(x) ** 2 == pytest.approx(lead, rel=1e-3)


def test_mean_value_constant():
    assert mean_value_constant(CATALOG["one"], 1.0) == pytest.approx(1.0, abs=1e-9)
    assert mean_value_constant(CATALOG["mu_sq"], 1.0) == pytest.approx(
        6 / pi**2, abs=1e-5
    )


def test_falling_leading():
    assert falling_leading(1.0, 0) == 1.0
    assert falling_leading(1.0, 1) == 1.0
    assert falling_leading(1.0, 2) == 1.0  # kappa (kappa+1) / 2 = 1 at kappa = 1
    assert falling_leading(0.5, 2) == pytest.approx(0.5 * 1.5 / 2)
    assert falling_leading(0.0, 2) == 0.0


# --- characteristic roots ----------------------------------------------------


def test_roots_h1_kappa1():
    rs = characteristic_roots(1, 1.0)
    assert rs.roots[0] == pytest.approx(2.0, abs=1e-9)
    assert rs.roots[1] == pytest.approx(-1.0, abs=1e-9)


def test_roots_degenerate_order():
    rs = characteristic_roots(0, 0.7)
    assert rs.roots.tolist() == [0.7 + 0j]


def test_roots_h2_kappa1():
    # lam^3 - 3 lam^2 + 2 lam - 6 = (lam - 3)(lam^2 + 2)
    rs = characteristic_roots(2, 1.0)
    got = sorted((round(z.real, 9), round(z.imag, 9)) for z in rs.roots)
    want = sorted(
        [(3.0, 0.0), (0.0, round(sqrt(2), 9)), (0.0, round(-sqrt(2), 9))]
    )
    assert got == want


def test_roots_residual_invariant():
    for h in (1, 2, 3):
        for kappa in (0.3, 0.5, 1.0, 2.0):
            rs = characteristic_roots(h, kappa)
            bound = 1e-9 * (1.0 + np.abs(rs.roots)) ** (h + 1)
            assert np.all(rs.residuals() <= bound), (h, kappa)
            assert any(abs(z - (kappa + h)) <= 1e-9 for z in rs.roots)


def test_roots_vieta():
    for h in (1, 2, 3):
        for kappa in (0.3, 0.5, 1.0, 2.0):
            rs = characteristic_roots(h, kappa)
            rhs = float(np.prod([kappa + j for j in range(h + 1)]))
            want_prod = (-1.0) ** (h + 1) * (-rhs)
            want_sum = h * (h + 1) / 2.0
            assert complex(np.prod(rs.roots)) == pytest.approx(
                want_prod, abs=1e-8 * (1 + abs(want_prod))
            )
            assert complex(np.sum(rs.roots)) == pytest.approx(
                want_sum, abs=1e-8 * (1 + abs(want_sum))
            )


def test_root_integer_translates():
    # kappa + h always; -kappa is a root for odd h and lands in kappa + Z
    # exactly when 2 kappa is an integer.
    for h in (1, 2, 3):
        for kappa in (0.3, 0.5, 1.0, 2.0):
            rs = characteristic_roots(h, kappa)
            got = sorted(z.real for z, _ in rs.integer_translates())
            want = {kappa + h}
            if h % 2 == 1 and float(2 * kappa).is_integer():
                want.add(-kappa)
            assert got == pytest.approx(sorted(want), abs=1e-8), (h, kappa)


def test_roots_sorted_and_errors():
    rs = characteristic_roots(3, 0.5)
    reals = [z.real for z in rs.roots]
    assert reals == sorted(reals, reverse=True)
    with pytest.raises(DomainError):
        characteristic_roots(-1, 1.0)
    with pytest.raises(DomainError):
        characteristic_roots(1, -0.5)


# --- fitting ------------------------------------------------------------------


def _synthetic_series(grid, coeffs, kappa, h):
    t = np.log(grid.astype(float))
    sums = np.zeros(len(grid))
    for c, coef in enumerate(coeffs):
        sums += coef * t ** (kappa + h + 1 - c)
    return SumSeries("synthetic", "logn_pow", h + 1, grid, sums)


def test_fit_exact_recovery():
    grid = build_grid(1000, 24, x_max=10**6)
    series = _synthetic_series(grid, [2.0], 1.0, 0)
    fit = fit_expansion(series, 1.0, 0, margin=DEFAULT_MARGIN)
    assert fit.C_hat == pytest.approx(2.0, rel=1e-9)
    assert np.max(np.abs(fit.residuals)) <= 1e-9 * 2.0
    assert fit.envelope_ok


def test_fit_recovers_a_coefficients():
    grid = build_grid(1000, 32, x_max=10**7)
    series = _synthetic_series(grid, [1.5, 0.75, -0.3], 0.5, 2)
    fit = fit_expansion(series, 0.5, 2, margin=DEFAULT_MARGIN)
    assert fit.C_hat == pytest.approx(1.5, rel=1e-9)
    assert fit.a_hat[0] == pytest.approx(0.75 / 1.5, rel=1e-7)
    assert fit.a_hat[1] == pytest.approx(-0.3 / 1.5, rel=1e-6)
    assert fit.envelope_exponent == (2 + 2) * (2 + 1) / 2


def test_fit_zero_data():
    grid = build_grid(1000, 24, x_max=10**6)
    series = SumSeries("zero", "logn_pow", 2, grid, np.zeros(len(grid)))
    fit = fit_expansion(series, 0.0, 1, margin=DEFAULT_MARGIN)
    assert abs(fit.C_hat) <= 1e-9
    assert np.all(fit.a_hat == 0.0)
    assert fit.envelope_ok


def test_fit_scale_equivariance():
    grid = build_grid(1000, 24, x_max=10**6)
    t = np.log(grid.astype(float))
    sums = 2.0 * t**3 + 0.5 * t**2 - 1.0 * t
    s1 = SumSeries("s", "logn_pow", 2, grid, sums)
    s2 = SumSeries("s", "logn_pow", 2, grid, 64.0 * sums)
    f1 = fit_expansion(s1, 1.0, 1, margin=DEFAULT_MARGIN)
    f2 = fit_expansion(s2, 1.0, 1, margin=DEFAULT_MARGIN)
    assert f2.C_hat == pytest.approx(64.0 * f1.C_hat, rel=1e-12)
    assert np.allclose(f2.a_hat, f1.a_hat, rtol=1e-12, atol=1e-12)
    assert np.allclose(np.abs(f2.residuals), 64.0 * np.abs(f1.residuals), rtol=1e-9, atol=1e-12)


def test_fit_preconditions():
    grid = build_grid(1000, 24, x_max=10**6)
    series = _synthetic_series(grid, [1.0], 1.0, 0)
    with pytest.raises(DomainError):
        fit_expansion(series, 1.0, 1, margin=1.0)  # order mismatch
    short = _synthetic_series(build_grid(1000, 9, x_max=2000), [1.0], 1.0, 0)
    with pytest.raises(DomainError):
        fit_expansion(short, 1.0, 0, margin=1.0)  # spans < 2 decades
    few = _synthetic_series(build_grid(1000, 3, x_max=10**6), [1.0], 1.0, 0)
    with pytest.raises(DomainError):
        fit_expansion(few, 1.0, 0, margin=1.0)


def test_reference_margin_positive():
    grid = build_grid(1000, 16, x_max=10**5)
    m = reference_margin(0, grid)
    assert m > 0.0


# --- verify -------------------------------------------------------------------


def test_verify_delta_1_all_zero():
    rep = verify_theorem(CATALOG["delta_1"], 0.0, 1, 10**5, points=16)
    assert rep.failures == []
    assert rep.fit.C_hat == pytest.approx(0.0, abs=1e-9)
    assert rep.rel_gap == pytest.approx(0.0, abs=1e-9)
    assert rep.fit.envelope_ok
    assert rep.lambda_sum_gap == pytest.approx(0.0, abs=1e-12)
    assert rep.hypothesis.A_hat == 0.0


def test_verify_report_json_shape():
    rep = verify_theorem(CATALOG["mu_sq"], 1.0, 1, 10**5, points=16)
    d = report_to_json_dict(rep)
    assert list(d.keys()) == [
        "function",
        "kappa",
        "h",
        "X_max",
        "eta0_hat",
        "A_hat",
        "C_hat",
        "C_theoretical",
        "rel_gap",
        "a_hat",
        "envelope_ok",
        "roots",
        "lambda_sum_gap",
        "C_mean_value",
        "margin",
        "failures",
    ]
    assert d["function"] == "mu_sq"
    assert isinstance(d["roots"], list) and len(d["roots"]) == 2
    assert d["failures"] == []


def test_verify_h0_lambda_sum_short_circuit():
    rep = verify_theorem(CATALOG["mu_sq"], 1.0, 0, 10**5, points=16)
    assert rep.lambda_sum_fitted == 1.0
    assert rep.lambda_sum_gap == 0.0


def test_verify_partial_report_on_component_failure():
    # a divergent Euler product must flag the constant stage but leave the
    # rest of the report intact
    from mangoldt.mf import MultiplicativeFunction

    grows = MultiplicativeFunction(
        "grows",
        lambda p, k: 2.0**k,
        kappa_claimed=2.0,
        prime_batch=lambda ps: np.full(ps.shape[0], 2.0),
    )
    rep = verify_theorem(grows, 2.0, 1, 10**6, points=16)
    assert any(flag.startswith("constant:") for flag in rep.failures)
    assert rep.C_theoretical is None
    assert rep.fit is not None and rep.hypothesis is not None
    d = report_to_json_dict(rep)
    assert d["C_theoretical"] is None
    assert d["C_hat"] is not None


def test_verify_parameter_validation():
    with pytest.raises(DomainError):
        verify_theorem(CATALOG["one"], 1.0, 1, 10.0)  # x < q_min
    with pytest.raises(DomainError):
        verify_theorem(CATALOG["one"], 1.0, 1, 10**5, points=4)
