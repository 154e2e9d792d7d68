"""Streamed weighted partial sums and exact identity checks.

All sums run over the support of f via the compiled depth-first walk and
are accumulated with compensated summation, so results are deterministic
and insensitive to summation-order noise at the 1e-13 relative level.
Grid variants bin the stream once and combine bins in ascending order.
"""

from dataclasses import dataclass, field
from math import comb, exp, fsum, log

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError, NumericError
from .lambdaf import lambda_fh, lambda_table
from .mf import DENSE_LIMIT, MultiplicativeFunction, build_support_tables, sieve_values
from .sequences import log_powers

SERIES_KINDS = ("G_j", "logn_pow", "S_k", "lambda_fh_over_n")


def compensated_sum(values) -> float:
    """Neumaier-compensated sum of an iterable of floats, in iteration order."""
    s = 0.0
    c = 0.0
    for x in values:
        x = float(x)
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def build_grid(q_min, points, x_max=None, ratio=None) -> np.ndarray:
    """Geometric evaluation grid Q_i = round(q_min * r^i), deduplicated, int64.

    Either x_max (r is derived so the last point lands there) or an explicit
    ratio must be given.
    """
    q_min = float(q_min)
    points = int(points)
    if q_min < 2 or points < 2:
        raise DomainError("grid needs q_min >= 2 and points >= 2")
    if ratio is None:
        if x_max is None or float(x_max) <= q_min:
            raise DomainError("grid needs x_max > q_min (or an explicit ratio)")
        ratio = (float(x_max) / q_min) ** (1.0 / (points - 1))
    else:
        ratio = float(ratio)
        if ratio <= 1.0:
            raise DomainError("grid ratio must be > 1")
    pts = np.unique(
        np.array([round(q_min * ratio**i) for i in range(points)], dtype=np.int64)
    )
    return pts


@dataclass
class SumSeries:
    """A weighted partial-sum evaluation along an increasing grid."""

    f_name: str
    kind: str
    order: int
    grid: np.ndarray  # int64, strictly increasing, >= 1
    sums: np.ndarray  # float64, same length

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.int64)
        self.sums = np.asarray(self.sums, dtype=np.float64)
        if self.kind not in SERIES_KINDS:
            raise DomainError(f"unknown series kind {self.kind!r}")
        if self.grid.shape != self.sums.shape or self.grid.ndim != 1:
            raise DomainError("grid and sums must be 1-d arrays of equal length")
        if self.grid.shape[0] == 0 or self.grid[0] < 1:
            raise DomainError("grid must be non-empty with entries >= 1")
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("grid must be strictly increasing")


def _grid_moments(f: MultiplicativeFunction, grid: np.ndarray, t_max: int) -> np.ndarray:
    """Cumulative sums over the grid of f(n)/n (log n)^t for t = 0..t_max.

    Returns shape (len(grid), t_max + 1); bins are combined in ascending
    order through exact (fsum) reduction of the compensated bin partials.
    """
    grid = np.asarray(grid, dtype=np.int64)
    limit = int(grid[-1])
    tabs = build_support_tables(f, limit)
    sums, comps = _kernels.stream_binned_moments(
        tabs.primes, tabs.fp, tabs.hp_off, tabs.hp_val, limit, grid, t_max
    )
    npts = grid.shape[0]
    out = np.empty((npts, t_max + 1))
    for t in range(t_max + 1):
        parts = []
        for b in range(npts):
            parts.append(float(sums[b, t]))
            parts.append(float(comps[b, t]))
            out[b, t] = fsum(parts)
    return out


def _logx_powers(f: MultiplicativeFunction, limit: int, logx: float, j_max: int) -> np.ndarray:
    sums, comps = _kernels.stream_logx_powers(
        *_tabs_args(f, limit), limit, logx, j_max
    )
    return sums + comps


def _tabs_args(f, limit):
    tabs = build_support_tables(f, limit)
    return tabs.primes, tabs.fp, tabs.hp_off, tabs.hp_val


def weighted_sum(f: MultiplicativeFunction, x: float, k: int, weight: str) -> float:
    """sum_{n <= x} f(n)/n * w(n)^k with w = log n or w = log(x/n)."""
    x = float(x)
    if x < 1:
        raise DomainError("x must be >= 1")
    if k < 0 or int(k) != k:
        raise DomainError("k must be a non-negative integer")
    limit = int(x)
    if weight == "log_n":
        moments = _grid_moments(f, np.array([limit], dtype=np.int64), int(k))
        return float(moments[0, k])
    if weight == "log_X_over_n":
        vals = _logx_powers(f, limit, log(x), int(k))
        return float(vals[k])
    raise DomainError(f"unknown weight {weight!r} (log_n | log_X_over_n)")


def logn_power_series(f: MultiplicativeFunction, k: int, grid) -> SumSeries:
    """Series of sum_{n <= Q} f(n)/n (log n)^k along the grid."""
    grid = np.asarray(grid, dtype=np.int64)
    moments = _grid_moments(f, grid, int(k))
    return SumSeries(f.name, "logn_pow", int(k), grid, moments[:, k])


def g_log_series(f: MultiplicativeFunction, j: int, grid) -> SumSeries:
    """Series of sum_{n <= Q} f(n)/n log^j(Q/n) along the grid.

    Evaluated through the binomial expansion of (log Q - log n)^j from the
    binned log-moments, so one pass over the support serves every grid point.
    """
    grid = np.asarray(grid, dtype=np.int64)
    j = int(j)
    moments = _grid_moments(f, grid, j)
    out = np.empty(grid.shape[0])
    for idx in range(grid.shape[0]):
        lq = log(float(grid[idx]))
        out[idx] = fsum(
            comb(j, t) * (-1.0) ** t * lq ** (j - t) * moments[idx, t]
            for t in range(j + 1)
        )
    return SumSeries(f.name, "G_j", j, grid, out)


# ---------------------------------------------------------------------------
# Prime-power sums
# ---------------------------------------------------------------------------


def _lambda_weights(f: MultiplicativeFunction, q_limit: int, k: int):
    """Sorted prime powers n <= q_limit and weights lam(n) (log n)^k / n."""
    table = lambda_table(f, q_limit)
    n = table.n.astype(np.float64)
    w = table.values / n
    if k > 0:
        w = w * np.log(n) ** k
    return table.n, w


def s_k_sum(f: MultiplicativeFunction, q: float, k: int = 0) -> float:
    """sum over prime powers n <= q of lam(n) (log n)^k / n."""
    q = float(q)
    if q < 1:
        raise DomainError("q must be >= 1")
    if int(q) < 2:
        return 0.0
    _, w = _lambda_weights(f, int(q), int(k))
    return fsum(map(float, w))


def s_k_series(f: MultiplicativeFunction, k: int, grid) -> SumSeries:
    grid = np.asarray(grid, dtype=np.int64)
    if int(grid[-1]) < 2:
        return SumSeries(f.name, "S_k", int(k), grid, np.zeros(grid.shape[0]))
    ns, w = _lambda_weights(f, int(grid[-1]), int(k))
    edges = np.searchsorted(ns, grid, side="right")
    out = np.empty(grid.shape[0])
    parts = []
    prev = 0
    for i, e in enumerate(edges):
        parts.extend(map(float, w[prev:e]))
        out[i] = fsum(parts)
        prev = int(e)
    return SumSeries(f.name, "S_k", int(k), grid, out)


def lambda_fh_over_n_sum(f: MultiplicativeFunction, h: int, x: float) -> float:
    """sum_{n <= x} lam_h(n) / n (needs the dense sequence, so x is capped)."""
    x = float(x)
    if x < 1:
        raise DomainError("x must be >= 1")
    if x > DENSE_LIMIT:
        raise CapacityError(f"x {x} exceeds the dense limit {DENSE_LIMIT}")
    limit = int(x)
    seq = lambda_fh(f, h, limit)
    weights = seq.values[1:] / np.arange(1, limit + 1, dtype=np.float64)
    return float(_kernels.kahan_sum(weights))


def lambda_fh_over_n_series(f: MultiplicativeFunction, h: int, grid) -> SumSeries:
    grid = np.asarray(grid, dtype=np.int64)
    limit = int(grid[-1])
    if limit > DENSE_LIMIT:
        raise CapacityError(f"grid max {limit} exceeds the dense limit {DENSE_LIMIT}")
    seq = lambda_fh(f, h, limit)
    weights = np.zeros(limit + 1)
    weights[1:] = seq.values[1:] / np.arange(1, limit + 1, dtype=np.float64)
    out = np.empty(grid.shape[0])
    parts = []
    prev = 1
    for i, q in enumerate(grid):
        parts.append(float(_kernels.kahan_sum(weights[prev : int(q) + 1])))
        out[i] = fsum(parts)
        prev = int(q) + 1
    return SumSeries(f.name, "lambda_fh_over_n", int(h), grid, out)


# ---------------------------------------------------------------------------
# Hypothesis measurement
# ---------------------------------------------------------------------------


@dataclass
class HypothesisReport:
    """Measured constants of the prime-sum hypothesis for a claimed kappa."""

    f_name: str
    kappa: float
    h: int
    eta0_hat: float
    A_hat: float
    eta_k_hat: np.ndarray  # k = 0..h, estimated at the largest grid point
    max_scaled_residual: float
    grid_size: int
    grid: np.ndarray = field(repr=False, default=None)
    s0: np.ndarray = field(repr=False, default=None)
    scaled_residuals: np.ndarray = field(repr=False, default=None)


def check_hypothesis(f: MultiplicativeFunction, kappa: float, h: int, grid) -> HypothesisReport:
    """Estimate eta_0 and the envelope constant A from S_0 along the grid.

    eta_0 is read off at the largest grid point, where the remainder is
    smallest; A_hat is the max of |S_0(Q) - kappa log Q - eta_0| (log 2Q)^h,
    so max_scaled_residual <= A_hat holds by construction.
    """
    grid = np.asarray(grid, dtype=np.int64)
    if grid.shape[0] == 0:
        raise DomainError("empty grid")
    if np.any(np.diff(grid) <= 0) or grid[0] < 1:
        raise DomainError("grid must be strictly increasing with entries >= 1")
    if int(grid[-1]) < 1000:
        raise DomainError("grid must reach at least 10^3")
    kappa = float(kappa)
    h = int(h)
    s0 = s_k_series(f, 0, grid).sums
    q = grid.astype(np.float64)
    q_max = float(q[-1])
    eta0 = float(s0[-1] - kappa * log(q_max))
    scaled = np.abs(s0 - kappa * np.log(q) - eta0) * np.log(2.0 * q) ** h
    a_hat = float(np.max(scaled))
    eta_k = np.empty(h + 1)
    eta_k[0] = eta0
    for k in range(1, h + 1):
        sk = s_k_sum(f, q_max, k)
        eta_k[k] = sk - kappa / (k + 1) * log(q_max) ** (k + 1)
    return HypothesisReport(
        f_name=f.name,
        kappa=kappa,
        h=h,
        eta0_hat=eta0,
        A_hat=a_hat,
        eta_k_hat=eta_k,
        max_scaled_residual=a_hat,
        grid_size=int(grid.shape[0]),
        grid=grid,
        s0=s0,
        scaled_residuals=scaled,
    )


# ---------------------------------------------------------------------------
# Exact identity checks
# ---------------------------------------------------------------------------


def _adaptive_simpson(fn, a, b, tol, max_depth=40):
    """Classic recursive adaptive Simpson with absolute tolerance."""
    fa, fm, fb = fn(a), fn(0.5 * (a + b)), fn(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = left + right - whole
        if abs(err) <= 15.0 * tol or (b - a) < 1e-13 * max(1.0, abs(m)):
            return left + right + err / 15.0
        if depth <= 0:
            raise NumericError(
                f"adaptive Simpson failed to converge on [{a}, {b}] "
                f"(residual {abs(err):.3e}, tolerance {tol:.3e})"
            )
        return rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(
            m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
        )

    return rec(a, b, fa, fm, fb, whole, tol, max_depth)


def check_integral_iteration(f: MultiplicativeFunction, x: float, k: int, quad_tol: float = 1e-6) -> float:
    """|G_k(X) - k * integral_1^X G_{k-1}(t) dt/t| via adaptive quadrature.

    The integrand is piecewise smooth with breakpoints at the support of f,
    so each inter-support piece gets an equal share of the absolute
    tolerance budget.
    """
    x = float(x)
    if x < 1:
        raise DomainError("x must be >= 1")
    if k < 1:
        raise DomainError("k must be >= 1")
    if quad_tol <= 0:
        raise DomainError("quad_tol must be positive")
    limit = int(x)
    lhs = weighted_sum(f, x, k, "log_X_over_n")

    vals = sieve_values(f, limit).values
    g = np.zeros(limit + 1)
    g[1:] = vals[1:] / np.arange(1, limit + 1, dtype=np.float64)
    prefix = np.empty((k, limit + 1))
    for t in range(k):
        prefix[t] = np.cumsum(g * log_powers(limit, t))

    binom = [comb(k - 1, t) * (-1.0) ** t for t in range(k)]

    support = np.flatnonzero(vals != 0.0)
    breaks = sorted({1.0, x} | {float(n) for n in support if 1 <= n <= x})
    pieces = [(breaks[i], breaks[i + 1]) for i in range(len(breaks) - 1)]
    pieces = [(a, b) for a, b in pieces if b > a]
    if not pieces:
        return abs(lhs)
    tol_piece = quad_tol / len(pieces)

    def make_integrand(base_idx):
        # On an inter-support piece the prefix level is frozen, so the
        # integrand is an analytic function of log t (no endpoint jump).
        levels = [prefix[j, base_idx] for j in range(k)]

        def integrand(t):
            lt = log(t)
            return fsum(binom[j] * lt ** (k - 1 - j) * levels[j] for j in range(k)) / t

        return integrand

    integral = fsum(
        _adaptive_simpson(make_integrand(int(a)), a, b, tol_piece) for a, b in pieces
    )
    return abs(lhs - k * integral)


def check_binomial_moments(f: MultiplicativeFunction, u: float, k: int) -> float:
    """Residual of the binomial identity between log-n moments and log(X/n) sums.

    Both sides stream the support independently:
        LHS = sum_{n <= e^u} f(n)/n (log n)^k,
        RHS = sum_j C(k, j) u^j (-1)^(k-j) G_{k-j}(e^u).
    """
    u = float(u)
    if u <= 0:
        raise DomainError("u must be positive")
    if k < 0:
        raise DomainError("k must be >= 0")
    k = int(k)
    limit = int(exp(u))
    lhs = float(_grid_moments(f, np.array([limit], dtype=np.int64), k)[0, k])
    gvec = _logx_powers(f, limit, u, k)
    rhs = fsum(
        comb(k, j) * u**j * (-1.0) ** (k - j) * float(gvec[k - j]) for j in range(k + 1)
    )
    return abs(lhs - rhs)
