"""Generalized von Mangoldt functions.

For a multiplicative f with Dirichlet series F, the coefficients of
-F'/F form a function supported on prime powers (the classical von
Mangoldt function when f = 1).  Values on powers of a fixed prime depend
only on the local factor and satisfy the triangular recursion

    lam(p^m) = m f(p^m) log p - sum_{j=1}^{m-1} lam(p^j) f(p^(m-j)),

always solvable because the coefficient of the new unknown is f(1) = 1.

The higher-order variants satisfying f * log^h = f (star) lam_h are
assembled from partition-indexed products of derivative sequences of
-F'/F, with exact rational combinatorial coefficients.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, isqrt, log
from typing import Tuple

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError
from .mf import DENSE_LIMIT, MultiplicativeFunction, build_support_tables
from .primes import require_prime
from .sequences import CoeffSeq, log_powers

MAX_ORDER = 12  # factorials stay tame and partition counts stay small


@dataclass(frozen=True)
class LambdaTable:
    """Values on all prime powers p^m <= n_max, sorted by n = p^m.

    The implied value at every non-prime-power is 0.
    """

    f_name: str
    n_max: int
    n: np.ndarray  # int64, p^m ascending
    p: np.ndarray  # int64
    m: np.ndarray  # int64
    values: np.ndarray  # float64

    def value(self, p, m):
        """Table value at p^m (0.0 when p^m is not in the table)."""
        target = int(p) ** int(m)
        i = int(np.searchsorted(self.n, target))
        if i < self.n.shape[0] and int(self.n[i]) == target:
            return float(self.values[i])
        if target <= self.n_max:
            return 0.0
        raise DomainError(f"{p}^{m} exceeds table bound {self.n_max}")

    def __len__(self):
        return int(self.n.shape[0])


def lambda_prime_power(f: MultiplicativeFunction, p: int, m_max: int) -> np.ndarray:
    """Values at p, p^2, ..., p^m_max by the triangular recursion."""
    p = require_prime(p)
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    lp = log(p)
    fv = [0.0] + [float(f.local(p, j)) for j in range(1, m_max + 1)]
    lam = [0.0] * (m_max + 1)
    for m in range(1, m_max + 1):
        s = m * fv[m] * lp
        for j in range(1, m):
            s -= lam[j] * fv[m - j]
        lam[m] = s
    return np.array(lam[1:], dtype=np.float64)


def lambda_table(f: MultiplicativeFunction, n_max: int) -> LambdaTable:
    """All prime-power values up to n_max (streaming over primes)."""
    n_max = int(n_max)
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    tabs = build_support_tables(f, n_max)
    primes = tabs.primes
    n_small = int(np.searchsorted(primes, isqrt(n_max), side="right"))

    ns = [primes.copy()]
    ps = [primes.copy()]
    ms = [np.ones(primes.shape[0], dtype=np.int64)]
    # primes with p > sqrt(n_max) only reach m = 1: lam(p) = f(p) log p
    vals1 = tabs.fp * np.log(primes.astype(np.float64))
    vals = [vals1]
    for j in range(n_small):
        p = int(primes[j])
        m_max = 1
        pk = p
        while pk <= n_max // p:
            pk *= p
            m_max += 1
        if m_max < 2:
            continue
        lam = lambda_prime_power(f, p, m_max)
        vals[0][j] = lam[0]  # identical recursion value for m = 1
        pows = p ** np.arange(2, m_max + 1, dtype=np.int64)
        ns.append(pows)
        ps.append(np.full(m_max - 1, p, dtype=np.int64))
        ms.append(np.arange(2, m_max + 1, dtype=np.int64))
        vals.append(lam[1:])
    n_all = np.concatenate(ns)
    order = np.argsort(n_all, kind="stable")
    return LambdaTable(
        f_name=f.name,
        n_max=n_max,
        n=n_all[order],
        p=np.concatenate(ps)[order],
        m=np.concatenate(ms)[order],
        values=np.concatenate(vals)[order],
    )


def lambda_dense(f: MultiplicativeFunction, n_max: int) -> CoeffSeq:
    """The prime-power table scattered into a dense sequence."""
    if n_max > DENSE_LIMIT:
        raise CapacityError(f"n_max {n_max} exceeds the dense limit {DENSE_LIMIT}")
    out = np.zeros(n_max + 1)
    if n_max >= 2:
        table = lambda_table(f, n_max)
        out[table.n] = table.values
    return CoeffSeq(out)


@dataclass(frozen=True)
class PartitionTerm:
    """One partition term (k_1, ..., k_h) with its exact rational coefficient.

    ks[i-1] counts the parts of size i, so sum(i * k_i) = h; coeff carries
    the full sign including the global (-1)^h factor.
    """

    ks: Tuple[int, ...]
    coeff: Fraction

    def __post_init__(self):
        if sum((i + 1) * k for i, k in enumerate(self.ks)) != len(self.ks):
            raise DomainError("partition weights must sum to the order h")


def faa_terms(h: int):
    """All partition terms of order h, lexicographic in (k_1, k_2, ...)."""
    if not 1 <= h <= MAX_ORDER:
        raise DomainError(f"order h must be in 1..{MAX_ORDER}")
    partitions = []

    def gen(i, remaining, acc):
        if i > h:
            if remaining == 0:
                partitions.append(tuple(acc))
            return
        for k in range(remaining // i + 1):
            gen(i + 1, remaining - i * k, acc + [k])

    gen(1, h, [])
    partitions.sort()
    terms = []
    for ks in partitions:
        denom = 1
        total = 0
        for i, k in enumerate(ks, start=1):
            denom *= factorial(k) * factorial(i) ** k
            total += k
        coeff = Fraction((-1) ** h * factorial(h) * (-1) ** total, denom)
        terms.append(PartitionTerm(ks=ks, coeff=coeff))
    return terms


def _derivative_seq(base: np.ndarray, i: int, n_max: int) -> np.ndarray:
    """Coefficients of the (i-1)-th derivative of -F'/F: (-1)^(i-1) (log n)^(i-1) lam(n)."""
    if i == 1:
        return base
    sign = -1.0 if (i - 1) % 2 else 1.0
    return sign * base * log_powers(n_max, i - 1)


def lambda_fh(f: MultiplicativeFunction, h: int, n_max: int) -> CoeffSeq:
    """Dense sequence satisfying f(n) (log n)^h = sum_{d|n} f(n/d) lam_h(d)."""
    if not 1 <= h <= MAX_ORDER:
        raise DomainError(f"order h must be in 1..{MAX_ORDER}")
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > DENSE_LIMIT:
        raise CapacityError(f"n_max {n_max} exceeds the dense limit {DENSE_LIMIT}")
    if n_max == 1:
        return CoeffSeq.zeros(1)
    base = lambda_dense(f, n_max).values
    derivs = {}
    out = np.zeros(n_max + 1)
    for term in faa_terms(h):
        prod = None
        for i, k in enumerate(term.ks, start=1):
            if k == 0:
                continue
            if i not in derivs:
                derivs[i] = _derivative_seq(base, i, n_max)
            for _ in range(k):
                if prod is None:
                    prod = derivs[i].copy()
                else:
                    a, b = prod, derivs[i]
                    if np.count_nonzero(b) < np.count_nonzero(a):
                        a, b = b, a
                    prod = _kernels.dirichlet_convolve(a, b)
        out += float(term.coeff) * prod
    return CoeffSeq(out)
