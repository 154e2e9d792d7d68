"""Multiplicative functions presented through their values on prime powers.

A function is defined by a local oracle f(p^k) for prime p and k >= 1
(f(1) = 1 is implicit and never queried).  Dense materialization uses a
smallest-prime-factor sieve; unbounded ranges are served by a streaming
enumeration of the support as products of prime powers.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb, isqrt
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError
from .primes import primes_up_to, require_prime
from .sequences import CoeffSeq

# Dense arrays are capped at 2**27 entries (~1 GiB of 8-byte reals);
# anything larger must go through enumerate_support / the streaming sums.
DENSE_LIMIT = 1 << 27


@dataclass(frozen=True)
class MultiplicativeFunction:
    """A multiplicative function f with claimed growth parameters.

    Attributes:
        name: identifier used by the CLI and in reports.
        local: oracle (p, k) -> f(p^k) for prime p and k >= 1.
        kappa_claimed: the claimed logarithmic mean density of f(p) log p / p.
        h_claimed: claimed sharpness order of the prime-sum remainder.
        support_hint: "dense" or "squarefree_sparse" (f(p^k) = 0 for k >= 2).
        prime_batch: optional vectorized f(p) over an int64 prime array.
    """

    name: str
    local: Callable[[int, int], float]
    kappa_claimed: float
    h_claimed: int = 2
    support_hint: str = "dense"
    prime_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.support_hint not in ("dense", "squarefree_sparse"):
            raise DomainError(f"unknown support hint {self.support_hint!r}")
        if self.kappa_claimed < 0:
            raise DomainError("kappa must be non-negative")

    def value(self, n):
        """f(n) by trial-division factorization (intended for small n)."""
        n = int(n)
        if n < 1:
            raise DomainError("n must be >= 1")
        out = 1.0
        m = n
        p = 2
        while p * p <= m:
            if m % p == 0:
                k = 0
                while m % p == 0:
                    m //= p
                    k += 1
                out *= float(self.local(p, k))
            p += 1 if p == 2 else 2
        if m > 1:
            out *= float(self.local(m, 1))
        return out

    def value_over_n(self, n):
        """g(n) = f(n)/n."""
        return self.value(n) / n


def eval_local(f: MultiplicativeFunction, p: int, k: int) -> float:
    """f(p^k) with validation; k = 0 returns 1 (f(1) = 1 by convention)."""
    if k < 0 or int(k) != k:
        raise DomainError("exponent k must be a non-negative integer")
    require_prime(p)
    if k == 0:
        return 1.0
    v = float(f.local(int(p), int(k)))
    if not np.isfinite(v):
        raise DomainError(f"{f.name}({p}^{k}) is not finite")
    return v


@dataclass(frozen=True)
class SupportTables:
    """Per-prime value tables consumed by the compiled support walk."""

    limit: int
    primes: np.ndarray  # int64, all primes <= limit
    fp: np.ndarray  # float64, f(p)
    hp_off: np.ndarray  # int64 offsets into hp_val per prime index
    hp_val: np.ndarray  # float64, f(p^k) for k >= 2, primes with p*p <= limit


@lru_cache(maxsize=8)
def build_support_tables(f: MultiplicativeFunction, limit: int) -> SupportTables:
    if limit < 1:
        raise DomainError("limit must be >= 1")
    primes = primes_up_to(limit)
    if f.prime_batch is not None:
        fp = np.asarray(f.prime_batch(primes), dtype=np.float64)
        if fp.shape != primes.shape:
            raise DomainError(f"{f.name}: prime_batch returned a wrong-shape array")
    else:
        fp = np.array([float(f.local(int(p), 1)) for p in primes], dtype=np.float64)
    n_small = int(np.searchsorted(primes, isqrt(limit), side="right"))
    offsets = [0]
    vals = []
    if f.support_hint == "squarefree_sparse":
        # Trust the hint after a spot check of the k >= 2 invariant.
        for p in primes[: min(n_small, 3)]:
            if float(f.local(int(p), 2)) != 0.0:
                raise DomainError(
                    f"{f.name}: squarefree_sparse hint but f({p}^2) != 0"
                )
        for j in range(n_small):
            p = int(primes[j])
            kmax = 1
            pk = p
            while pk <= limit // p:
                pk *= p
                kmax += 1
            vals.extend(0.0 for _ in range(kmax - 1))
            offsets.append(len(vals))
    else:
        for j in range(n_small):
            p = int(primes[j])
            pk = p
            k = 1
            while pk <= limit // p:
                pk *= p
                k += 1
                vals.append(float(f.local(p, k)))
            offsets.append(len(vals))
    hp_off = np.array(offsets + [0] * (len(primes) - n_small), dtype=np.int64)
    hp_val = np.array(vals if vals else [0.0], dtype=np.float64)
    return SupportTables(limit, primes, fp, hp_off, hp_val)


def sieve_values(f: MultiplicativeFunction, n_max: int) -> CoeffSeq:
    """Dense f(n) for n = 1..n_max via a smallest-prime-factor sieve."""
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > DENSE_LIMIT:
        raise CapacityError(
            f"n_max {n_max} exceeds the dense limit {DENSE_LIMIT}; "
            "use enumerate_support or the streaming sums"
        )
    if n_max == 1:
        return CoeffSeq(np.array([0.0, 1.0]))
    tabs = build_support_tables(f, n_max)
    spf = _kernels.spf_sieve(n_max)
    vals = _kernels.values_from_spf(spf, tabs.primes, tabs.fp, tabs.hp_off, tabs.hp_val)
    return CoeffSeq(vals)


def enumerate_support(f: MultiplicativeFunction, n_max: int, visitor) -> int:
    """Visit every n <= n_max with f(n) != 0 as visitor(n, f(n)); returns the count.

    Deterministic depth-first order: products of prime powers with primes
    ascending, exponents ascending, each n visited exactly once.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    plist = primes_up_to(n_max).tolist()
    nprimes = len(plist)
    count = 0

    def rec(n, fn, start):
        nonlocal count
        visitor(n, fn)
        count += 1
        cap = n_max // n
        for j in range(start, nprimes):
            p = plist[j]
            if p > cap:
                break
            pk = p
            k = 1
            while True:
                v = float(f.local(p, k))
                if v != 0.0:
                    rec(n * pk, fn * v, j + 1)
                if pk > cap // p:
                    break
                pk *= p
                k += 1

    rec(1, 1.0, 0)
    return count


def support_count(f: MultiplicativeFunction, n_max: int) -> int:
    """Number of n <= n_max with f(n) != 0."""
    return enumerate_support(f, n_max, lambda n, v: None)


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------


def _tau_local(big_k):
    def local(p, k):
        return float(comb(k + big_k - 1, big_k - 1))

    return local


ONE = MultiplicativeFunction(
    "one",
    lambda p, k: 1.0,
    kappa_claimed=1.0,
    prime_batch=lambda ps: np.ones(ps.shape[0]),
)

DELTA_1 = MultiplicativeFunction(
    "delta_1",
    lambda p, k: 0.0,
    kappa_claimed=0.0,
    support_hint="squarefree_sparse",
    prime_batch=lambda ps: np.zeros(ps.shape[0]),
)

MU_SQ = MultiplicativeFunction(
    "mu_sq",
    lambda p, k: 1.0 if k == 1 else 0.0,
    kappa_claimed=1.0,
    support_hint="squarefree_sparse",
    prime_batch=lambda ps: np.ones(ps.shape[0]),
)

TAU_2 = MultiplicativeFunction(
    "tau_2", _tau_local(2), kappa_claimed=2.0,
    prime_batch=lambda ps: np.full(ps.shape[0], 2.0),
)
TAU_3 = MultiplicativeFunction(
    "tau_3", _tau_local(3), kappa_claimed=3.0,
    prime_batch=lambda ps: np.full(ps.shape[0], 3.0),
)
TAU_4 = MultiplicativeFunction(
    "tau_4", _tau_local(4), kappa_claimed=4.0,
    prime_batch=lambda ps: np.full(ps.shape[0], 4.0),
)

IND_1MOD4 = MultiplicativeFunction(
    "ind_1mod4",
    lambda p, k: 1.0 if p % 4 == 1 else 0.0,
    kappa_claimed=0.5,
    prime_batch=lambda ps: (ps % 4 == 1).astype(np.float64),
)


def sf_const(c: float) -> MultiplicativeFunction:
    """Squarefree-supported function with f(p) = c for every prime."""
    c = float(c)
    return MultiplicativeFunction(
        f"sf_const({c:g})",
        lambda p, k: c if k == 1 else 0.0,
        kappa_claimed=max(c, 0.0),
        support_hint="squarefree_sparse",
        prime_batch=lambda ps, _c=c: np.full(ps.shape[0], _c),
    )


CATALOG = {
    "one": ONE,
    "delta_1": DELTA_1,
    "mu_sq": MU_SQ,
    "tau_2": TAU_2,
    "tau_3": TAU_3,
    "tau_4": TAU_4,
    "ind_1mod4": IND_1MOD4,
}

_SF_CONST_RE = re.compile(r"^sf_const\(([-+0-9.eE]+)\)$")


def get_function(name: str) -> MultiplicativeFunction:
    """Catalog lookup; accepts the parametric form sf_const(c)."""
    if name in CATALOG:
        return CATALOG[name]
    m = _SF_CONST_RE.match(name)
    if m:
        return sf_const(float(m.group(1)))
    raise DomainError(f"unknown function {name!r}")


# ---------------------------------------------------------------------------
# Config-defined functions
# ---------------------------------------------------------------------------


def function_from_config(mapping) -> MultiplicativeFunction:
    """Build a function from a flat key = value mapping.

    Recognized keys:
        name, kappa, h, support (dense | squarefree)
        mod, class_<r> (f(p) = value when p % mod == r), prime_default
        power_default (zero | constant | power), power_constant
        override_<p>_<k> (explicit f(p^k) for small prime powers)
    """
    mapping = {str(k).strip(): str(v).strip() for k, v in dict(mapping).items()}
    name = mapping.get("name", "config_fn")
    try:
        kappa = float(mapping.get("kappa", "0"))
    except ValueError as exc:
        raise DomainError(f"bad kappa in function config: {exc}") from exc
    h_claimed = int(mapping.get("h", "2"))
    support = mapping.get("support", "dense")
    if support not in ("dense", "squarefree"):
        raise DomainError(f"support must be dense or squarefree, got {support!r}")

    mod = int(mapping["mod"]) if "mod" in mapping else 0
    classes = {}
    overrides = {}
    for key, raw in mapping.items():
        if key.startswith("class_"):
            if mod <= 0:
                raise DomainError("class_<r> rules require a positive mod")
            classes[int(key[6:]) % mod] = float(raw)
        elif key.startswith("override_"):
            parts = key.split("_")
            if len(parts) != 3:
                raise DomainError(f"bad override key {key!r} (want override_<p>_<k>)")
            p, k = int(parts[1]), int(parts[2])
            require_prime(p)
            if k < 1:
                raise DomainError("override exponent must be >= 1")
            overrides[(p, k)] = float(raw)
    prime_default = float(mapping.get("prime_default", "0"))
    power_default = mapping.get("power_default", "zero")
    if power_default not in ("zero", "constant", "power"):
        raise DomainError(
            f"power_default must be zero, constant or power, got {power_default!r}"
        )
    power_constant = float(mapping.get("power_constant", "0"))
    if support == "squarefree":
        if power_default != "zero":
            raise DomainError("squarefree support forces power_default = zero")
        for (p, k), v in overrides.items():
            if k >= 2 and v != 0.0:
                raise DomainError(
                    f"override_{p}_{k} = {v} contradicts squarefree support"
                )

    def prime_value(p):
        if (p, 1) in overrides:
            return overrides[(p, 1)]
        if mod > 0 and (p % mod) in classes:
            return classes[p % mod]
        return prime_default

    def local(p, k):
        if k == 1:
            return prime_value(p)
        if (p, k) in overrides:
            return overrides[(p, k)]
        if support == "squarefree" or power_default == "zero":
            return 0.0
        if power_default == "constant":
            return power_constant
        return prime_value(p) ** k

    def prime_batch(ps):
        out = np.full(ps.shape[0], prime_default)
        if mod > 0:
            residues = ps % mod
            for r, v in classes.items():
                out[residues == r] = v
        for (p, k), v in overrides.items():
            if k == 1:
                out[ps == p] = v
        return out

    return MultiplicativeFunction(
        name,
        local,
        kappa_claimed=kappa,
        h_claimed=h_claimed,
        support_hint="squarefree_sparse" if support == "squarefree" else "dense",
        prime_batch=prime_batch,
    )
