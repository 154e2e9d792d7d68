"""Prime generation and primality testing.

Primes are produced by a segmented sieve of Eratosthenes with a fixed
segment size of 2**20, so the enumeration order and the resulting arrays
are identical regardless of how callers consume them.
"""

from math import isqrt

import numpy as np

from .errors import DomainError

SEGMENT_SIZE = 1 << 20

# Witnesses making Miller-Rabin deterministic for all n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _small_primes(limit):
    """Dense sieve for the base primes (limit is at most sqrt of the target)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def iter_prime_segments(limit):
    """Yield int64 arrays of primes <= limit, one fixed-size segment at a time."""
    if limit < 2:
        return
    base = _small_primes(isqrt(limit))
    yield base[base <= limit]
    lo = isqrt(limit) + 1
    while lo <= limit:
        hi = min(lo + SEGMENT_SIZE - 1, limit)
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            if start < p * p:
                start = p * p
            if start <= hi:
                mask[start - lo :: p] = False
        yield (np.flatnonzero(mask) + lo).astype(np.int64)
        lo = hi + 1


def primes_up_to(limit):
    """All primes <= limit as an ascending int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    segments = list(iter_prime_segments(limit))
    return np.concatenate(segments) if segments else np.empty(0, dtype=np.int64)


def is_prime(n):
    """Deterministic Miller-Rabin test (exact for n < 3.3e24)."""
    n = int(n)
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(p):
    """Raise DomainError unless p is prime."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return int(p)
