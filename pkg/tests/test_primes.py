import numpy as np
import pytest

from mangoldt.errors import DomainError
from mangoldt.primes import is_prime, iter_prime_segments, primes_up_to, require_prime


def _sieve_naive(limit):
    out = []
    for n in range(2, limit + 1):
        if all(n % d for d in range(2, int(n**0.5) + 1)):
            out.append(n)
    return out


def test_primes_small():
    assert primes_up_to(1).size == 0
    assert primes_up_to(2).tolist() == [2]
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_primes_against_naive():
    assert primes_up_to(2000).tolist() == _sieve_naive(2000)


def test_prime_counts():
    # pi(10^k) reference values
    assert primes_up_to(10**4).size == 1229
    assert primes_up_to(10**6).size == 78498


def test_segments_cover_everything():
    segs = list(iter_prime_segments(10**5))
    joined = np.concatenate(segs)
    assert np.array_equal(joined, primes_up_to(10**5))
    assert np.all(np.diff(joined) > 0)


def test_is_prime():
    naive = set(_sieve_naive(500))
    for n in range(500):
        assert is_prime(n) == (n in naive)
    assert is_prime(2**31 - 1)  # Mersenne prime
    assert not is_prime(2**31 + 1)


def test_require_prime():
    assert require_prime(97) == 97
    with pytest.raises(DomainError):
        require_prime(91)
