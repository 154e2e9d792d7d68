from math import fsum, log

import numpy as np
import pytest

from mangoldt import CATALOG, CoeffSeq, DomainError, dirichlet_convolve, log_weight
from mangoldt.lambdaf import lambda_dense


def _convolve_brute(a, b):
    n_max = a.n_max
    out = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        out[n] = fsum(
            a.values[d] * b.values[n // d] for d in range(1, n + 1) if n % d == 0
        )
    return out


def test_coeffseq_basics():
    s = CoeffSeq.from_values([1.0, 2.0, 3.0])
    assert s.n_max == 3 and len(s) == 3
    assert s[2] == 2.0
    with pytest.raises(DomainError):
        s[0]
    with pytest.raises(DomainError):
        s[4]
    with pytest.raises(DomainError):
        CoeffSeq(np.array([1.0]))


def test_unit_is_identity():
    e = CoeffSeq.unit(50)
    assert np.array_equal(dirichlet_convolve(e, e).values, e.values)
    rng = np.random.default_rng(7)
    a = CoeffSeq(rng.standard_normal(51))
    assert np.allclose(dirichlet_convolve(a, e).values, a.values, atol=0, rtol=0)


def test_divisor_counts():
    ones = CoeffSeq(np.ones(7))
    assert dirichlet_convolve(ones, ones).values[1:].tolist() == [1, 2, 2, 3, 2, 4]


def test_chebyshev_identity():
    # classical: sum_{d|n} Lambda(d) = log n
    lam = lambda_dense(CATALOG["one"], 4)
    ones = CoeffSeq(np.ones(5))
    got = dirichlet_convolve(lam, ones).values[1:]
    want = [0.0, log(2), log(3), 2 * log(2)]
    assert got == pytest.approx(want, abs=1e-14)


def test_convolution_against_brute_force():
    rng = np.random.default_rng(20240308)
    for _ in range(5):
        a = CoeffSeq(rng.standard_normal(201))
        b = CoeffSeq(rng.standard_normal(201))
        sparse_mask = rng.random(201) < 0.7
        b.values[sparse_mask] = 0.0
        b.values[0] = 0.0
        got = dirichlet_convolve(a, b).values
        want = _convolve_brute(a, b)
        assert np.allclose(got, want, rtol=1e-13, atol=1e-13)


def test_convolution_commutes():
    rng = np.random.default_rng(55)
    a = CoeffSeq(rng.standard_normal(301))
    b = CoeffSeq(rng.standard_normal(301))
    ab = dirichlet_convolve(a, b).values
    ba = dirichlet_convolve(b, a).values
    assert np.allclose(ab, ba, rtol=1e-12, atol=1e-12)


def test_convolution_length_mismatch():
    with pytest.raises(DomainError):
        dirichlet_convolve(CoeffSeq.unit(10), CoeffSeq.unit(11))


def test_log_weight():
    a = CoeffSeq.from_values([5.0, 1.0, 2.0, 1.0])
    assert np.array_equal(log_weight(a, 0).values, a.values)
    e = CoeffSeq.unit(10)
    assert np.all(log_weight(e, 1).values == 0.0)
    lam = lambda_dense(CATALOG["one"], 4)
    got = log_weight(lam, 1).values[1:]
    want = [0.0, log(2) ** 2, log(3) ** 2, 2 * log(2) ** 2]
    assert got == pytest.approx(want, abs=1e-14)
    with pytest.raises(DomainError):
        log_weight(a, -1)
