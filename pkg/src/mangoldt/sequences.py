"""Dense arithmetic-function sequences on [1, n_max] and Dirichlet algebra."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError


@dataclass
class CoeffSeq:
    """Coefficient array indexed 1..n_max; slot 0 is padding and stays 0."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.shape[0] < 2:
            raise DomainError("CoeffSeq needs a 1-d array covering n = 1..n_max")
        self.values[0] = 0.0

    @property
    def n_max(self):
        return self.values.shape[0] - 1

    def __len__(self):
        return self.n_max

    def __getitem__(self, n):
        if not 1 <= n <= self.n_max:
            raise DomainError(f"index {n} outside 1..{self.n_max}")
        return float(self.values[n])

    @classmethod
    def zeros(cls, n_max):
        return cls(np.zeros(n_max + 1))

    @classmethod
    def unit(cls, n_max):
        """Convolution identity e: e[1] = 1, 0 elsewhere."""
        v = np.zeros(n_max + 1)
        v[1] = 1.0
        return cls(v)

    @classmethod
    def from_values(cls, values_1_to_n):
        v = np.concatenate(([0.0], np.asarray(values_1_to_n, dtype=np.float64)))
        return cls(v)


def dirichlet_convolve(a: CoeffSeq, b: CoeffSeq) -> CoeffSeq:
    """Dirichlet product (a * b)[n] = sum_{d|n} a[d] b[n/d].

    O(N log N) divisor loop; the sparser operand drives the outer loop
    (the product is commutative, so this only changes the running time).
    """
    if a.n_max != b.n_max:
        raise DomainError(f"length mismatch: {a.n_max} vs {b.n_max}")
    x, y = a.values, b.values
    if np.count_nonzero(y) < np.count_nonzero(x):
        x, y = y, x
    return CoeffSeq(_kernels.dirichlet_convolve(x, y))


def log_powers(n_max, j):
    """Array L with L[n] = (log n)^j for n = 1..n_max (L[0] = 0)."""
    out = np.zeros(n_max + 1)
    out[1:] = np.log(np.arange(1, n_max + 1, dtype=np.float64))
    if j == 0:
        out[1:] = 1.0
        out[0] = 0.0
        return out
    return out**j


def log_weight(a: CoeffSeq, j: int) -> CoeffSeq:
    """Pointwise weight: out[n] = a[n] * (log n)^j."""
    if j < 0:
        raise DomainError("log weight exponent must be >= 0")
    if j == 0:
        return CoeffSeq(a.values.copy())
    return CoeffSeq(a.values * log_powers(a.n_max, j))
