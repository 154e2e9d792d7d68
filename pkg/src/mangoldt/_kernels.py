"""Compiled inner loops.

Every kernel is single-threaded with a fixed iteration order and no
fastmath, so results are bit-reproducible across runs and independent of
any worker-pool size configured by callers.

The support walk (`stream_*`) enumerates every n <= limit with f(n) != 0
as a product of prime powers, depth-first with primes ascending and
exponents ascending, multiplying local values along the way.  Per-prime
inputs are the array ``fp`` of f(p) values and a flat table
``hp_off``/``hp_val`` holding f(p^k) for k >= 2 (only primes with
p*p <= limit can occur with exponent >= 2, so the table is small).
Accumulation is Neumaier-compensated.
"""

import math

import numpy as np
from numba import njit

_STACK_DEPTH = 72  # > log2(any dense limit); DFS depth = #distinct primes


@njit(cache=True, inline="always")
def _bin_of(thresholds, n):
    # leftmost bin with thresholds[bin] >= n; caller guarantees n <= thresholds[-1]
    lo = 0
    hi = thresholds.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if thresholds[mid] >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def stream_binned_moments(primes, fp, hp_off, hp_val, limit, thresholds, t_max):
    """Per-bin compensated sums of f(n)/n * (log n)^t for t = 0..t_max.

    Bin b collects support points n with thresholds[b-1] < n <= thresholds[b];
    returns (sums, comps) of shape (nbins, t_max+1).  Cumulative values are
    obtained by combining bins in ascending order.
    """
    nbins = thresholds.shape[0]
    sums = np.zeros((nbins, t_max + 1))
    comps = np.zeros((nbins, t_max + 1))
    nprimes = primes.shape[0]

    st_j = np.zeros(_STACK_DEPTH, np.int64)
    st_pk = np.zeros(_STACK_DEPTH, np.int64)
    st_k = np.zeros(_STACK_DEPTH, np.int64)
    st_n = np.zeros(_STACK_DEPTH, np.int64)
    st_f = np.zeros(_STACK_DEPTH, np.float64)

    # root n = 1: g(1) = 1 and log(1) = 0
    sums[_bin_of(thresholds, 1), 0] = 1.0

    sp = 0
    st_j[0] = 0
    st_pk[0] = 0
    st_k[0] = 0
    st_n[0] = 1
    st_f[0] = 1.0
    while sp >= 0:
        j = st_j[sp]
        pk = st_pk[sp]
        k = st_k[sp]
        n = st_n[sp]
        fv = st_f[sp]
        cap = limit // n
        pushed = False
        while j < nprimes:
            p = primes[j]
            if pk == 0:
                if p > cap:
                    break
                pk = p
                k = 1
            else:
                if pk > cap // p:
                    j += 1
                    pk = 0
                    k = 0
                    continue
                pk *= p
                k += 1
            v = fp[j] if k == 1 else hp_val[hp_off[j] + k - 2]
            if v != 0.0:
                cn = n * pk
                cf = fv * v
                b = _bin_of(thresholds, cn)
                ln = math.log(cn * 1.0)
                term = cf / cn
                for t in range(t_max + 1):
                    s = sums[b, t]
                    tot = s + term
                    if abs(s) >= abs(term):
                        comps[b, t] += (s - tot) + term
                    else:
                        comps[b, t] += (term - tot) + s
                    sums[b, t] = tot
                    term *= ln
                st_j[sp] = j
                st_pk[sp] = pk
                st_k[sp] = k
                sp += 1
                st_j[sp] = j + 1
                st_pk[sp] = 0
                st_k[sp] = 0
                st_n[sp] = cn
                st_f[sp] = cf
                pushed = True
                break
        if not pushed:
            sp -= 1
    return sums, comps


@njit(cache=True)
def stream_logx_powers(primes, fp, hp_off, hp_val, limit, logx, j_max):
    """Compensated sums of f(n)/n * (logx - log n)^j, j = 0..j_max, n <= limit."""
    sums = np.zeros(j_max + 1)
    comps = np.zeros(j_max + 1)
    nprimes = primes.shape[0]

    st_j = np.zeros(_STACK_DEPTH, np.int64)
    st_pk = np.zeros(_STACK_DEPTH, np.int64)
    st_k = np.zeros(_STACK_DEPTH, np.int64)
    st_n = np.zeros(_STACK_DEPTH, np.int64)
    st_f = np.zeros(_STACK_DEPTH, np.float64)

    # root n = 1
    term = 1.0
    for t in range(j_max + 1):
        s = sums[t]
        tot = s + term
        if abs(s) >= abs(term):
            comps[t] += (s - tot) + term
        else:
            comps[t] += (term - tot) + s
        sums[t] = tot
        term *= logx

    sp = 0
    st_j[0] = 0
    st_pk[0] = 0
    st_k[0] = 0
    st_n[0] = 1
    st_f[0] = 1.0
    while sp >= 0:
        j = st_j[sp]
        pk = st_pk[sp]
        k = st_k[sp]
        n = st_n[sp]
        fv = st_f[sp]
        cap = limit // n
        pushed = False
        while j < nprimes:
            p = primes[j]
            if pk == 0:
                if p > cap:
                    break
                pk = p
                k = 1
            else:
                if pk > cap // p:
                    j += 1
                    pk = 0
                    k = 0
                    continue
                pk *= p
                k += 1
            v = fp[j] if k == 1 else hp_val[hp_off[j] + k - 2]
            if v != 0.0:
                cn = n * pk
                cf = fv * v
                w = logx - math.log(cn * 1.0)
                term = cf / cn
                for t in range(j_max + 1):
                    s = sums[t]
                    tot = s + term
                    if abs(s) >= abs(term):
                        comps[t] += (s - tot) + term
                    else:
                        comps[t] += (term - tot) + s
                    sums[t] = tot
                    term *= w
                st_j[sp] = j
                st_pk[sp] = pk
                st_k[sp] = k
                sp += 1
                st_j[sp] = j + 1
                st_pk[sp] = 0
                st_k[sp] = 0
                st_n[sp] = cn
                st_f[sp] = cf
                pushed = True
                break
        if not pushed:
            sp -= 1
    return sums, comps


@njit(cache=True)
def spf_sieve(nmax):
    """Smallest-prime-factor table for 0..nmax (int32; spf[0] = spf[1] = 0)."""
    spf = np.zeros(nmax + 1, np.int32)
    i = 2
    while i * i <= nmax:
        if spf[i] == 0:
            for m in range(i * i, nmax + 1, i):
                if spf[m] == 0:
                    spf[m] = i
        i += 1
    for m in range(2, nmax + 1):
        if spf[m] == 0:
            spf[m] = m
    return spf


@njit(cache=True)
def values_from_spf(spf, primes, fp, hp_off, hp_val):
    """Dense f(n) for n = 0..nmax via the factorization sieve (out[0] = 0)."""
    nmax = spf.shape[0] - 1
    out = np.zeros(nmax + 1)
    if nmax >= 1:
        out[1] = 1.0
    for m in range(2, nmax + 1):
        p = np.int64(spf[m])
        q = m // p
        e = 1
        while q % p == 0:
            q //= p
            e += 1
        j = np.searchsorted(primes, p)
        if e == 1:
            v = fp[j]
        else:
            v = hp_val[hp_off[j] + e - 2]
        out[m] = v * out[q]
    return out


@njit(cache=True)
def dirichlet_convolve(a, b):
    """out[n] = sum_{d | n} a[d] * b[n/d]; skips zero entries of a."""
    nmax = a.shape[0] - 1
    out = np.zeros(nmax + 1)
    for d in range(1, nmax + 1):
        ad = a[d]
        if ad != 0.0:
            m = nmax // d
            for k in range(1, m + 1):
                out[d * k] += ad * b[k]
    return out


@njit(cache=True)
def kahan_sum(a):
    """Neumaier-compensated sum of a 1-d array, in index order."""
    s = 0.0
    c = 0.0
    for i in range(a.shape[0]):
        x = a[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c
