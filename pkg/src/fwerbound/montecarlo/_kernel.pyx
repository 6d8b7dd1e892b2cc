# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled replication kernels; mirror ``rng.py`` and ``_fallback.py`` exactly."""

from libc.math cimport erfc, exp, log, sqrt
from libc.stdint cimport uint64_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t GAMMA2 = 0xD1B54A32D192ED03ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double TWO_M53 = 1.1102230246251565e-16

cdef double SQRT2 = 1.4142135623730951
cdef double SQRT2PI = 2.5066282746310002
cdef double P_LOW = 0.02425
cdef double GUARD = 1e-9
cdef double EXACT_B = 1e-3

cdef double A0 = -3.969683028665376e+01, A1 = 2.209460984245205e+02, A2 = -2.759285104469687e+02
cdef double A3 = 1.383577518672690e+02, A4 = -3.066479806614716e+01, A5 = 2.506628277459239e+00
cdef double B0 = -5.447609879822406e+01, B1 = 1.615858368580409e+02, B2 = -1.556989798598866e+02
cdef double B3 = 6.680131188771972e+01, B4 = -1.328068155288572e+01
cdef double C0 = -7.784894002430293e-03, C1 = -3.223964580411365e-01, C2 = -2.400758277161838e+00
cdef double C3 = -2.549732539343734e+00, C4 = 4.374664141464968e+00, C5 = 2.938163982698783e+00
cdef double D0 = 7.784695709041462e-03, D1 = 3.224671290700398e-01, D2 = 2.445134137142996e+00
cdef double D3 = 3.754408661907416e+00


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


cdef inline uint64_t stream_key(uint64_t skey, long long rep) noexcept nogil:
    return mix64(skey + <uint64_t>(rep + 1) * GAMMA)


cdef inline double uniform_at(uint64_t key, long long j) noexcept nogil:
    cdef uint64_t w = mix64(key + <uint64_t>(j + 1) * GAMMA2)
    return (<double>(w >> 11) + 0.5) * TWO_M53


cdef inline double lower_quantile(double p) noexcept nogil:
    cdef double q, r, num, den, y
    cdef int k
    if p < P_LOW:
        q = sqrt(-2.0 * log(p))
        num = ((((C0 * q + C1) * q + C2) * q + C3) * q + C4) * q + C5
        den = (((D0 * q + D1) * q + D2) * q + D3) * q + 1.0
        y = num / den
    else:
        q = p - 0.5
        r = q * q
        num = (((((A0 * r + A1) * r + A2) * r + A3) * r + A4) * r + A5) * q
        den = ((((B0 * r + B1) * r + B2) * r + B3) * r + B4) * r + 1.0
        y = num / den
    for k in range(2):
        y = y - (0.5 * erfc(-y / SQRT2) - p) / (exp(-0.5 * y * y) / SQRT2PI)
    return y


cdef inline double quantile(double p) noexcept nogil:
    if p > 0.5:
        return -lower_quantile(1.0 - p)
    return lower_quantile(p)


cdef long long _count_equi(int n, double a, double b, double cutoff, uint64_t skey,
                           long long start, long long stop) noexcept nogil:
    # X_i = a z0 + b z_i exceeds the cutoff iff z_i exceeds t = (cutoff - a z0) / b,
    # i.e. iff u_i exceeds Phi(t). Uniforms farther than GUARD from Phi(t) are
    # decided by comparison alone; the rest take the full quantile path, so each
    # replication's outcome equals that of evaluating every X_i.
    cdef long long rep, hits = 0
    cdef uint64_t key
    cdef double z0, x, t, ustar, u, lo, hi
    cdef int i
    cdef bint exact = b < EXACT_B
    for rep in range(start, stop):
        key = stream_key(skey, rep)
        z0 = quantile(uniform_at(key, 0))
        if b == 0.0:
            # every X_i equals a z0 because 0 * z_i vanishes
            if a * z0 > cutoff:
                hits += 1
            continue
        if exact:
            for i in range(1, n + 1):
                x = a * z0 + b * quantile(uniform_at(key, i))
                if x > cutoff:
                    hits += 1
                    break
            continue
        t = (cutoff - a * z0) / b
        ustar = 0.5 * erfc(-t / SQRT2)
        lo = ustar - GUARD
        hi = ustar + GUARD
        for i in range(1, n + 1):
            u = uniform_at(key, i)
            if u > hi:
                hits += 1
                break
            if u >= lo:
                x = a * z0 + b * quantile(u)
                if x > cutoff:
                    hits += 1
                    break
    return hits


cdef long long _count_gen(const double[:, ::1] L, double[::1] z, double cutoff, uint64_t skey,
                          long long start, long long stop) noexcept nogil:
    cdef Py_ssize_t n = L.shape[0]
    cdef long long rep, hits = 0
    cdef uint64_t key
    cdef double acc
    cdef Py_ssize_t i, k
    for rep in range(start, stop):
        key = stream_key(skey, rep)
        for i in range(n):
            z[i] = quantile(uniform_at(key, i))
            acc = 0.0
            for k in range(i + 1):
                acc = acc + L[i, k] * z[k]
            if acc > cutoff:
                hits += 1
                break
    return hits


def count_equicorrelated(int n, double rho, double cutoff, uint64_t seed_key,
                         long long start, long long stop):
    cdef double a = sqrt(rho)
    cdef double b = sqrt(1.0 - rho)
    cdef long long hits
    with nogil:
        hits = _count_equi(n, a, b, cutoff, seed_key, start, stop)
    return hits


def count_general(const double[:, ::1] L, double cutoff, uint64_t seed_key,
                  long long start, long long stop):
    import numpy as np
    cdef double[::1] z = np.empty(L.shape[0])
    cdef long long hits
    with nogil:
        hits = _count_gen(L, z, cutoff, seed_key, start, stop)
    return hits


def uniform(uint64_t seed_key, long long rep, long long j):
    return uniform_at(stream_key(seed_key, rep), j)


def normal_quantile(double p):
    return quantile(p)
