# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_accel_py``.

Both loops run over a cache-sized block of points in the innermost
position, so each step is independent across points and vectorizes.
Complex products are spelled out in real arithmetic.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    BLOCK = 256


def horner(const double complex[::1] coeffs, const double complex[::1] z):
    cdef Py_ssize_t npts = z.shape[0]
    cdef Py_ssize_t deg = coeffs.shape[0] - 1
    cdef Py_ssize_t start, stop, i, m
    cdef double cr, ci, ar, ai, t
    cdef double zr[BLOCK]
    cdef double zi[BLOCK]
    cdef double accr[BLOCK]
    cdef double acci[BLOCK]
    out = np.zeros(npts, dtype=np.complex128)
    cdef double complex[::1] res = out
    if deg < 0:
        return out
    with nogil:
        start = 0
        while start < npts:
            stop = min(start + BLOCK, npts)
            for i in range(stop - start):
                zr[i] = z[start + i].real
                zi[i] = z[start + i].imag
                accr[i] = coeffs[deg].real
                acci[i] = coeffs[deg].imag
            for m in range(deg - 1, -1, -1):
                cr = coeffs[m].real
                ci = coeffs[m].imag
                for i in range(stop - start):
                    ar = accr[i]
                    ai = acci[i]
                    accr[i] = ar * zr[i] - ai * zi[i] + cr
                    acci[i] = ar * zi[i] + ai * zr[i] + ci
            for i in range(stop - start):
                res[start + i].real = accr[i]
                res[start + i].imag = acci[i]
            start += BLOCK
    return out


def power_means(const double[::1] x, Py_ssize_t max_power):
    cdef Py_ssize_t npts = x.shape[0]
    cdef Py_ssize_t start, stop, i, j, k
    cdef double s0, s1, s2, s3
    cdef double p[BLOCK]
    out = np.zeros(max_power + 1, dtype=np.float64)
    cdef double[::1] acc = out
    if npts == 0:
        return out
    with nogil:
        start = 0
        while start < npts:
            stop = min(start + BLOCK, npts)
            k = stop - start
            for i in range(k):
                p[i] = 1.0
            for j in range(max_power + 1):
                # four partial sums break the addition dependency chain
                s0 = s1 = s2 = s3 = 0.0
                i = 0
                while i + 4 <= k:
                    s0 += p[i]
                    s1 += p[i + 1]
                    s2 += p[i + 2]
                    s3 += p[i + 3]
                    p[i] *= x[start + i]
                    p[i + 1] *= x[start + i + 1]
                    p[i + 2] *= x[start + i + 2]
                    p[i + 3] *= x[start + i + 3]
                    i += 4
                while i < k:
                    s0 += p[i]
                    p[i] *= x[start + i]
                    i += 1
                acc[j] += (s0 + s1) + (s2 + s3)
            start += BLOCK
        for j in range(max_power + 1):
            acc[j] = acc[j] / npts
    return out
