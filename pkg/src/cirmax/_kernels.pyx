# cython: language_level=3
"""Compiled Kummer-series kernels.

Same call signatures as :mod:`cirmax._kernels_py`; see that module for the
meaning of the returned tuples.
"""

import numpy as np

cdef extern from "float.h":
    long double LDBL_EPSILON

cdef extern from "_kummer_core.h" nogil:
    ctypedef struct kummer_result:
        double log_abs
        double arg
        double log_max
        long n_terms
        int converged
    kummer_result kummer_series_ld(double cr, double ci, double b, double z,
                                   double tol, long max_terms)
    kummer_result kummer_series_q(double cr, double ci, double b, double z,
                                  double tol, long max_terms)
    int CIRMAX_HAVE_FLOAT128

NAME = "cython"
FAST_EPS = float(LDBL_EPSILON)
HAS_WIDE = bool(CIRMAX_HAVE_FLOAT128)
WIDE_EPS = 1.925929944387236e-34 if HAS_WIDE else FAST_EPS


cdef tuple _pack(kummer_result r):
    return (complex(r.log_abs, r.arg), r.log_max, r.n_terms, r.converged)


def series_fast(c, double b, double z, double tol, long max_terms):
    cdef double complex cc = c
    cdef kummer_result r
    with nogil:
        r = kummer_series_ld(cc.real, cc.imag, b, z, tol, max_terms)
    return _pack(r)


def series_wide(c, double b, double z, double tol, long max_terms):
    cdef double complex cc = c
    cdef kummer_result r
    with nogil:
        r = kummer_series_q(cc.real, cc.imag, b, z, tol, max_terms)
    return _pack(r)


def series_fast_vec(c, double b, double[::1] z, double tol, long max_terms):
    cdef double complex cc = c
    cdef Py_ssize_t i, n = z.shape[0]
    log_sum = np.empty(n, dtype=np.complex128)
    log_max = np.empty(n, dtype=np.float64)
    n_terms = np.empty(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int32)
    cdef double complex[::1] ls = log_sum
    cdef double[::1] lm = log_max
    cdef long long[::1] nt = n_terms
    cdef int[::1] st = status
    cdef kummer_result r
    with nogil:
        for i in range(n):
            r = kummer_series_ld(cc.real, cc.imag, b, z[i], tol, max_terms)
            ls[i].real = r.log_abs
            ls[i].imag = r.arg
            lm[i] = r.log_max
            nt[i] = r.n_terms
            st[i] = r.converged
    return log_sum, log_max, n_terms, status
