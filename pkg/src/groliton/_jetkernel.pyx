# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled truncated Cauchy-product kernel for dense multivariate jets."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def convolve(double[::1] a, double[::1] b,
             int[::1] idx_a, int[::1] idx_b, int[::1] idx_out,
             Py_ssize_t nout):
    """Accumulate ``out[idx_out[n]] += a[idx_a[n]] * b[idx_b[n]]``."""
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(nout, dtype=np.float64)
    cdef double[::1] view = out
    cdef Py_ssize_t n, npairs = idx_out.shape[0]
    for n in range(npairs):
        view[idx_out[n]] += a[idx_a[n]] * b[idx_b[n]]
    return out
