# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex tableau kernels.

Same arithmetic, loop order and zero-skipping as mipseries._kernels_py so the
two backends stay bit-identical.
"""


def eliminate(double[:, ::1] tab, double[::1] rhs, Py_ssize_t r, Py_ssize_t j):
    """Gaussian pivot at (r, j) applied to the tableau and the rhs column."""
    cdef Py_ssize_t m = tab.shape[0]
    cdef Py_ssize_t ncol = tab.shape[1]
    cdef Py_ssize_t i, k
    cdef double piv = tab[r, j]
    cdef double f
    for k in range(ncol):
        tab[r, k] /= piv
    rhs[r] /= piv
    for i in range(m):
        if i == r:
            continue
        f = tab[i, j]
        if f != 0.0:
            for k in range(ncol):
                tab[i, k] -= f * tab[r, k]
            rhs[i] -= f * rhs[r]


def accumulate_rowsum(double[::1] out, double[::1] weights, double[:, ::1] tab):
    """out -= sum_i weights[i] * tab[i], skipping exact-zero weights."""
    cdef Py_ssize_t m = tab.shape[0]
    cdef Py_ssize_t ncol = tab.shape[1]
    cdef Py_ssize_t i, k
    cdef double w
    for i in range(m):
        w = weights[i]
        if w != 0.0:
            for k in range(ncol):
                out[k] -= w * tab[i, k]


def subtract_scaled_columns(double[::1] beta, double[:, ::1] tab,
                            long long[::1] cols, double[::1] vals):
    """beta -= sum_k vals[k] * tab[:, cols[k]] in column order."""
    cdef Py_ssize_t m = tab.shape[0]
    cdef Py_ssize_t nk = cols.shape[0]
    cdef Py_ssize_t i, k
    cdef Py_ssize_t c
    cdef double v
    for k in range(nk):
        v = vals[k]
        c = <Py_ssize_t> cols[k]
        for i in range(m):
            beta[i] -= v * tab[i, c]
