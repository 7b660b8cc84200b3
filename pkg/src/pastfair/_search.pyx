# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled allocation search.

Mirrors ``_search_py`` operation for operation; see that module for the
argument conventions.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    UTILITARIAN = 0
    EGALITARIAN = 1
    NASH = 2
    GINI = 3


cdef double _score(const double[:, ::1] util, const double[::1] offset,
                   const double[::1] denom, const Py_ssize_t[::1] active,
                   int kind, const double[::1] weights, double eps,
                   const int* assign, double* u, double* buf,
                   Py_ssize_t m, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k, a
    cdef double acc, z, tmp
    for i in range(n):
        u[i] = 0.0
    for k in range(m):
        a = assign[k]
        if a < n:
            u[a] += util[k, a]
    k = active.shape[0]
    for j in range(k):
        i = active[j]
        buf[j] = (offset[i] + u[i]) / denom[i]
    if kind == UTILITARIAN:
        acc = 0.0
        for j in range(k):
            acc += buf[j]
        return acc
    if kind == EGALITARIAN:
        acc = buf[0]
        for j in range(1, k):
            if buf[j] < acc:
                acc = buf[j]
        return acc
    if kind == NASH:
        acc = 1.0
        for j in range(k):
            acc *= buf[j] + eps
        return acc
    # insertion sort, ascending
    for j in range(1, k):
        tmp = buf[j]
        a = j - 1
        while a >= 0 and buf[a] > tmp:
            buf[a + 1] = buf[a]
            a -= 1
        buf[a + 1] = tmp
    acc = 0.0
    for j in range(k):
        acc += weights[j] * buf[j]
    return acc


cdef inline bint _advance(int* assign, Py_ssize_t m, int choices) noexcept nogil:
    cdef Py_ssize_t k = m - 1
    while k >= 0:
        assign[k] += 1
        if assign[k] < choices:
            return True
        assign[k] = 0
        k -= 1
    return False


def _run(const double[:, ::1] util, const double[::1] offset, const double[::1] denom,
         const Py_ssize_t[::1] active, int choices, int kind, const double[::1] weights,
         double eps, double[::1] out):
    cdef Py_ssize_t m = util.shape[0]
    cdef Py_ssize_t n = offset.shape[0]
    cdef Py_ssize_t idx = 0, best_idx = 0
    cdef double w, best = 0.0
    cdef int* assign = <int*>malloc(max(m, 1) * sizeof(int))
    cdef double* u = <double*>malloc(max(n, 1) * sizeof(double))
    cdef double* buf = <double*>malloc(max(n, 1) * sizeof(double))
    cdef bint keep = out.shape[0] > 0
    cdef Py_ssize_t k
    if assign == NULL or u == NULL or buf == NULL:
        free(assign); free(u); free(buf)
        raise MemoryError()
    try:
        with nogil:
            for k in range(m):
                assign[k] = 0
            while True:
                w = _score(util, offset, denom, active, kind, weights, eps,
                           assign, u, buf, m, n)
                if keep:
                    out[idx] = w
                if idx == 0 or w > best:
                    best = w
                    best_idx = idx
                idx += 1
                if not _advance(assign, m, choices):
                    break
    finally:
        free(assign); free(u); free(buf)
    return best_idx, best


def best_allocation(util, offset, denom, active, int choices, int kind, weights, double eps):
    empty = np.empty(0, dtype=np.float64)
    return _run(util, offset, denom, active, choices, kind, weights, eps, empty)


def score_allocations(util, offset, denom, active, int choices, int kind, weights, double eps):
    cdef Py_ssize_t total = choices ** util.shape[0]
    out = np.empty(total, dtype=np.float64)
    _run(util, offset, denom, active, choices, kind, weights, eps, out)
    return out
