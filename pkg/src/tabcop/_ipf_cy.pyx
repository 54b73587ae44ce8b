# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled proportional-fitting kernel.

Same contract as :func:`tabcop._ipf_py.ipf_sweeps`; selected automatically
at import time by :mod:`tabcop.scaling` when built.  The sweep loop runs
without the interpreter, which matters for small tables where per-call
NumPy overhead dominates, and for slow-converging support patterns that
need millions of sweeps.
"""

import numpy as np


def ipf_sweeps(double[:, ::1] table, const double[::1] row_targets,
               const double[::1] col_targets, double tol, long max_iter,
               double[::1] err_max_hist, double[::1] err_l1_hist):
    """Run rows-then-columns fitting sweeps on ``table`` in place.

    Returns ``(sweeps_done, last_max_error)``; error histories are written
    into the circular buffers exactly as in the pure-Python kernel.
    """
    cdef Py_ssize_t n_rows = table.shape[0]
    cdef Py_ssize_t n_cols = table.shape[1]
    cdef Py_ssize_t n_hist = err_max_hist.shape[0]
    cdef Py_ssize_t x, y
    cdef long k, sweeps = 0
    cdef double s, factor, err, l1, dev
    cdef double[::1] col_scale = np.empty(n_cols, dtype=np.float64)

    err = np.inf
    with nogil:
        for k in range(max_iter):
            for x in range(n_rows):
                s = 0.0
                for y in range(n_cols):
                    s += table[x, y]
                factor = row_targets[x] / s
                for y in range(n_cols):
                    table[x, y] *= factor

            for y in range(n_cols):
                col_scale[y] = 0.0
            for x in range(n_rows):
                for y in range(n_cols):
                    col_scale[y] += table[x, y]
            for y in range(n_cols):
                col_scale[y] = col_targets[y] / col_scale[y]
            for x in range(n_rows):
                for y in range(n_cols):
                    table[x, y] *= col_scale[y]

            err = 0.0
            l1 = 0.0
            for x in range(n_rows):
                s = 0.0
                for y in range(n_cols):
                    s += table[x, y]
                dev = s - row_targets[x]
                if dev < 0.0:
                    dev = -dev
                if dev > err:
                    err = dev
                l1 += dev
            err_max_hist[k % n_hist] = err
            err_l1_hist[k % n_hist] = l1
            sweeps = k + 1
            if err <= tol:
                break

    return sweeps, err
