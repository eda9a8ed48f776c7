# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled score-grid kernel; same semantics as ``_pykernels.score_grid``."""

import numpy as np
cimport numpy as cnp

from libc.stdint cimport int64_t

cdef int64_t DAY_US = 86400000000


def score_grid(const int64_t[:] item_idx, const double[:] base, const int64_t[:] captured_us,
               const int64_t[:] columns_us, const double[:] n_sources, Py_ssize_t n_items,
               double mu, int64_t lookback_days):
    cdef Py_ssize_t n_cols = columns_us.shape[0]
    cdef Py_ssize_t n_matches = base.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] result = np.zeros((n_items, n_cols), dtype=np.float64)
    cdef double[:, :] out = result
    cdef Py_ssize_t i, j, k
    cdef int64_t t, elapsed, days
    cdef double ns
    with nogil:
        for j in range(n_cols):
            ns = n_sources[j]
            if ns <= 0:
                continue
            t = columns_us[j]
            for k in range(n_matches):
                elapsed = t - captured_us[k]
                if elapsed < 0:
                    continue
                days = elapsed // DAY_US
                if lookback_days >= 0 and days > lookback_days:
                    continue
                out[item_idx[k], j] += base[k] * (1.0 / (mu + <double>days))
            for i in range(n_items):
                out[i, j] /= ns
    return result
