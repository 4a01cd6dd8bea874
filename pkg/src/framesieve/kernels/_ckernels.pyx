# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot signal kernels."""

from libc.math cimport exp, sqrt, M_PI

import numpy as np

BACKEND_NAME = "compiled"


def gaussian_smooth_kernel(const double[::1] values, int radius, double sigma):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i, idx
    cdef int j
    cdef double acc
    cdef double norm = 1.0 / (sqrt(2.0 * M_PI) * sigma)
    out_arr = np.empty(n, dtype=np.float64)
    weights_arr = np.empty(2 * radius + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[::1] weights = weights_arr
    for j in range(-radius, radius + 1):
        weights[j + radius] = norm * exp(-(j * j) / (2.0 * sigma * sigma))
    for i in range(n):
        acc = 0.0
        for j in range(-radius, radius + 1):
            idx = i + j
            if idx < 0:
                idx = 0
            elif idx >= n:
                idx = n - 1
            acc += values[idx] * weights[j + radius]
        out[i] = acc
    return out_arr


def detect_peaks_kernel(const double[::1] values, double tau):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t i = 0, j
    cdef bint left_ok, right_ok
    peaks = []
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        left_ok = i == 0 or values[i - 1] < values[i]
        right_ok = j == n - 1 or values[j + 1] < values[i]
        if left_ok and right_ok and values[i] > tau:
            peaks.append(i + (j - i) // 2)
        i = j + 1
    return peaks


def expand_clip_kernel(const double[::1] values, Py_ssize_t peak):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t start = peak, end = peak
    while start > 0 and values[start - 1] <= values[start]:
        start -= 1
    while end + 1 < n and values[end + 1] <= values[end]:
        end += 1
    return start, end
