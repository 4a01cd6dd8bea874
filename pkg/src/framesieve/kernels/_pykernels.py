"""Numpy implementations of the hot signal kernels.

This is the fallback backend, used when the compiled extension is
unavailable or disabled via FRAMESIEVE_PURE_PYTHON.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"


def gaussian_smooth_kernel(values: np.ndarray, radius: int, sigma: float) -> np.ndarray:
    """Truncated Gaussian window with edge-replicate padding.

    The window keeps its analytic 1/(sqrt(2*pi)*sigma) normalisation, so the
    truncated mass sums to slightly less than one.
    """
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    weights /= math.sqrt(2.0 * math.pi) * sigma
    padded = np.pad(values, radius, mode="edge")
    # The window is symmetric, so convolution equals correlation.
    return np.convolve(padded, weights, mode="valid")


def detect_peaks_kernel(values: np.ndarray, tau: float) -> list[int]:
    """Centre indices of plateau runs strictly above tau whose neighbours
    are strictly smaller; the array edge counts as a smaller neighbour."""
    n = values.shape[0]
    peaks: list[int] = []
    i = 0
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


def expand_clip_kernel(values: np.ndarray, peak: int) -> tuple[int, int]:
    """Walk outward from peak while scores keep descending (non-strictly)."""
    n = values.shape[0]
    start = peak
    while start > 0 and values[start - 1] <= values[start]:
        start -= 1
    end = peak
    while end + 1 < n and values[end + 1] <= values[end]:
        end += 1
    return start, end
