"""Numeric operations on the per-frame similarity signal.

Everything here is a pure function of its inputs: Gaussian smoothing,
signal statistics, dynamic thresholding, plateau-aware peak detection,
clip expansion around peaks, and interval merging.  The hot loops live in
:mod:`framesieve.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from framesieve import kernels
from framesieve.errors import InvalidInputError, InvalidParameterError


@dataclass(frozen=True, eq=False)
class SimilaritySignal:
    """Per-frame relevance scores on a fixed-FPS timeline.

    ``values`` is normalised to a read-only float64 array; the signal must
    be non-empty and finite everywhere.
    """

    values: np.ndarray
    fps: float = 1.0

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise InvalidInputError("signal must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("signal values must all be finite")
        if not self.fps > 0:
            raise InvalidInputError("fps must be positive")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class SmoothingParams:
    """Gaussian window shape: frame ``radius`` and kernel width ``sigma``."""

    radius: int = 4
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise InvalidParameterError("radius must be >= 0")
        if not self.sigma > 0:
            raise InvalidParameterError("sigma must be > 0")


@dataclass(frozen=True)
class SignalStats:
    mean: float
    std: float

    def __post_init__(self) -> None:
        if self.std < 0:
            raise InvalidInputError("std must be >= 0")


@dataclass(frozen=True)
class ClipInterval:
    """Inclusive frame-index range around a similarity peak.

    ``peak`` is dropped when merging collapses several source clips into a
    single interval.
    """

    start: int
    end: int
    peak: int | None = None

    def __post_init__(self) -> None:
        if self.start < 0:
            raise InvalidInputError("interval start must be >= 0")
        if self.start > self.end:
            raise InvalidInputError(f"interval start {self.start} > end {self.end}")
        if self.peak is not None and not (self.start <= self.peak <= self.end):
            raise InvalidInputError("peak must lie inside its interval")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def indices(self) -> range:
        return range(self.start, self.end + 1)


def gaussian_smooth(
    signal: SimilaritySignal, params: SmoothingParams | None = None
) -> SimilaritySignal:
    """Smooth with a truncated Gaussian window, replicating edge values.

    The window keeps the analytic 1/(sqrt(2*pi)*sigma) normalisation rather
    than renormalising the truncated mass to one; downstream thresholding is
    scale-equivariant, so clip selection is unaffected.
    """
    if params is None:
        params = SmoothingParams()
    out = kernels.gaussian_smooth_kernel(signal.values, params.radius, params.sigma)
    return SimilaritySignal(values=out, fps=signal.fps)


def signal_stats(signal: SimilaritySignal) -> SignalStats:
    """Arithmetic mean and population (divide-by-T) standard deviation.

    Computed on values shifted by the first sample: an exactly constant
    signal then gets std 0 and mean equal to the constant, so no threshold
    can dip below the plateau through rounding alone.
    """
    shifted = signal.values - signal.values[0]
    offset = float(np.mean(shifted))
    std = float(np.sqrt(np.mean(np.square(shifted - offset))))
    return SignalStats(mean=float(signal.values[0]) + offset, std=std)


def dynamic_threshold(stats: SignalStats, alpha: float) -> float:
    """Peak threshold: mean plus ``alpha`` standard deviations."""
    if not alpha > 0:
        raise InvalidParameterError("alpha must be > 0")
    return stats.mean + alpha * stats.std


def detect_peaks(smoothed: SimilaritySignal, tau: float) -> list[int]:
    """Indices of local maxima strictly above ``tau``, in increasing order.

    A plateau of equal values flanked by strictly smaller neighbours counts
    once, at its centre index (left of centre for even plateau lengths).
    The array edge behaves like a strictly smaller neighbour, so maxima at
    the very start or end of a video stay detectable.
    """
    return [int(i) for i in kernels.detect_peaks_kernel(smoothed.values, float(tau))]


def expand_clip(smoothed: SimilaritySignal, peak: int) -> ClipInterval:
    """Widen ``peak`` into an interval while scores descend on each side.

    The walk stops only at a signal boundary or the first strict increase;
    it does not stop at the detection threshold.
    """
    n = len(smoothed)
    if not 0 <= peak < n:
        raise InvalidInputError(f"peak index {peak} outside [0, {n})")
    start, end = kernels.expand_clip_kernel(smoothed.values, int(peak))
    return ClipInterval(start=int(start), end=int(end), peak=int(peak))


def merge_clips(clips: Sequence[ClipInterval]) -> list[ClipInterval]:
    """Union overlapping or index-adjacent intervals.

    Output intervals are sorted, pairwise disjoint, never adjacent, and
    cover exactly the same frame indices as the input.  An interval that
    absorbed nothing keeps its originating peak.
    """
    if not clips:
        return []
    ordered = sorted(clips, key=lambda c: (c.start, c.end))
    merged: list[ClipInterval] = []
    cur_start, cur_end, cur_peak = ordered[0].start, ordered[0].end, ordered[0].peak
    absorbed = 1
    for clip in ordered[1:]:
        if clip.start <= cur_end + 1:
            cur_end = max(cur_end, clip.end)
            absorbed += 1
        else:
            merged.append(ClipInterval(cur_start, cur_end, cur_peak if absorbed == 1 else None))
            cur_start, cur_end, cur_peak = clip.start, clip.end, clip.peak
            absorbed = 1
    merged.append(ClipInterval(cur_start, cur_end, cur_peak if absorbed == 1 else None))
    return merged


def clips_from_smoothed(smoothed: SimilaritySignal, alpha: float) -> list[ClipInterval]:
    """Threshold, peak-detect, expand, and merge an already-smoothed signal.

    Split out from :func:`clip_pipeline` because the adaptive sampler re-runs
    this stage at different ``alpha`` values over one smoothing pass.
    """
    stats = signal_stats(smoothed)
    tau = dynamic_threshold(stats, alpha)
    peaks = detect_peaks(smoothed, tau)
    return merge_clips([expand_clip(smoothed, p) for p in peaks])


def clip_pipeline(
    signal: SimilaritySignal, alpha: float, params: SmoothingParams | None = None
) -> list[ClipInterval]:
    """Full inner pipeline: smooth, threshold, detect, expand, merge."""
    return clips_from_smoothed(gaussian_smooth(signal, params), alpha)
