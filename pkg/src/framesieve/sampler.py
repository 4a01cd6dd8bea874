"""Budgeted frame selection.

The adaptive clip-level slow-fast allocator, plus the uniform and top-k
baselines it is compared against.  All functions are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from framesieve.errors import (
    InsufficientPoolError,
    InvalidInputError,
    InvalidParameterError,
)
from framesieve.signal import (
    ClipInterval,
    SimilaritySignal,
    SmoothingParams,
    clips_from_smoothed,
    gaussian_smooth,
)


class Fallback(str, Enum):
    """How a plan was completed when the adaptive path could not be."""

    NONE = "none"
    ALL_FRAMES = "all_frames"
    UNIFORM_FILL = "uniform_fill"


@dataclass(frozen=True)
class BudgetConfig:
    """Frame budget and the knobs of the adaptive allocator.

    ``fast_ratio`` is the share of the budget sampled outside clips;
    ``alpha0`` seeds the peak threshold, which the allocator halves or
    doubles at most ``max_adaptations`` times before falling back.
    """

    k: int
    fast_ratio: float = 0.25
    alpha0: float = 0.5
    max_adaptations: int = 8
    smoothing: SmoothingParams = field(default_factory=SmoothingParams)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InvalidParameterError("k must be >= 1")
        if not 0.0 <= self.fast_ratio <= 1.0:
            raise InvalidParameterError("fast_ratio must lie in [0, 1]")
        if not self.alpha0 > 0:
            raise InvalidParameterError("alpha0 must be > 0")
        if self.max_adaptations < 0:
            raise InvalidParameterError("max_adaptations must be >= 0")


@dataclass(frozen=True)
class SamplingPlan:
    """Selected frame indices plus full provenance of how they were chosen.

    ``alpha_history`` holds one ``(alpha, clip_frames, nonclip_frames)``
    entry per evaluated threshold, the accepted/final one included.
    """

    selected: tuple[int, ...]
    slow_indices: tuple[int, ...]
    fast_indices: tuple[int, ...]
    clips: tuple[ClipInterval, ...]
    alpha_final: float
    alpha_history: tuple[tuple[float, int, int], ...]
    fallback_used: Fallback


def split_budget(k: int, fast_ratio: float) -> tuple[int, int]:
    """Split a budget into (k_slow, k_fast); the fast share is floored."""
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if not 0.0 <= fast_ratio <= 1.0:
        raise InvalidParameterError("fast_ratio must lie in [0, 1]")
    k_fast = math.floor(k * fast_ratio)
    return k - k_fast, k_fast


def uniform_positions(m: int, k: int) -> list[int]:
    """k centred, strictly increasing positions in [0, m).

    position_i = floor((i + 0.5) * m / k), computed in integer arithmetic
    so the floor is exact for any m and k.
    """
    if k < 1 or k > m:
        raise InvalidInputError(f"need 1 <= k <= m, got k={k}, m={m}")
    return [((2 * i + 1) * m) // (2 * k) for i in range(k)]


def sample_region(pool: Sequence[int], k: int) -> list[int]:
    """Uniformly spaced draw of k entries from a sorted index pool."""
    if k == 0:
        return []
    if k > len(pool):
        raise InsufficientPoolError(f"pool of {len(pool)} frames cannot supply {k}")
    return [int(pool[p]) for p in uniform_positions(len(pool), k)]


def uniform_sample(t: int, k: int) -> list[int]:
    """Evenly spread min(k, t) frame indices over a timeline of length t."""
    if t < 1 or k < 1:
        raise InvalidInputError("t and k must both be >= 1")
    return uniform_positions(t, min(k, t))


def topk_sample(signal: SimilaritySignal, k: int) -> list[int]:
    """Indices of the min(k, T) highest scores, ties to the lower index,
    returned in index order."""
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    order = np.argsort(-signal.values, kind="stable")
    return sorted(int(i) for i in order[: min(k, len(signal))])


def slow_fast_sample(signal: SimilaritySignal, cfg: BudgetConfig) -> SamplingPlan:
    """Adaptive clip-level slow-fast selection of min(K, T) frames.

    Smoothing runs once.  The loop then re-clips at the current threshold:
    too few clip frames for the slow budget halves alpha, too few non-clip
    frames for the fast budget doubles it.  After ``max_adaptations``
    threshold changes the plan is completed by uniform filling, so every
    input yields a full budget.
    """
    t = len(signal)
    k = cfg.k
    if t <= k:
        everything = tuple(range(t))
        return SamplingPlan(
            selected=everything,
            slow_indices=(),
            fast_indices=everything,
            clips=(),
            alpha_final=cfg.alpha0,
            alpha_history=(),
            fallback_used=Fallback.ALL_FRAMES,
        )

    k_slow, k_fast = split_budget(k, cfg.fast_ratio)
    smoothed = gaussian_smooth(signal, cfg.smoothing)

    alpha = cfg.alpha0
    history: list[tuple[float, int, int]] = []
    adaptations = 0
    while True:
        clips = clips_from_smoothed(smoothed, alpha)
        clip_pool = _clip_union(clips)
        c = len(clip_pool)
        history.append((alpha, c, t - c))
        if c >= k_slow and t - c >= k_fast:
            slow = sample_region(clip_pool, k_slow)
            fast = sample_region(_complement(clip_pool, t), k_fast)
            return SamplingPlan(
                selected=tuple(sorted(slow + fast)),
                slow_indices=tuple(slow),
                fast_indices=tuple(fast),
                clips=tuple(clips),
                alpha_final=alpha,
                alpha_history=tuple(history),
                fallback_used=Fallback.NONE,
            )
        if adaptations >= cfg.max_adaptations:
            return _uniform_fill_plan(clips, clip_pool, t, k, k_slow, alpha, history)
        if c < k_slow:
            alpha = alpha / 2.0
        else:
            alpha = alpha * 2.0
        adaptations += 1


def _uniform_fill_plan(
    clips: list[ClipInterval],
    clip_pool: list[int],
    t: int,
    k: int,
    k_slow: int,
    alpha: float,
    history: list[tuple[float, int, int]],
) -> SamplingPlan:
    """Complete the budget once the adaptive loop has hit its cap.

    The clip union (capped at k_slow) becomes the slow set and the
    remainder of the budget is spread uniformly over the complement.  If
    the complement cannot absorb the remainder, the shortfall is topped up
    from the still-unselected clip frames; t > k guarantees enough frames.
    """
    slow = sample_region(clip_pool, min(k_slow, len(clip_pool)))
    rest = _complement(clip_pool, t)
    fast = sample_region(rest, min(k - len(slow), len(rest)))
    chosen = set(slow) | set(fast)
    deficit = k - len(chosen)
    if deficit > 0:
        leftovers = [i for i in clip_pool if i not in chosen]
        slow = sorted(slow + sample_region(leftovers, deficit))
    return SamplingPlan(
        selected=tuple(sorted(slow + fast)),
        slow_indices=tuple(slow),
        fast_indices=tuple(fast),
        clips=tuple(clips),
        alpha_final=alpha,
        alpha_history=tuple(history),
        fallback_used=Fallback.UNIFORM_FILL,
    )


def _clip_union(clips: Sequence[ClipInterval]) -> list[int]:
    # Merged clips are sorted and disjoint, so concatenation stays sorted.
    pool: list[int] = []
    for clip in clips:
        pool.extend(clip.indices())
    return pool


def _complement(pool: Sequence[int], t: int) -> list[int]:
    inside = set(pool)
    return [i for i in range(t) if i not in inside]
