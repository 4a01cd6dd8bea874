"""Synthetic signals with known relevant intervals, for benchmarking.

Each scenario plants Gaussian bumps over a flat floor so that selection
quality can be judged against ground truth instead of human labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from framesieve.errors import InvalidInputError
from framesieve.signal import SimilaritySignal


@dataclass(frozen=True)
class BenchScenario:
    """A planted-bump timeline: truth intervals are inclusive frame spans."""

    t: int
    truth_intervals: tuple[tuple[int, int], ...]
    bump_amplitudes: tuple[float, ...]
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.t < 1:
            raise InvalidInputError("timeline length must be positive")
        if len(self.bump_amplitudes) != len(self.truth_intervals):
            raise InvalidInputError(
                f"{len(self.truth_intervals)} intervals need as many amplitudes, got {len(self.bump_amplitudes)}"
            )
        for start, end in self.truth_intervals:
            if not (0 <= start <= end < self.t):
                raise InvalidInputError(
                    f"interval [{start}, {end}] does not fit in [0, {self.t - 1}]"
                )
        if self.noise_std < 0:
            raise InvalidInputError("noise_std must be non-negative")
        object.__setattr__(self, "truth_intervals", tuple(tuple(iv) for iv in self.truth_intervals))
        object.__setattr__(self, "bump_amplitudes", tuple(float(a) for a in self.bump_amplitudes))


def synth_signal(scenario: BenchScenario) -> tuple[SimilaritySignal, tuple[tuple[int, int], ...]]:
    """Render the scenario to a clipped [0, 1] signal plus its truth."""
    idx = np.arange(scenario.t, dtype=np.float64)
    values = np.zeros(scenario.t, dtype=np.float64)
    for (start, end), amplitude in zip(scenario.truth_intervals, scenario.bump_amplitudes):
        center = (start + end) / 2.0
        width = max((end - start + 1) / 6.0, 0.75)
        values += amplitude * np.exp(-((idx - center) ** 2) / (2.0 * width * width))
    if scenario.noise_std > 0:
        rng = np.random.default_rng(scenario.seed)
        values += rng.normal(0.0, scenario.noise_std, size=scenario.t)
    values = np.clip(values, 0.0, 1.0)
    return SimilaritySignal(values=values, fps=1.0), scenario.truth_intervals
