"""Benchmark harness: selection strategies on synthetic timelines.

Every (scenario, strategy, sweep point) combination yields one row of
coverage metrics against the planted truth intervals.  Baseline rows keep
the sweep columns so the CSV stays rectangular across strategies.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from framesieve.errors import InvalidInputError, InvalidParameterError
from framesieve.sampler import (
    BudgetConfig,
    Fallback,
    slow_fast_sample,
    topk_sample,
    uniform_sample,
)
from framesieve.signal import SmoothingParams
from framesieve.synth import BenchScenario, synth_signal

STRATEGIES = ("tcs", "topk", "uniform")
ALPHA_GRID = (0.25, 0.5, 0.75, 1.0)
FAST_RATIO_GRID = (1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2)


@dataclass(frozen=True)
class BenchRow:
    scenario_seed: int
    strategy: str
    alpha: float
    fast_ratio: float
    k: int
    t: int
    hit_rate: float
    in_interval_share: float
    max_gap: int
    clip_frames: int
    n_selected: int
    n_slow: int
    n_fast: int
    fallback: str
    runtime_s: float


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]


def hit_rate(selected: Sequence[int], intervals: Sequence[tuple[int, int]]) -> float:
    """Fraction of truth intervals holding at least one selected frame."""
    if not intervals:
        return 0.0
    hits = sum(
        1 for start, end in intervals if any(start <= i <= end for i in selected)
    )
    return hits / len(intervals)


def in_interval_share(selected: Sequence[int], intervals: Sequence[tuple[int, int]]) -> float:
    """Fraction of selected frames lying inside any truth interval."""
    if not selected:
        return 0.0
    inside = sum(
        1 for i in selected if any(start <= i <= end for start, end in intervals)
    )
    return inside / len(selected)


def max_gap(selected: Sequence[int]) -> int:
    """Largest index gap between consecutive selected frames."""
    ordered = sorted(selected)
    if len(ordered) < 2:
        return 0
    return max(b - a for a, b in zip(ordered, ordered[1:]))


def _run_one(
    scenario: BenchScenario,
    strategy: str,
    alpha: float,
    fast_ratio: float,
    k: int,
    smoothing: SmoothingParams,
) -> BenchRow:
    signal, truth = synth_signal(scenario)
    started = time.perf_counter()
    if strategy == "tcs":
        plan = slow_fast_sample(
            signal,
            BudgetConfig(k=k, fast_ratio=fast_ratio, alpha0=alpha, smoothing=smoothing),
        )
        selected = list(plan.selected)
        clip_frames = sum(len(c) for c in plan.clips)
        n_slow, n_fast = len(plan.slow_indices), len(plan.fast_indices)
        fallback = plan.fallback_used.value
    elif strategy == "topk":
        selected = topk_sample(signal, k)
        clip_frames, n_slow, n_fast = 0, 0, 0
        fallback = Fallback.NONE.value
    elif strategy == "uniform":
        selected = uniform_sample(len(signal), k)
        clip_frames, n_slow, n_fast = 0, 0, 0
        fallback = Fallback.NONE.value
    else:
        raise InvalidParameterError(f"unknown strategy {strategy!r}")
    runtime = time.perf_counter() - started
    return BenchRow(
        scenario_seed=scenario.seed,
        strategy=strategy,
        alpha=alpha,
        fast_ratio=fast_ratio,
        k=k,
        t=scenario.t,
        hit_rate=hit_rate(selected, truth),
        in_interval_share=in_interval_share(selected, truth),
        max_gap=max_gap(selected),
        clip_frames=clip_frames,
        n_selected=len(selected),
        n_slow=n_slow,
        n_fast=n_fast,
        fallback=fallback,
        runtime_s=runtime,
    )


def run_bench(
    scenarios: Sequence[BenchScenario],
    strategies: Sequence[str],
    k: int,
    alphas: Sequence[float],
    fast_ratios: Sequence[float],
    smoothing: SmoothingParams | None = None,
    jobs: int = 1,
) -> BenchReport:
    """Run the full grid and return rows in deterministic order."""
    if not scenarios:
        raise InvalidInputError("at least one scenario is required")
    if not strategies:
        raise InvalidInputError("at least one strategy is required")
    for strategy in strategies:
        if strategy not in STRATEGIES:
            raise InvalidParameterError(f"unknown strategy {strategy!r}")
    if not alphas or not fast_ratios:
        raise InvalidInputError("alpha and fast-ratio grids must be non-empty")
    if jobs < 1:
        raise InvalidParameterError("jobs must be >= 1")
    smoothing = smoothing or SmoothingParams()
    tasks = [
        (scenario, strategy, alpha, ratio)
        for scenario in scenarios
        for strategy in strategies
        for alpha in alphas
        for ratio in fast_ratios
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(
                pool.map(lambda t: _run_one(t[0], t[1], t[2], t[3], k, smoothing), tasks)
            )
    else:
        rows = [_run_one(s, st, a, r, k, smoothing) for s, st, a, r in tasks]
    rows.sort(key=lambda r: (r.scenario_seed, r.strategy, r.alpha, r.fast_ratio))
    return BenchReport(rows=tuple(rows))


def write_csv(report: BenchReport, path: str | Path) -> None:
    names = [f.name for f in fields(BenchRow)]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(names)
        for row in report.rows:
            writer.writerow([getattr(row, name) for name in names])


def summarize(report: BenchReport) -> str:
    """Mean coverage per (strategy, alpha, fast_ratio), as a text table."""
    groups: dict[tuple[str, float, float], list[BenchRow]] = {}
    for row in report.rows:
        groups.setdefault((row.strategy, row.alpha, row.fast_ratio), []).append(row)
    lines = [
        f"{'strategy':<10} {'alpha':>6} {'fast_ratio':>10} {'hit_rate':>9} {'in_share':>9} {'max_gap':>8}"
    ]
    for (strategy, alpha, ratio), rows in sorted(groups.items()):
        mean_hit = sum(r.hit_rate for r in rows) / len(rows)
        mean_share = sum(r.in_interval_share for r in rows) / len(rows)
        mean_gap = sum(r.max_gap for r in rows) / len(rows)
        lines.append(
            f"{strategy:<10} {alpha:>6.3f} {ratio:>10.4f} {mean_hit:>9.3f} {mean_share:>9.3f} {mean_gap:>8.1f}"
        )
    return "\n".join(lines) + "\n"


def parse_intervals(text: str) -> tuple[tuple[int, int], ...]:
    """Parse "a-b,c-d" interval lists used on the command line."""
    intervals = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split("-")
        if len(parts) != 2:
            raise InvalidInputError(f"interval {chunk!r} is not of the form a-b")
        try:
            start, end = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InvalidInputError(f"interval {chunk!r} has non-integer bounds") from exc
        intervals.append((start, end))
    if not intervals:
        raise InvalidInputError("no intervals given")
    return tuple(intervals)


def parse_floats(text: str) -> tuple[float, ...]:
    """Parse a comma-separated float list."""
    try:
        values = tuple(float(chunk) for chunk in text.split(",") if chunk.strip())
    except ValueError as exc:
        raise InvalidInputError(f"bad float list {text!r}") from exc
    if not values:
        raise InvalidInputError("no values given")
    return values
