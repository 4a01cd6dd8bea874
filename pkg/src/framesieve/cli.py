"""Command-line surface: plan, run, bench.

``plan`` turns a precomputed score file into a frame-selection plan.
``run`` drives the full pipeline (query generation, scoring, planning).
``bench`` compares strategies on synthetic timelines with known truth.

Exit codes: 0 success, 2 usage or validation, 3 runtime failure.
"""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click

from framesieve.bench import (
    ALPHA_GRID,
    FAST_RATIO_GRID,
    STRATEGIES,
    parse_floats,
    parse_intervals,
    run_bench,
    summarize,
    write_csv,
)
from framesieve.errors import (
    ConfigurationError,
    FormatError,
    FrameSieveError,
    InvalidInputError,
    InvalidParameterError,
    ScoringError,
)
from framesieve.frames import build_manifest, downscale_for_prompt
from framesieve.queries import (
    ChatEndpointConfig,
    Question,
    QuerySet,
    QuerySource,
    generate_queries,
    select_prompt_frames,
)
from framesieve.sampler import (
    BudgetConfig,
    Fallback,
    slow_fast_sample,
    topk_sample,
    uniform_sample,
)
from framesieve.scoring import (
    EmbeddingServiceScorer,
    MockScorer,
    load_score_file,
    pool_scores,
    score_frames,
)
from framesieve.signal import SimilaritySignal
from framesieve.synth import BenchScenario

_USAGE_ERRORS = (
    InvalidInputError,
    InvalidParameterError,
    FormatError,
    ConfigurationError,
    FileNotFoundError,
)


def _guarded(fn):
    """Map domain errors onto the exit-code convention."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _USAGE_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)
        except ScoringError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(3)
        except FrameSieveError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(3)

    return wrapper


def _strategy_fields(signal: SimilaritySignal, strategy: str, k: int, alpha: float, fast_ratio: float) -> dict:
    """Selection fields of the plan payload; baselines leave the
    adaptive provenance empty rather than inventing it."""
    if strategy == "tcs":
        plan = slow_fast_sample(
            signal, BudgetConfig(k=k, fast_ratio=fast_ratio, alpha0=alpha)
        )
        return {
            "alpha_final": plan.alpha_final,
            "alpha_history": [list(step) for step in plan.alpha_history],
            "clips": [[clip.start, clip.end] for clip in plan.clips],
            "slow_indices": list(plan.slow_indices),
            "fast_indices": list(plan.fast_indices),
            "selected": list(plan.selected),
            "fallback_used": plan.fallback_used.value,
        }
    if strategy == "topk":
        selected = topk_sample(signal, k)
    elif strategy == "uniform":
        selected = uniform_sample(len(signal), k)
    else:
        raise InvalidParameterError(f"unknown strategy {strategy!r}")
    return {
        "alpha_final": None,
        "alpha_history": [],
        "clips": [],
        "slow_indices": [],
        "fast_indices": [],
        "selected": selected,
        "fallback_used": Fallback.NONE.value,
    }


def _plan_payload(
    signal: SimilaritySignal,
    video_id: str,
    strategy: str,
    k: int,
    alpha: float,
    fast_ratio: float,
    queries_source: str,
    queries_items: list[str],
) -> dict:
    payload = {
        "video_id": video_id,
        "k": k,
        "strategy": strategy,
        "queries": {"source": queries_source, "items": queries_items},
    }
    payload.update(_strategy_fields(signal, strategy, k, alpha, fast_ratio))
    return payload


def _write_plan(payload: dict, output: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output == "-":
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text, encoding="utf-8")


@click.group()
def main() -> None:
    """Query-aware keyframe selection for long-video question answering."""


@main.command("plan")
@click.option("--scores", "scores_path", required=True, type=click.Path(), help="Score file (JSON).")
@click.option("--k", type=int, required=True, help="Frame budget.")
@click.option("--alpha", type=float, default=0.5, show_default=True, help="Initial threshold multiplier.")
@click.option("--fast-ratio", type=float, default=0.25, show_default=True, help="Share of the budget outside clips.")
@click.option("--strategy", type=click.Choice(STRATEGIES), default="tcs", show_default=True)
@click.option("--output", default="-", show_default=True, help="Plan file path, or - for stdout.")
@_guarded
def cmd_plan(scores_path: str, k: int, alpha: float, fast_ratio: float, strategy: str, output: str) -> None:
    """Build a selection plan from a precomputed score file."""
    matrix = load_score_file(scores_path)
    payload = _plan_payload(
        signal=pool_scores(matrix),
        video_id=Path(scores_path).stem,
        strategy=strategy,
        k=k,
        alpha=alpha,
        fast_ratio=fast_ratio,
        queries_source="precomputed",
        queries_items=list(matrix.query_labels),
    )
    _write_plan(payload, output)


@main.command("run")
@click.option("--question", default=None, help="Natural-language question about the video.")
@click.option("--options", multiple=True, help="Answer option (repeatable).")
@click.option("--scores", "scores_path", default=None, type=click.Path(), help="Precomputed score file.")
@click.option("--frames-dir", default=None, type=click.Path(), help="Directory of frame_%06d.jpg images at 1 FPS.")
@click.option("--endpoint-url", default=None, help="Chat endpoint for query generation; mock:<path> replays a canned reply.")
@click.option("--embed-url", default=None, help="Embedding service endpoint for scoring.")
@click.option("--mock-scorer", is_flag=True, help="Score frames with the seeded mock backend.")
@click.option("--model", default="mock-model", show_default=True, help="Model name sent to the chat endpoint.")
@click.option("--api-key-env", default="FRAMESIEVE_API_KEY", show_default=True, help="Env var holding the service credential.")
@click.option("--k", type=int, required=True, help="Frame budget.")
@click.option("--alpha", type=float, default=0.5, show_default=True)
@click.option("--fast-ratio", type=float, default=0.25, show_default=True)
@click.option("--strategy", type=click.Choice(STRATEGIES), default="tcs", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the mock scorer.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker threads for embedding requests.")
@click.option("--output", default="-", show_default=True, help="Plan file path, or - for stdout.")
@_guarded
def cmd_run(
    question: str | None,
    options: tuple[str, ...],
    scores_path: str | None,
    frames_dir: str | None,
    endpoint_url: str | None,
    embed_url: str | None,
    mock_scorer: bool,
    model: str,
    api_key_env: str,
    k: int,
    alpha: float,
    fast_ratio: float,
    strategy: str,
    seed: int,
    jobs: int,
    output: str,
) -> None:
    """Run the pipeline end to end and write the selection plan.

    Without --question the score file is used as-is and the query stage
    is skipped.  With --question, queries are generated through the chat
    endpoint and frames are scored by exactly one of --scores,
    --embed-url, or --mock-scorer.
    """
    if jobs < 1:
        raise InvalidParameterError("jobs must be >= 1")
    manifest = build_manifest(frames_dir) if frames_dir else None

    if question is None:
        if scores_path is None:
            raise InvalidInputError("either --question or --scores is required")
        matrix = load_score_file(scores_path)
        qset = QuerySet(
            queries=tuple(matrix.query_labels),
            n_q_max=max(len(matrix.query_labels), 1),
            source=QuerySource.GENERATED,
        )
        source_label = "precomputed"
    else:
        if endpoint_url is None:
            raise InvalidInputError("--endpoint-url is required with --question")
        chosen = sum([scores_path is not None, embed_url is not None, mock_scorer])
        if chosen != 1:
            raise InvalidInputError(
                "choose exactly one scorer: --scores, --embed-url, or --mock-scorer"
            )
        endpoint = ChatEndpointConfig(
            base_url=endpoint_url, model_name=model, api_key_env=api_key_env or None
        )
        prompt_frames: list[bytes] = []
        if manifest is not None:
            picked = select_prompt_frames(len(manifest), k)
            prompt_frames = [downscale_for_prompt(manifest.entries[i]) for i in picked]
        qset = generate_queries(
            Question(text=question, options=tuple(options)), prompt_frames, endpoint
        )
        source_label = qset.source.value
        if scores_path is not None:
            matrix = load_score_file(scores_path)
            if manifest is not None and matrix.n_frames != len(manifest):
                raise FormatError(
                    f"score file covers {matrix.n_frames} frames but the manifest has {len(manifest)}"
                )
        elif embed_url is not None:
            if manifest is None:
                raise InvalidInputError("--embed-url requires --frames-dir")
            backend = EmbeddingServiceScorer(
                base_url=embed_url, api_key_env=api_key_env or None, max_workers=jobs
            )
            matrix = score_frames(qset, manifest, backend)
        else:
            if manifest is None:
                raise InvalidInputError("--mock-scorer requires --frames-dir")
            matrix = score_frames(qset, manifest, MockScorer(seed=seed))

    if manifest is not None:
        video_id = manifest.video_id
    else:
        video_id = Path(scores_path).stem if scores_path else "unknown"
    payload = _plan_payload(
        signal=pool_scores(matrix),
        video_id=video_id,
        strategy=strategy,
        k=k,
        alpha=alpha,
        fast_ratio=fast_ratio,
        queries_source=source_label,
        queries_items=list(qset.queries),
    )
    _write_plan(payload, output)


@main.command("bench")
@click.option("--t", type=int, default=600, show_default=True, help="Timeline length in frames.")
@click.option("--k", type=int, default=16, show_default=True, help="Frame budget.")
@click.option("--seed", type=int, default=0, show_default=True, help="Base scenario seed.")
@click.option("--num-seeds", type=int, default=10, show_default=True, help="Number of seeded scenarios.")
@click.option("--strategies", default="tcs,topk,uniform", show_default=True, help="Comma-separated strategy list.")
@click.option("--alpha", type=float, default=0.5, show_default=True, help="Threshold multiplier when not swept.")
@click.option("--fast-ratio", type=float, default=0.25, show_default=True, help="Fast share when not swept.")
@click.option("--sweep", type=click.Choice(["none", "alpha", "fast-ratio", "both"]), default="none", show_default=True)
@click.option("--intervals", default="120-180,400-460", show_default=True, help="Truth intervals, a-b comma-separated.")
@click.option("--amplitudes", default="0.9,0.7", show_default=True, help="Bump amplitude per interval.")
@click.option("--noise-std", type=float, default=0.05, show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path(), help="CSV destination.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker threads.")
@_guarded
def cmd_bench(
    t: int,
    k: int,
    seed: int,
    num_seeds: int,
    strategies: str,
    alpha: float,
    fast_ratio: float,
    sweep: str,
    intervals: str,
    amplitudes: str,
    noise_std: float,
    output_path: str,
    jobs: int,
) -> None:
    """Benchmark strategies on seeded synthetic timelines."""
    if num_seeds < 1:
        raise InvalidParameterError("num-seeds must be >= 1")
    strategy_list = [s.strip() for s in strategies.split(",") if s.strip()]
    if not strategy_list:
        raise InvalidParameterError("strategy list must be non-empty")
    truth = parse_intervals(intervals)
    amps = parse_floats(amplitudes)
    scenarios = [
        BenchScenario(
            t=t,
            truth_intervals=truth,
            bump_amplitudes=amps,
            noise_std=noise_std,
            seed=seed + i,
        )
        for i in range(num_seeds)
    ]
    alphas = ALPHA_GRID if sweep in ("alpha", "both") else (alpha,)
    ratios = FAST_RATIO_GRID if sweep in ("fast-ratio", "both") else (fast_ratio,)
    report = run_bench(
        scenarios, strategy_list, k=k, alphas=alphas, fast_ratios=ratios, jobs=jobs
    )
    write_csv(report, output_path)
    click.echo(summarize(report), nl=False)
    click.echo(f"wrote {len(report.rows)} rows to {output_path}")


if __name__ == "__main__":
    main()
