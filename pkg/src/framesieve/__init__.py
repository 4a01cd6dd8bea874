"""Training-free keyframe selection for long-video question answering.

The pipeline turns a question into a handful of visual queries, scores
every frame of a 1 FPS timeline against them, and spends a fixed frame
budget densely inside high-relevance clips and sparsely outside them.
"""

from framesieve.errors import (
    ConfigurationError,
    FormatError,
    FrameSieveError,
    InsufficientPoolError,
    InvalidInputError,
    InvalidParameterError,
    ScoringError,
)
from framesieve.frames import (
    FrameEntry,
    FrameManifest,
    build_manifest,
    downscale_for_prompt,
    load_manifest,
    save_manifest,
)
from framesieve.kernels import BACKEND as kernel_backend_name
from framesieve.kernels import available_backends
from framesieve.queries import (
    ChatEndpointConfig,
    Question,
    QuerySet,
    QuerySource,
    build_query_prompt,
    generate_queries,
    parse_queries,
    select_prompt_frames,
)
from framesieve.sampler import (
    BudgetConfig,
    Fallback,
    SamplingPlan,
    sample_region,
    slow_fast_sample,
    split_budget,
    topk_sample,
    uniform_positions,
    uniform_sample,
)
from framesieve.scoring import (
    EmbeddingServiceScorer,
    MockScorer,
    PrecomputedScorer,
    ScoreMatrix,
    ScorerBackend,
    cosine_similarity,
    load_score_file,
    pool_scores,
    save_score_file,
    score_frames,
)
from framesieve.signal import (
    ClipInterval,
    SignalStats,
    SimilaritySignal,
    SmoothingParams,
    clip_pipeline,
    clips_from_smoothed,
    detect_peaks,
    dynamic_threshold,
    expand_clip,
    gaussian_smooth,
    merge_clips,
    signal_stats,
)
from framesieve.synth import BenchScenario, synth_signal

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the smoothing/peak kernel backend in use."""
    return kernel_backend_name


__all__ = [
    "BenchScenario",
    "BudgetConfig",
    "ChatEndpointConfig",
    "ClipInterval",
    "ConfigurationError",
    "EmbeddingServiceScorer",
    "Fallback",
    "FormatError",
    "FrameEntry",
    "FrameManifest",
    "FrameSieveError",
    "InsufficientPoolError",
    "InvalidInputError",
    "InvalidParameterError",
    "MockScorer",
    "PrecomputedScorer",
    "Question",
    "QuerySet",
    "QuerySource",
    "SamplingPlan",
    "ScoreMatrix",
    "ScorerBackend",
    "ScoringError",
    "SignalStats",
    "SimilaritySignal",
    "SmoothingParams",
    "available_backends",
    "build_manifest",
    "build_query_prompt",
    "clip_pipeline",
    "clips_from_smoothed",
    "cosine_similarity",
    "detect_peaks",
    "downscale_for_prompt",
    "dynamic_threshold",
    "expand_clip",
    "gaussian_smooth",
    "generate_queries",
    "kernel_backend",
    "load_manifest",
    "load_score_file",
    "merge_clips",
    "parse_queries",
    "pool_scores",
    "sample_region",
    "save_manifest",
    "save_score_file",
    "score_frames",
    "select_prompt_frames",
    "signal_stats",
    "slow_fast_sample",
    "split_budget",
    "synth_signal",
    "topk_sample",
    "uniform_positions",
    "uniform_sample",
    "__version__",
]
