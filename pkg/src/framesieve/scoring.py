"""Per-query similarity matrices over the 1 FPS timeline.

Scores come from one of three interchangeable backends: a precomputed
score file, a remote embedding service (cosine similarity of text and
image embeddings), or a deterministic mock for hermetic runs.  Average
pooling collapses the matrix into the single per-frame signal the sampler
consumes.
"""

from __future__ import annotations

import base64
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import httpx
import numpy as np

from framesieve.errors import (
    ConfigurationError,
    FormatError,
    InvalidInputError,
    ScoringError,
)
from framesieve.frames import FrameManifest
from framesieve.queries import QuerySet
from framesieve.signal import SimilaritySignal

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """One row of per-frame similarities per query."""

    rows: np.ndarray
    query_labels: tuple[str, ...]
    fps: float = 1.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.rows, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInputError("score matrix must be 2-d and non-empty")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("score matrix values must all be finite")
        if len(self.query_labels) != arr.shape[0]:
            raise InvalidInputError(
                f"{arr.shape[0]} rows need {arr.shape[0]} labels, got {len(self.query_labels)}"
            )
        if not self.fps > 0:
            raise InvalidInputError("fps must be positive")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "rows", arr)
        object.__setattr__(self, "query_labels", tuple(self.query_labels))

    @property
    def n_queries(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_frames(self) -> int:
        return int(self.rows.shape[1])


def pool_scores(matrix: ScoreMatrix) -> SimilaritySignal:
    """Average-pool the per-query rows into one per-frame signal."""
    return SimilaritySignal(values=matrix.rows.mean(axis=0), fps=matrix.fps)


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of two vectors, clamped to [-1, 1] against rounding."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.ndim != 1 or va.shape != vb.shape or va.size == 0:
        raise InvalidInputError("vectors must share a non-empty 1-d shape")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise InvalidInputError("zero-norm vector has no direction")
    return float(np.clip(float(va @ vb) / (norm_a * norm_b), -1.0, 1.0))


def save_score_file(matrix: ScoreMatrix, path: str | Path) -> None:
    """Write the score-file JSON; floats keep full round-trip precision."""
    payload = {
        "fps": matrix.fps,
        "num_frames": matrix.n_frames,
        "queries": list(matrix.query_labels),
        "scores": [[float(v) for v in row] for row in matrix.rows],
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_score_file(path: str | Path) -> ScoreMatrix:
    """Read and validate a score file, locating any malformed row/column."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable score file {path}: {exc}") from exc
    if not isinstance(payload, dict) or not {"fps", "num_frames", "queries", "scores"} <= set(payload):
        raise FormatError("score file must carry fps, num_frames, queries, scores")
    fps = payload["fps"]
    if not isinstance(fps, (int, float)) or isinstance(fps, bool) or not fps > 0:
        raise FormatError(f"fps must be a positive number, got {fps!r}")
    num_frames = payload["num_frames"]
    if not isinstance(num_frames, int) or isinstance(num_frames, bool) or num_frames < 1:
        raise FormatError(f"num_frames must be a positive integer, got {num_frames!r}")
    queries = payload["queries"]
    if (
        not isinstance(queries, list)
        or not queries
        or not all(isinstance(q, str) for q in queries)
    ):
        raise FormatError("queries must be a non-empty list of strings")
    scores = payload["scores"]
    if not isinstance(scores, list) or len(scores) != len(queries):
        raise FormatError(
            f"scores must hold one row per query ({len(queries)}), got {len(scores) if isinstance(scores, list) else type(scores).__name__}"
        )
    for row_idx, row in enumerate(scores):
        if not isinstance(row, list) or len(row) != num_frames:
            raise FormatError(
                f"row {row_idx} has {len(row) if isinstance(row, list) else 'no'} values, expected {num_frames}"
            )
        for col_idx, value in enumerate(row):
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not np.isfinite(value):
                raise FormatError(f"row {row_idx}, column {col_idx}: non-finite or non-numeric value {value!r}")
    return ScoreMatrix(
        rows=np.asarray(scores, dtype=np.float64),
        query_labels=tuple(queries),
        fps=float(fps),
    )


class ScorerBackend:
    """Interface of the interchangeable query-frame scorers."""

    def score(self, queries: QuerySet, manifest: FrameManifest) -> ScoreMatrix:
        raise NotImplementedError


@dataclass
class PrecomputedScorer(ScorerBackend):
    """Scores loaded from a score file instead of computed."""

    path: str | Path

    def score(self, queries: QuerySet, manifest: FrameManifest) -> ScoreMatrix:
        matrix = load_score_file(self.path)
        if matrix.n_frames != len(manifest):
            raise FormatError(
                f"score file covers {matrix.n_frames} frames but the manifest has {len(manifest)}"
            )
        return matrix


@dataclass
class MockScorer(ScorerBackend):
    """Deterministic stand-in scorer: a fixed matrix, or seeded synthesis."""

    seed: int | None = None
    fixture: np.ndarray | Sequence[Sequence[float]] | None = None

    def __post_init__(self) -> None:
        if (self.seed is None) == (self.fixture is None):
            raise ConfigurationError("give exactly one of seed or fixture")

    def score(self, queries: QuerySet, manifest: FrameManifest) -> ScoreMatrix:
        if self.fixture is not None:
            return ScoreMatrix(
                rows=np.asarray(self.fixture, dtype=np.float64),
                query_labels=queries.queries,
                fps=manifest.fps,
            )
        t = len(manifest)
        rng = np.random.default_rng(self.seed)
        idx = np.arange(t, dtype=np.float64)
        rows = np.empty((len(queries.queries), t), dtype=np.float64)
        for q in range(rows.shape[0]):
            row = rng.normal(0.05, 0.02, size=t)
            for _ in range(rng.integers(1, 4)):
                center = rng.uniform(0, t)
                width = rng.uniform(max(2.0, t / 60.0), max(4.0, t / 15.0))
                row += rng.uniform(0.3, 0.9) * np.exp(
                    -((idx - center) ** 2) / (2.0 * width * width)
                )
            rows[q] = np.clip(row, 0.0, 1.0)
        return ScoreMatrix(rows=rows, query_labels=queries.queries, fps=manifest.fps)


@dataclass
class EmbeddingServiceScorer(ScorerBackend):
    """Cosine similarity of text and image embeddings from a remote service.

    Frames are embedded in batches, optionally in parallel; row assembly
    preserves frame order, so results are deterministic for fixed replies.
    """

    base_url: str
    api_key_env: str | None = None
    batch_size: int = 16
    timeout: float = 30.0
    max_retries: int = 2
    max_workers: int = 1
    client: httpx.Client | None = None

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ConfigurationError("base_url must be non-empty")
        if self.batch_size < 1 or self.max_workers < 1:
            raise ConfigurationError("batch_size and max_workers must be >= 1")

    def score(self, queries: QuerySet, manifest: FrameManifest) -> ScoreMatrix:
        headers = {}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise ConfigurationError(
                    f"environment variable {self.api_key_env} is not set"
                )
            headers["Authorization"] = f"Bearer {key}"

        own_client = self.client is None
        http = self.client or httpx.Client(timeout=self.timeout)
        try:
            text_vecs = self._embed(http, headers, list(queries.queries), "text")
            images = [
                base64.b64encode(Path(entry.path).read_bytes()).decode("ascii")
                for entry in manifest.entries
            ]
            batches = [
                images[i : i + self.batch_size]
                for i in range(0, len(images), self.batch_size)
            ]
            if self.max_workers > 1 and len(batches) > 1:
                with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                    batch_vecs = list(
                        pool.map(lambda b: self._embed(http, headers, b, "image"), batches)
                    )
            else:
                batch_vecs = [self._embed(http, headers, b, "image") for b in batches]
            image_vecs = [vec for batch in batch_vecs for vec in batch]
        finally:
            if own_client:
                http.close()

        rows = np.empty((len(text_vecs), len(image_vecs)), dtype=np.float64)
        for qi, tv in enumerate(text_vecs):
            for fi, iv in enumerate(image_vecs):
                rows[qi, fi] = cosine_similarity(tv, iv)
        return ScoreMatrix(rows=rows, query_labels=queries.queries, fps=manifest.fps)

    def _embed(
        self, http: httpx.Client, headers: dict, inputs: list[str], modality: str
    ) -> list[list[float]]:
        payload = {"inputs": inputs, "modality": modality}
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = http.post(self.base_url, json=payload, headers=headers)
                response.raise_for_status()
                embeddings = response.json()["embeddings"]
                if len(embeddings) != len(inputs):
                    raise ValueError(
                        f"service returned {len(embeddings)} embeddings for {len(inputs)} inputs"
                    )
                return embeddings
            except (httpx.HTTPError, ValueError, KeyError) as exc:
                last_error = exc
                logger.warning(
                    "embedding request attempt %d/%d failed: %s",
                    attempt + 1,
                    self.max_retries + 1,
                    exc,
                )
        raise ScoringError(
            f"embedding service failed after {self.max_retries + 1} attempts: {last_error}"
        )


def score_frames(
    queries: QuerySet, manifest: FrameManifest, backend: ScorerBackend
) -> ScoreMatrix:
    """Score every manifest frame against every query via the backend."""
    matrix = backend.score(queries, manifest)
    if matrix.n_frames != len(manifest):
        raise FormatError(
            f"scorer produced {matrix.n_frames} columns for {len(manifest)} frames"
        )
    return matrix
