"""Multi-perspective query generation.

Turns a question into up to four short visual queries by prompting a
chat-completion-style multimodal endpoint with the question and a handful
of low-resolution frames.  Parsing is deliberately forgiving: if the model
reply cannot be understood, or the endpoint is unreachable, the pipeline
falls back to the raw question as its single query and keeps going.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import httpx

from framesieve.errors import ConfigurationError, InvalidInputError, InvalidParameterError
from framesieve.sampler import uniform_sample

logger = logging.getLogger(__name__)

DEFAULT_MAX_QUERIES = 4

# The exact instruction sent to the model; kept here so runs are reproducible.
PROMPT_TEMPLATE = """\
You are helping retrieve the most relevant frames of a long video.

Question: {question}
{options_block}\
Write at most {n_q} short visual descriptions that an image-text matcher \
could use to find frames relevant to answering this question. Cover \
different perspectives: objects, scenes, and actions. Keep each \
description under a dozen words. Respond with a JSON array of strings and \
nothing else.

Example response: ["red car crossing a bridge", "crowd cheering in a stadium"]
"""


class QuerySource(str, Enum):
    GENERATED = "generated"
    FALLBACK_QUESTION = "fallback_question"


@dataclass(frozen=True)
class Question:
    """A question, optionally multiple-choice."""

    text: str
    options: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.text or not self.text.strip():
            raise InvalidInputError("question text must be non-empty")
        object.__setattr__(self, "options", tuple(self.options))


@dataclass(frozen=True)
class QuerySet:
    """The visual queries used for scoring, plus how they were obtained."""

    queries: tuple[str, ...]
    n_q_max: int = DEFAULT_MAX_QUERIES
    source: QuerySource = QuerySource.GENERATED
    raw_response: str = ""

    def __post_init__(self) -> None:
        if not 1 <= len(self.queries) <= self.n_q_max:
            raise InvalidInputError(
                f"need 1..{self.n_q_max} queries, got {len(self.queries)}"
            )
        if any(not q.strip() for q in self.queries):
            raise InvalidInputError("queries must be non-empty after trimming")
        object.__setattr__(self, "queries", tuple(self.queries))


@dataclass(frozen=True)
class ChatEndpointConfig:
    """Where to reach the chat-completions endpoint and how to authenticate.

    ``base_url`` is the full endpoint URL.  The scheme ``mock:<path>`` skips
    the network entirely and reads the canned model reply from a text file,
    which keeps demos and tests hermetic.
    """

    base_url: str
    model_name: str
    api_key_env: str | None = "FRAMESIEVE_API_KEY"
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ConfigurationError("base_url must be non-empty")
        if not self.timeout > 0:
            raise ConfigurationError("timeout must be positive")
        if self.max_retries < 0:
            raise ConfigurationError("max_retries must be >= 0")

    @property
    def is_mock(self) -> bool:
        return self.base_url.startswith("mock:")


def select_prompt_frames(t: int, k: int) -> list[int]:
    """Timeline indices of the low-res prompt frames: a quarter of the
    frame budget (at least one), spread uniformly and clamped to T."""
    if t < 1 or k < 1:
        raise InvalidInputError("t and k must both be >= 1")
    return uniform_sample(t, max(1, k // 4))


def build_query_prompt(question: Question, n_q: int = DEFAULT_MAX_QUERIES) -> str:
    """Deterministic prompt asking for a JSON array of visual queries."""
    if n_q < 1:
        raise InvalidParameterError("n_q must be >= 1")
    if question.options:
        lines = "\n".join(f"- {opt}" for opt in question.options)
        options_block = f"Options:\n{lines}\n"
    else:
        options_block = ""
    return PROMPT_TEMPLATE.format(
        question=question.text, options_block=options_block, n_q=n_q
    )


def parse_queries(
    response_text: str, n_q: int = DEFAULT_MAX_QUERIES, fallback: Question | None = None
) -> QuerySet:
    """Extract up to ``n_q`` queries from a model reply; total by design.

    Tries, in order: the first JSON array of strings anywhere in the text,
    then numbered or bulleted lines, then the fallback question verbatim.
    """
    if n_q < 1:
        raise InvalidParameterError("n_q must be >= 1")
    text = response_text or ""
    items = _first_string_array(text)
    if items is None:
        items = _listed_lines(text)
    cleaned = [_unquote(item) for item in items or []]
    cleaned = [q for q in cleaned if q][:n_q]
    if cleaned:
        return QuerySet(
            queries=tuple(cleaned), n_q_max=n_q, source=QuerySource.GENERATED, raw_response=text
        )
    if fallback is None:
        raise InvalidInputError("unparseable response and no fallback question given")
    return QuerySet(
        queries=(fallback.text,),
        n_q_max=n_q,
        source=QuerySource.FALLBACK_QUESTION,
        raw_response=text,
    )


def _first_string_array(text: str) -> list[str] | None:
    decoder = json.JSONDecoder()
    for pos, char in enumerate(text):
        if char != "[":
            continue
        try:
            value, _ = decoder.raw_decode(text, pos)
        except ValueError:
            continue
        if (
            isinstance(value, list)
            and value
            and all(isinstance(v, str) for v in value)
            and any(v.strip() for v in value)
        ):
            return value
    return None


_LISTED_LINE_RE = re.compile(r"^\s*(?:\d+[.)]\s*|[-*•]\s+)(.*\S)\s*$")


def _listed_lines(text: str) -> list[str] | None:
    found = []
    for line in text.splitlines():
        match = _LISTED_LINE_RE.match(line)
        if match:
            found.append(match.group(1))
    return found or None


def _unquote(item: str) -> str:
    item = item.strip()
    if len(item) >= 2 and item[0] == item[-1] and item[0] in "\"'":
        item = item[1:-1].strip()
    return item


def generate_queries(
    question: Question,
    prompt_frames: Sequence[bytes],
    endpoint: ChatEndpointConfig,
    n_q: int = DEFAULT_MAX_QUERIES,
    client: httpx.Client | None = None,
) -> QuerySet:
    """Ask the endpoint for visual queries; never raises past configuration.

    ``prompt_frames`` are already-downscaled image bytes attached to the
    request as data URLs.  Transport and HTTP failures are retried
    ``max_retries`` times and then degrade to the question-only fallback,
    so scoring can always proceed.
    """
    if endpoint.is_mock:
        reply = _read_mock_reply(endpoint.base_url)
        return parse_queries(reply, n_q=n_q, fallback=question)

    headers = {}
    if endpoint.api_key_env:
        key = os.environ.get(endpoint.api_key_env)
        if not key:
            raise ConfigurationError(
                f"environment variable {endpoint.api_key_env} is not set"
            )
        headers["Authorization"] = f"Bearer {key}"

    body = _chat_request_body(question, prompt_frames, endpoint.model_name, n_q)
    own_client = client is None
    http = client or httpx.Client(timeout=endpoint.timeout)
    try:
        last_error: Exception | None = None
        for attempt in range(endpoint.max_retries + 1):
            try:
                response = http.post(endpoint.base_url, json=body, headers=headers)
                response.raise_for_status()
                reply = _extract_message_text(response.json())
                return parse_queries(reply, n_q=n_q, fallback=question)
            except (httpx.HTTPError, ValueError, KeyError) as exc:
                last_error = exc
                logger.warning(
                    "query generation attempt %d/%d failed: %s",
                    attempt + 1,
                    endpoint.max_retries + 1,
                    exc,
                )
        logger.warning("query generation gave up, falling back to the question: %s", last_error)
        return QuerySet(
            queries=(question.text,),
            n_q_max=n_q,
            source=QuerySource.FALLBACK_QUESTION,
            raw_response="",
        )
    finally:
        if own_client:
            http.close()


def _read_mock_reply(base_url: str) -> str:
    path = Path(base_url[len("mock:") :])
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"mock endpoint file unreadable: {path}: {exc}") from exc


def _chat_request_body(
    question: Question, prompt_frames: Sequence[bytes], model_name: str, n_q: int
) -> dict:
    content: list[dict] = [{"type": "text", "text": build_query_prompt(question, n_q)}]
    for blob in prompt_frames:
        content.append({"type": "image_url", "image_url": {"url": _data_url(blob)}})
    return {"model": model_name, "messages": [{"role": "user", "content": content}]}


def _data_url(blob: bytes) -> str:
    mime = "image/png" if blob.startswith(b"\x89PNG") else "image/jpeg"
    return f"data:{mime};base64,{base64.b64encode(blob).decode('ascii')}"


def _extract_message_text(payload: dict) -> str:
    content = payload["choices"][0]["message"]["content"]
    if isinstance(content, str):
        return content
    if isinstance(content, list):
        # Some servers return structured parts; keep the text ones.
        return "\n".join(
            part.get("text", "") for part in content if isinstance(part, dict)
        )
    raise ValueError("unsupported message content shape")
