"""Prompt building, reply parsing, and query generation against endpoints."""

import json

import httpx
import pytest

from framesieve.errors import ConfigurationError, InvalidInputError
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

QUESTION = Question(text="What happens after the car stops?")


class TestQuestion:
    def test_rejects_blank(self):
        with pytest.raises(InvalidInputError):
            Question(text="   ")

    def test_options_coerced_to_tuple(self):
        q = Question(text="Pick one.", options=["a", "b"])
        assert q.options == ("a", "b")


class TestQuerySet:
    def test_bounds(self):
        with pytest.raises(InvalidInputError):
            QuerySet(queries=())
        with pytest.raises(InvalidInputError):
            QuerySet(queries=("a", "b", "c", "d", "e"))
        with pytest.raises(InvalidInputError):
            QuerySet(queries=("ok", "  "))


class TestSelectPromptFrames:
    def test_quarter_of_budget(self):
        assert select_prompt_frames(100, 16) == [12, 37, 62, 87]

    def test_at_least_one_frame(self):
        assert select_prompt_frames(100, 1) == [50]
        assert select_prompt_frames(100, 3) == [50]

    def test_clamped_to_timeline(self):
        assert select_prompt_frames(2, 40) == [0, 1]

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            select_prompt_frames(0, 4)


class TestBuildQueryPrompt:
    def test_contains_question_verbatim(self):
        prompt = build_query_prompt(QUESTION)
        assert QUESTION.text in prompt
        assert "at most 4" in prompt
        assert "JSON array" in prompt

    def test_options_block(self):
        q = Question(text="Which one?", options=("red car", "blue bike"))
        prompt = build_query_prompt(q)
        assert "Options:" in prompt
        assert "- red car" in prompt
        assert "- blue bike" in prompt
        assert "Options:" not in build_query_prompt(QUESTION)

    def test_custom_budget(self):
        assert "at most 2" in build_query_prompt(QUESTION, n_q=2)


class TestParseQueries:
    def test_clean_json_array(self):
        qs = parse_queries('["red car", "night bridge"]')
        assert qs.queries == ("red car", "night bridge")
        assert qs.source is QuerySource.GENERATED

    def test_array_inside_prose(self):
        text = 'Sure! Here you go:\n["a dog", "a park"] hope that helps'
        assert parse_queries(text).queries == ("a dog", "a park")

    def test_array_inside_code_fence(self):
        text = '```json\n["person waving", "train door"]\n```'
        assert parse_queries(text).queries == ("person waving", "train door")

    def test_decoy_array_skipped(self):
        text = 'scores [1, 2, 3] then ["actual query"]'
        assert parse_queries(text).queries == ("actual query",)

    def test_over_length_list_truncated(self):
        text = json.dumps([f"query {i}" for i in range(9)])
        qs = parse_queries(text)
        assert len(qs.queries) == 4
        assert qs.queries[0] == "query 0"

    def test_blank_entries_dropped(self):
        assert parse_queries('["", "car", "  "]').queries == ("car",)

    def test_numbered_lines(self):
        text = "1. a red car\n2) a bridge at night\n3. a person waving"
        qs = parse_queries(text)
        assert qs.queries == ("a red car", "a bridge at night", "a person waving")

    def test_bulleted_lines_with_quotes(self):
        text = '- "a red car"\n* a bridge\n• a crowd'
        assert parse_queries(text).queries == ("a red car", "a bridge", "a crowd")

    def test_refusal_falls_back_to_question(self):
        qs = parse_queries("I cannot help with that.", fallback=QUESTION)
        assert qs.queries == (QUESTION.text,)
        assert qs.source is QuerySource.FALLBACK_QUESTION

    def test_unparseable_without_fallback_raises(self):
        with pytest.raises(InvalidInputError):
            parse_queries("no structure here")

    def test_empty_input_falls_back(self):
        qs = parse_queries("", fallback=QUESTION)
        assert qs.source is QuerySource.FALLBACK_QUESTION


def endpoint(url="https://chat.test/v1/chat/completions", **kwargs):
    kwargs.setdefault("api_key_env", None)
    return ChatEndpointConfig(base_url=url, model_name="test-model", **kwargs)


def chat_reply(text):
    return {"choices": [{"message": {"content": text}}]}


class TestGenerateQueriesMock:
    def test_reads_reply_file(self, tmp_path):
        reply = tmp_path / "reply.txt"
        reply.write_text('["a red car", "a bridge"]', encoding="utf-8")
        qs = generate_queries(QUESTION, [], endpoint(url=f"mock:{reply}"))
        assert qs.queries == ("a red car", "a bridge")
        assert qs.source is QuerySource.GENERATED

    def test_missing_reply_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            generate_queries(QUESTION, [], endpoint(url=f"mock:{tmp_path}/absent.txt"))

    def test_garbage_reply_falls_back(self, tmp_path):
        reply = tmp_path / "reply.txt"
        reply.write_text("total nonsense", encoding="utf-8")
        qs = generate_queries(QUESTION, [], endpoint(url=f"mock:{reply}"))
        assert qs.source is QuerySource.FALLBACK_QUESTION


class TestGenerateQueriesLive:
    def run(self, handler, prompt_frames=(), ep=None):
        client = httpx.Client(transport=httpx.MockTransport(handler))
        return generate_queries(
            QUESTION, list(prompt_frames), ep or endpoint(), client=client
        )

    def test_request_shape(self):
        bodies = []

        def handler(request):
            bodies.append(json.loads(request.content))
            return httpx.Response(200, json=chat_reply('["a red car"]'))

        fake_jpeg = b"\xff\xd8\xff\xe0 fake"
        fake_png = b"\x89PNG\r\n fake"
        qs = self.run(handler, prompt_frames=[fake_jpeg, fake_png])
        assert qs.queries == ("a red car",)
        body = bodies[0]
        assert body["model"] == "test-model"
        content = body["messages"][0]["content"]
        assert content[0]["type"] == "text"
        assert QUESTION.text in content[0]["text"]
        urls = [part["image_url"]["url"] for part in content[1:]]
        assert urls[0].startswith("data:image/jpeg;base64,")
        assert urls[1].startswith("data:image/png;base64,")

    def test_missing_credential_before_any_request(self, monkeypatch):
        monkeypatch.delenv("CHAT_KEY", raising=False)
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(200, json=chat_reply('["x"]'))

        with pytest.raises(ConfigurationError, match="CHAT_KEY"):
            self.run(handler, ep=endpoint(api_key_env="CHAT_KEY"))
        assert calls == []

    def test_credential_header(self, monkeypatch):
        monkeypatch.setenv("CHAT_KEY", "hunter2")
        seen = []

        def handler(request):
            seen.append(request.headers.get("authorization"))
            return httpx.Response(200, json=chat_reply('["x"]'))

        self.run(handler, ep=endpoint(api_key_env="CHAT_KEY"))
        assert seen == ["Bearer hunter2"]

    def test_always_failing_endpoint_degrades_to_fallback(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(503)

        qs = self.run(handler, ep=endpoint(max_retries=2))
        assert qs.source is QuerySource.FALLBACK_QUESTION
        assert qs.queries == (QUESTION.text,)
        assert len(calls) == 3

    def test_recovers_on_second_attempt(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) == 1:
                return httpx.Response(500)
            return httpx.Response(200, json=chat_reply('["a dog"]'))

        qs = self.run(handler, ep=endpoint(max_retries=2))
        assert qs.queries == ("a dog",)
        assert len(calls) == 2

    def test_structured_content_parts(self):
        def handler(request):
            parts = [{"type": "text", "text": '["a cat", "a sofa"]'}]
            return httpx.Response(
                200, json={"choices": [{"message": {"content": parts}}]}
            )

        assert self.run(handler).queries == ("a cat", "a sofa")

    def test_malformed_payload_falls_back(self):
        def handler(request):
            return httpx.Response(200, json={"unexpected": True})

        qs = self.run(handler, ep=endpoint(max_retries=0))
        assert qs.source is QuerySource.FALLBACK_QUESTION


class TestChatEndpointConfig:
    def test_mock_detection(self):
        assert endpoint(url="mock:/tmp/x.txt").is_mock
        assert not endpoint().is_mock

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            endpoint(url="")
        with pytest.raises(ConfigurationError):
            endpoint(timeout=0.0)
        with pytest.raises(ConfigurationError):
            endpoint(max_retries=-1)
