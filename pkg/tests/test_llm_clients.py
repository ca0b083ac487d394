"""Tests for the chat-completion and offline mutation clients."""
import json

import httpx
import pytest

from app.dsl.program import parse
from app.exceptions import ConfigError, MutationClientError
from app.graph.prompt import extract_programs
from app.models.evolution import Candidate
from app.utils.llm_client import HttpClientConfig, HttpMutationClient
from app.utils.llm_mock import MockMutationClient

ENDPOINT = "https://llm.test/v1/chat/completions"


def _reply(content):
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def _client(handler, retry_budget=2):
    config = HttpClientConfig(
        endpoint=ENDPOINT,
        model="test-model",
        retry_budget=retry_budget,
        backoff_factor=0.0,
        api_key_env="UQEVO_TEST_KEY",
        timeout=5.0,
    )
    return HttpMutationClient(config, transport=httpx.MockTransport(handler))


@pytest.fixture(autouse=True)
def api_key(monkeypatch):
    monkeypatch.setenv("UQEVO_TEST_KEY", "secret")


async def test_successful_request_sends_chat_payload():
    """The prompt goes out as the user message with the bearer key."""
    seen = []

    def handler(request):
        seen.append(request)
        return _reply("```\n-sum(lp)\n```")

    texts = await _client(handler).propose("PROMPT", 1)
    assert texts == ["```\n-sum(lp)\n```"]
    body = json.loads(seen[0].content)
    assert body["model"] == "test-model"
    assert body["messages"][-1] == {"role": "user", "content": "PROMPT"}
    assert seen[0].headers["Authorization"] == "Bearer secret"


async def test_retries_server_errors():
    """A 500 followed by a 200 succeeds on the second attempt."""
    statuses = iter([500, 200])

    def handler(request):
        status = next(statuses)
        return _reply("n") if status == 200 else httpx.Response(status)

    assert await _client(handler).propose("p", 1) == ["n"]


async def test_gives_up_after_retry_budget():
    """Persistent 503s exhaust retry_budget + 1 attempts."""
    calls = []

    def handler(request):
        calls.append(request)
        return httpx.Response(503)

    with pytest.raises(MutationClientError) as info:
        await _client(handler, retry_budget=2).propose("p", 1)
    assert info.value.attempts == 3
    assert info.value.status_code == 503
    assert len(calls) == 3


async def test_client_errors_fail_fast():
    """Non-retryable 4xx responses are not retried."""
    calls = []

    def handler(request):
        calls.append(request)
        return httpx.Response(401, text="bad key")

    with pytest.raises(MutationClientError) as info:
        await _client(handler).propose("p", 1)
    assert info.value.status_code == 401
    assert len(calls) == 1


async def test_malformed_response():
    """A 200 without choices is a client error."""
    with pytest.raises(MutationClientError, match="malformed"):
        await _client(lambda request: httpx.Response(200, json={})).propose("p", 1)


async def test_partial_failure_returns_received_texts():
    """Only a round where every request fails raises."""
    calls = []

    def handler(request):
        calls.append(request)
        return _reply("n") if len(calls) == 1 else httpx.Response(400)

    assert await _client(handler).propose("p", 3) == ["n"]


def test_missing_api_key(monkeypatch):
    """The client refuses to start without its key variable."""
    monkeypatch.delenv("UQEVO_TEST_KEY")
    with pytest.raises(ConfigError, match="UQEVO_TEST_KEY"):
        _client(lambda request: _reply("n"))


async def test_mock_client_is_deterministic():
    """Mock proposals depend only on seed, round and parents."""
    parents = [Candidate(id=0, source="-sum(lp)", fitness=0.7, round=0, proposer="seed")]
    first = await MockMutationClient(3).propose("ignored", 4, parents=parents, round_index=2)
    second = await MockMutationClient(3).propose("other", 4, parents=parents, round_index=2)
    assert first == second
    assert len(first) == 4
    for reply in first:
        (source,) = extract_programs(reply)
        assert parse(source).canonical == source


async def test_mock_client_without_parents():
    """No parents, no proposals."""
    assert await MockMutationClient(0).propose("p", 2) == []
