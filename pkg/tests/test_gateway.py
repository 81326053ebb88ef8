import json

import pytest
import requests

from vizrec.gateway import (
    AuthError,
    BackendConfig,
    BackendUnavailableError,
    Gateway,
    ResponseMalformedError,
    UnmatchedPromptError,
    mock_backend,
)


def ok_body(text, prompt_tokens=None, completion_tokens=None):
    body = {"choices": [{"message": {"content": text}}]}
    if prompt_tokens is not None:
        body["usage"] = {
            "prompt_tokens": prompt_tokens,
            "completion_tokens": completion_tokens,
        }
    return json.dumps(body)


class FakeClock:
    def __init__(self):
        self.now = 1000.0
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


def http_config(**overrides):
    defaults = dict(base_url="https://api.example.test/v1", model_name="m")
    defaults.update(overrides)
    return BackendConfig(**defaults)


class ScriptedTransport:
    """Returns a queued list of (status, body) outcomes; exceptions raise."""

    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = []

    def __call__(self, url, payload, headers, timeout):
        self.calls.append((url, payload, headers, timeout))
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def gateway_with(outcomes, clock=None, **config):
    clock = clock or FakeClock()
    transport = ScriptedTransport(outcomes)
    gw = Gateway(http_config(**config), transport=transport, clock=clock, sleep=clock.sleep)
    return gw, transport, clock


class TestDispatch:
    def test_success_decodes_text_and_usage(self):
        gw, transport, _ = gateway_with([(200, ok_body("hello", 7, 3))])
        completion = gw.complete("hi")
        assert completion.text == "hello"
        assert completion.token_counts == (7, 3)
        assert not completion.cached
        assert completion.retries == 0
        url = transport.calls[0][0]
        assert url == "https://api.example.test/v1/chat/completions"
        payload = transport.calls[0][1]
        assert payload["messages"] == [{"role": "user", "content": "hi"}]

    def test_retries_on_server_errors_with_backoff(self):
        gw, transport, clock = gateway_with(
            [(500, ""), (429, ""), (200, ok_body("done"))]
        )
        completion = gw.complete("hi")
        assert completion.retries == 2
        assert clock.sleeps == [0.5, 1.0]

    def test_timeouts_are_retryable(self):
        gw, _, _ = gateway_with(
            [requests.Timeout(), requests.ConnectionError(), (200, ok_body("done"))]
        )
        assert gw.complete("hi").text == "done"

    def test_exhaustion_raises(self):
        gw, _, _ = gateway_with([(503, "")] * 4, max_retries=3)
        with pytest.raises(BackendUnavailableError, match="HTTP 503"):
            gw.complete("hi")

    def test_non_retryable_status_fails_fast(self):
        gw, transport, clock = gateway_with([(400, "bad request")])
        with pytest.raises(BackendUnavailableError):
            gw.complete("hi")
        assert len(transport.calls) == 1
        assert clock.sleeps == []

    def test_auth_errors_never_retried(self):
        for status in (401, 403):
            gw, transport, _ = gateway_with([(status, "")])
            with pytest.raises(AuthError):
                gw.complete("hi")
            assert len(transport.calls) == 1

    def test_malformed_body(self):
        gw, _, _ = gateway_with([(200, "not json")])
        with pytest.raises(ResponseMalformedError):
            gw.complete("hi")


class TestSecrets:
    def test_key_resolved_from_env_into_header_only(self, monkeypatch, tmp_path):
        monkeypatch.setenv("TEST_API_KEY", "sk-sensitive-value")
        clock = FakeClock()
        transport = ScriptedTransport([(200, ok_body("fine"))])
        gw = Gateway(
            http_config(api_key_ref="TEST_API_KEY"),
            cache_path=tmp_path / "cache.jsonl",
            transport=transport,
            clock=clock,
            sleep=clock.sleep,
        )
        gw.complete("hi")
        headers = transport.calls[0][2]
        assert headers["Authorization"] == "Bearer sk-sensitive-value"
        assert "sk-sensitive-value" not in (tmp_path / "cache.jsonl").read_text()

    def test_key_never_appears_in_errors(self, monkeypatch):
        monkeypatch.setenv("TEST_API_KEY", "sk-sensitive-value")
        gw, _, _ = gateway_with([(500, "")] * 9, api_key_ref="TEST_API_KEY", max_retries=1)
        with pytest.raises(BackendUnavailableError) as info:
            gw.complete("hi")
        assert "sk-sensitive-value" not in str(info.value)

    def test_missing_env_var_sends_no_auth_header(self, monkeypatch):
        monkeypatch.delenv("ABSENT_KEY", raising=False)
        gw, transport, _ = gateway_with([(200, ok_body("fine"))], api_key_ref="ABSENT_KEY")
        gw.complete("hi")
        assert "Authorization" not in transport.calls[0][2]


class TestCache:
    def test_repeat_prompt_is_served_from_cache(self, tmp_path):
        clock = FakeClock()
        transport = ScriptedTransport([(200, ok_body("answer"))])
        gw = Gateway(
            http_config(),
            cache_path=tmp_path / "c.jsonl",
            transport=transport,
            clock=clock,
            sleep=clock.sleep,
        )
        first = gw.complete("same prompt")
        second = gw.complete("same prompt")
        assert not first.cached and second.cached
        assert second.text == "answer"
        assert len(transport.calls) == 1

    def test_cache_persists_across_instances(self, tmp_path):
        path = tmp_path / "c.jsonl"
        clock = FakeClock()
        gw1 = Gateway(
            http_config(),
            cache_path=path,
            transport=ScriptedTransport([(200, ok_body("answer"))]),
            clock=clock,
            sleep=clock.sleep,
        )
        gw1.complete("p")
        gw2 = Gateway(
            http_config(),
            cache_path=path,
            transport=ScriptedTransport([]),
            clock=clock,
            sleep=clock.sleep,
        )
        assert gw2.complete("p").cached

    def test_key_varies_with_model_and_temperature(self, tmp_path):
        path = tmp_path / "c.jsonl"
        clock = FakeClock()
        gw1 = Gateway(
            http_config(model_name="a"),
            cache_path=path,
            transport=ScriptedTransport([(200, ok_body("from a"))]),
            clock=clock,
            sleep=clock.sleep,
        )
        gw1.complete("p")
        gw2 = Gateway(
            http_config(model_name="b"),
            cache_path=path,
            transport=ScriptedTransport([(200, ok_body("from b"))]),
            clock=clock,
            sleep=clock.sleep,
        )
        assert gw2.complete("p").text == "from b"


class TestRateLimit:
    def test_sliding_window_throttles(self):
        clock = FakeClock()
        transport = ScriptedTransport([(200, ok_body("a")), (200, ok_body("b")), (200, ok_body("c"))])
        gw = Gateway(
            http_config(rate_limit=2),
            transport=transport,
            clock=clock,
            sleep=clock.sleep,
        )
        gw.complete("p1")
        gw.complete("p2")
        assert clock.sleeps == []
        gw.complete("p3")
        assert len(clock.sleeps) == 1
        assert clock.sleeps[0] == pytest.approx(60.0)

    def test_old_dispatches_age_out(self):
        clock = FakeClock()
        transport = ScriptedTransport([(200, ok_body("a")), (200, ok_body("b")), (200, ok_body("c"))])
        gw = Gateway(
            http_config(rate_limit=2),
            transport=transport,
            clock=clock,
            sleep=clock.sleep,
        )
        gw.complete("p1")
        clock.now += 61
        gw.complete("p2")
        gw.complete("p3")
        assert clock.sleeps == []


class TestScriptedBackend:
    def test_matching_pattern(self):
        gw = Gateway(mock_backend({r"revenue": "the answer"}))
        assert gw.complete("a question about revenue").text == "the answer"

    def test_unmatched_prompt(self):
        gw = Gateway(mock_backend({r"revenue": "x"}))
        with pytest.raises(UnmatchedPromptError):
            gw.complete("something else")

    def test_overlapping_patterns_rejected(self):
        gw = Gateway(mock_backend({r"rev": "x", r"revenue": "y"}))
        with pytest.raises(ValueError, match="disjoint"):
            gw.complete("revenue report")

    def test_scripted_responses_cache(self, tmp_path):
        gw = Gateway(mock_backend({r"q": "a"}), cache_path=tmp_path / "c.jsonl")
        assert not gw.complete("q").cached
        assert gw.complete("q").cached


class TestConfigValidation:
    def test_invariants(self):
        with pytest.raises(ValueError):
            BackendConfig(base_url="u", model_name="m", temperature=-1)
        with pytest.raises(ValueError):
            BackendConfig(base_url="u", model_name="m", timeout=0)
        with pytest.raises(ValueError):
            BackendConfig(base_url="u", model_name="m", max_retries=-1)
