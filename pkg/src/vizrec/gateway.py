"""Uniform chat-completion client: caching, bounded retries, rate limiting,
and a deterministic scripted backend for tests and offline pipeline runs.

The wire protocol is the chat-completion JSON shape (messages array with
role/content) POSTed to {base_url}/chat/completions. API keys are resolved
from the environment variable named by api_key_ref and never logged,
cached, or embedded in errors.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import requests

from .prompts import PromptText

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class BackendUnavailableError(RuntimeError):
    """Retries exhausted against a failing backend."""


class AuthError(RuntimeError):
    """Backend rejected credentials (401/403); never retried."""


class ResponseMalformedError(RuntimeError):
    """Backend body was not a decodable chat completion."""


class UnmatchedPromptError(KeyError):
    """No scripted pattern applies to the prompt."""


@dataclass(frozen=True)
class BackendConfig:
    base_url: str
    model_name: str
    api_key_ref: str = ""
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 30.0
    max_retries: int = 3
    rate_limit: int = 60
    concurrency: int = 4
    script: Optional[tuple[tuple[str, str], ...]] = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class Completion:
    text: str
    backend: str
    latency: float
    token_counts: tuple[int, int]
    cached: bool
    retries: int = 0


def mock_backend(script: dict[str, str], model_name: str = "mock") -> BackendConfig:
    """Deterministic zero-latency backend keyed by regex prompt patterns.

    Patterns must be disjoint: a prompt matching two patterns is an error.
    """
    return BackendConfig(
        base_url="mock://",
        model_name=model_name,
        rate_limit=1_000_000,
        script=tuple(script.items()),
    )


def _cache_key(model: str, temperature: float, prompt: str) -> str:
    payload = json.dumps([model, temperature, prompt], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class CompletionCache:
    """Content-addressed JSON-lines store; safe for concurrent gateway use."""

    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = Path(path) if path else None
        self._entries: dict[str, dict] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        entry = json.loads(line)
                        self._entries[entry["key"]] = entry

    def get(self, key: str) -> Optional[dict]:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, entry: dict) -> None:
        record = {"key": key, **entry}
        with self._lock:
            self._entries[key] = record
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _http_transport(url: str, payload: dict, headers: dict, timeout: float):
    response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    return response.status_code, response.text


class Gateway:
    """Shareable completion client over one backend configuration."""

    def __init__(
        self,
        config: BackendConfig,
        cache_path: Optional[Union[str, Path]] = None,
        transport: Callable = _http_transport,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self.cache = CompletionCache(Path(cache_path) if cache_path else None)
        self._transport = transport
        self._clock = clock
        self._sleep = sleep
        self._dispatch_times: deque[float] = deque()
        self._rate_lock = threading.Lock()
        self._semaphore = threading.Semaphore(max(1, config.concurrency))

    def complete(self, prompt: Union[PromptText, str]) -> Completion:
        text = prompt.text if isinstance(prompt, PromptText) else prompt
        cfg = self.config
        key = _cache_key(cfg.model_name, cfg.temperature, text)

        hit = self.cache.get(key)
        if hit is not None:
            return Completion(
                text=hit["text"],
                backend=cfg.model_name,
                latency=0.0,
                token_counts=tuple(hit["token_counts"]),
                cached=True,
            )

        with self._semaphore:
            self._throttle()
            start = self._clock()
            if cfg.script is not None:
                body, tokens, retries = self._scripted(text), None, 0
            else:
                body, tokens, retries = self._dispatch(text)
            latency = max(0.0, self._clock() - start)

        token_counts = tokens or (len(text.split()), len(body.split()))
        self.cache.put(key, {"text": body, "token_counts": list(token_counts)})
        return Completion(
            text=body,
            backend=cfg.model_name,
            latency=latency,
            token_counts=token_counts,
            cached=False,
            retries=retries,
        )

    def _scripted(self, prompt: str) -> str:
        assert self.config.script is not None
        matches = [
            response
            for pattern, response in self.config.script
            if re.search(pattern, prompt)
        ]
        if not matches:
            raise UnmatchedPromptError("no scripted pattern matches the prompt")
        if len(matches) > 1:
            raise ValueError("scripted patterns are not disjoint for this prompt")
        return matches[0]

    def _throttle(self) -> None:
        with self._rate_lock:
            now = self._clock()
            window = self._dispatch_times
            while window and now - window[0] >= 60.0:
                window.popleft()
            if len(window) >= self.config.rate_limit:
                wait = 60.0 - (now - window[0])
                if wait > 0:
                    self._sleep(wait)
                now = self._clock()
                while window and now - window[0] >= 60.0:
                    window.popleft()
            window.append(now)

    def _dispatch(self, prompt: str) -> tuple[str, Optional[tuple[int, int]], int]:
        cfg = self.config
        url = cfg.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": cfg.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(cfg.api_key_ref, "") if cfg.api_key_ref else ""
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        attempts = cfg.max_retries + 1
        delay = 0.5
        last_failure = "no attempt made"
        for attempt in range(attempts):
            try:
                status, body = self._transport(url, payload, headers, cfg.timeout)
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_failure = type(exc).__name__
                status = None
            else:
                if status in (401, 403):
                    raise AuthError(f"backend returned HTTP {status}")
                if status == 200:
                    return (*self._decode(body), attempt)
                last_failure = f"HTTP {status}"
                if status not in RETRYABLE_STATUS:
                    raise BackendUnavailableError(f"backend returned {last_failure}")
            if attempt < attempts - 1:
                self._sleep(delay)
                delay *= 2
        raise BackendUnavailableError(
            f"retries exhausted after {attempts} attempts; last failure: {last_failure}"
        )

    @staticmethod
    def _decode(body: str) -> tuple[str, Optional[tuple[int, int]]]:
        try:
            data = json.loads(body)
            text = data["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise ResponseMalformedError(f"undecodable completion body: {exc}") from exc
        usage = data.get("usage") or {}
        tokens = None
        if "prompt_tokens" in usage and "completion_tokens" in usage:
            tokens = (usage["prompt_tokens"], usage["completion_tokens"])
        return text, tokens
