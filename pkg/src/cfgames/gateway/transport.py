"""Chat-completion transports: a real HTTP client and a scripted mock."""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from ..errors import AgentUnavailableError, ConfigError


@dataclass(frozen=True)
class Completion:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


class Transport(Protocol):
    def complete(
        self,
        messages: list[dict[str, str]],
        *,
        model: str,
        temperature: float,
        top_p: float,
        max_tokens: int,
    ) -> Completion: ...


def parse_completion(body: dict) -> Completion:
    """Accept either an OpenAI-style body or a flat ``{text, usage}`` body."""
    if "choices" in body:
        choice = body["choices"][0]
        text = choice.get("message", {}).get("content")
        if text is None:
            text = choice.get("text", "")
    else:
        text = body.get("text", "")
    usage = body.get("usage") or body
    return Completion(
        text=text or "",
        prompt_tokens=int(usage.get("prompt_tokens", 0) or 0),
        completion_tokens=int(usage.get("completion_tokens", 0) or 0),
    )


class RateLimiter:
    """At most ``in_flight`` concurrent requests, spaced ``min_interval`` seconds apart."""

    def __init__(self, in_flight: int = 4, min_interval: float = 0.0):
        self._sem = threading.BoundedSemaphore(in_flight)
        self._lock = threading.Lock()
        self._min_interval = min_interval
        self._next = 0.0

    def __enter__(self):
        self._sem.acquire()
        with self._lock:
            now = time.monotonic()
            wait = self._next - now
            self._next = max(now, self._next) + self._min_interval
        if wait > 0:
            time.sleep(wait)
        return self

    def __exit__(self, *exc):
        self._sem.release()


# one limiter per endpoint URL, shared by every agent in the process
_LIMITERS: dict[str, RateLimiter] = {}
_LIMITERS_LOCK = threading.Lock()


def limiter_for(url: str, in_flight: int, min_interval: float) -> RateLimiter:
    with _LIMITERS_LOCK:
        if url not in _LIMITERS:
            _LIMITERS[url] = RateLimiter(in_flight, min_interval)
        return _LIMITERS[url]


class HttpTransport:
    """POST ``{model, messages, temperature, top_p, max_tokens}`` to ``url``."""

    RETRY_STATUS = {408, 409, 429, 500, 502, 503, 504}

    def __init__(
        self,
        url: str,
        *,
        api_key_env: str | None = "LLM_API_KEY",
        auth_header: str = "Authorization",
        auth_prefix: str = "Bearer ",
        timeout: float = 60.0,
        retries: int = 5,
        backoff: float = 1.0,
        in_flight: int = 4,
        min_interval: float = 0.0,
        client: httpx.Client | None = None,
    ):
        self.url = url
        self.headers = {"Content-Type": "application/json"}
        if api_key_env:
            key = os.environ.get(api_key_env)
            if key:
                self.headers[auth_header] = f"{auth_prefix}{key}"
        self.retries = retries
        self.backoff = backoff
        self.client = client or httpx.Client(timeout=timeout)
        self.limiter = limiter_for(url, in_flight, min_interval)

    def complete(self, messages, *, model, temperature, top_p, max_tokens) -> Completion:
        payload = {
            "model": model,
            "messages": messages,
            "temperature": temperature,
            "top_p": top_p,
            "max_tokens": max_tokens,
        }
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                with self.limiter:
                    resp = self.client.post(self.url, json=payload, headers=self.headers)
                if resp.status_code in self.RETRY_STATUS:
                    last = httpx.HTTPStatusError(
                        f"HTTP {resp.status_code}", request=resp.request, response=resp
                    )
                else:
                    resp.raise_for_status()
                    return parse_completion(resp.json())
            except (httpx.TransportError, httpx.HTTPStatusError, ValueError) as exc:
                last = exc
                if isinstance(exc, httpx.HTTPStatusError) and exc.response.status_code not in self.RETRY_STATUS:
                    break
            if attempt < self.retries:
                time.sleep(self.backoff * 2**attempt)
        raise AgentUnavailableError(f"{self.url}: {last}")


@dataclass
class MockTransport:
    """Replays scripted responses in order; records every request it receives."""

    responses: Sequence[dict]
    cycle: bool = False
    requests: list[dict] = field(default_factory=list)

    @classmethod
    def from_jsonl(cls, path: str | Path, cycle: bool = False) -> "MockTransport":
        lines = Path(path).read_text().splitlines()
        return cls([json.loads(line) for line in lines if line.strip()], cycle=cycle)

    def complete(self, messages, *, model, temperature, top_p, max_tokens) -> Completion:
        i = len(self.requests)
        self.requests.append(
            {"model": model, "messages": messages, "temperature": temperature,
             "top_p": top_p, "max_tokens": max_tokens}
        )
        if i >= len(self.responses):
            if not self.cycle or not self.responses:
                raise AgentUnavailableError(f"mock fixture exhausted after {len(self.responses)} responses")
            i %= len(self.responses)
        item = self.responses[i]
        if item.get("error"):
            raise AgentUnavailableError(str(item["error"]))
        return parse_completion(item)


def transport_from_spec(spec: dict | None, base_dir: Path | None = None) -> Transport:
    spec = dict(spec or {})
    kind = spec.pop("kind", None)
    if kind == "mock":
        if "fixture" in spec:
            path = Path(spec["fixture"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return MockTransport.from_jsonl(path, cycle=spec.get("cycle", False))
        return MockTransport(spec.get("responses", []), cycle=spec.get("cycle", False))
    if kind == "http":
        url = spec.pop("url", None) or os.environ.get("LLM_ENDPOINT_URL")
        if not url:
            raise ConfigError("http transport needs 'url' or LLM_ENDPOINT_URL")
        return HttpTransport(url, **spec)
    raise ConfigError(f"unknown transport kind {kind!r}; use 'mock' or 'http'")
