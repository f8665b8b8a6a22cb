"""Chat-completion gateway with retries, caching, and record/replay transports.

Requests are hashed over (model, temperature, max_tokens, messages); the
digest keys both the in-memory response cache and the on-disk session
fixtures, so a recorded session doubles as a replay fixture.  Replay mode
never touches the network, which keeps pipeline runs byte-deterministic.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import requests

from .errors import (
    AuthError,
    FixtureCorrupt,
    FixtureMiss,
    MalformedResponse,
    RateLimited,
    TransportError,
)

ENV_VAR = "THEMATICA_API_KEY"
FALLBACK_ENV_VAR = "OPENAI_API_KEY"

_HEX = re.compile(r"[0-9a-f]{16,}")

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ModelConfig:
    model_id: str = "gpt-4-turbo"
    temperature: float = 0.3
    max_tokens: int = 1000
    endpoint_url: str = "https://api.openai.com/v1"
    timeout: float = 120.0
    max_attempts: int = 5
    backoff_base: float = 1.0
    parallelism: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if not 1 <= self.parallelism <= 8:
            raise ValueError(f"parallelism must be in 1..8, got {self.parallelism}")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass(frozen=True)
class Completion:
    request_digest: str
    text: str
    transport: str


def request_digest(config: ModelConfig, messages: Sequence[ChatMessage]) -> str:
    """Stable hash over exactly the fields that determine the model's reply."""
    payload = {
        "model": config.model_id,
        "temperature": config.temperature,
        "max_tokens": config.max_tokens,
        "messages": [{"role": m.role, "content": m.content} for m in messages],
    }
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def resolve_api_key(explicit: str | None = None) -> str:
    key = explicit or os.environ.get(ENV_VAR) or os.environ.get(FALLBACK_ENV_VAR)
    if not key:
        raise AuthError(f"no API credential: set {ENV_VAR} (or {FALLBACK_ENV_VAR})")
    return key


def load_fixture(path: str | Path) -> list[dict[str, str]]:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise FixtureCorrupt(f"{path}: {exc}") from exc
    if not isinstance(raw, list):
        raise FixtureCorrupt(f"{path}: fixture must be a JSON array")
    entries: list[dict[str, str]] = []
    for position, entry in enumerate(raw):
        if (not isinstance(entry, dict)
                or not isinstance(entry.get("digest"), str)
                or not isinstance(entry.get("response"), str)):
            raise FixtureCorrupt(f"{path}: entry {position} must be {{digest, response}}")
        if not _HEX.fullmatch(entry["digest"]):
            raise FixtureCorrupt(f"{path}: entry {position} digest is not a hex string")
        entries.append({"digest": entry["digest"], "response": entry["response"]})
    return entries


def save_fixture(path: str | Path, entries: Sequence[dict[str, str]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(list(entries), indent=2, ensure_ascii=False) + "\n",
                   encoding="utf-8")
    os.replace(tmp, path)


class _NetworkFailure(Exception):
    """Internal signal: the HTTP layer failed before producing a response."""


def _requests_post(url: str, headers: dict[str, str], body: dict, timeout: float):
    try:
        response = requests.post(url, headers=headers, json=body, timeout=timeout)
    except requests.RequestException as exc:
        raise _NetworkFailure(str(exc)) from exc
    try:
        payload = response.json()
    except ValueError:
        payload = None
    return response.status_code, payload


class LiveTransport:
    """Sends real HTTP requests with exponential backoff on transient failures."""

    kind = "live"

    def __init__(self, api_key: str | None = None,
                 http_post: Callable | None = None,
                 sleep: Callable[[float], None] = time.sleep) -> None:
        self.api_key = resolve_api_key(api_key)
        self._http_post = http_post or _requests_post
        self._sleep = sleep

    def send(self, config: ModelConfig, messages: Sequence[ChatMessage],
             context: str | None = None) -> str:
        url = f"{config.endpoint_url.rstrip('/')}/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"}
        body = {
            "model": config.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "max_tokens": config.max_tokens,
            "temperature": config.temperature,
        }
        where = f" ({context})" if context else ""
        last_failure = ""
        for attempt in range(1, config.max_attempts + 1):
            try:
                status, payload = self._http_post(url, headers, body, config.timeout)
            except _NetworkFailure as exc:
                last_failure = f"network failure: {exc}"
                status = None
            else:
                if status in (401, 403):
                    raise AuthError(f"endpoint rejected credential (HTTP {status}){where}")
                if status == 429:
                    last_failure = "HTTP 429"
                elif status is not None and status >= 500:
                    last_failure = f"HTTP {status}"
                elif status == 200:
                    return _extract_text(payload, where)
                else:
                    raise TransportError(f"unexpected HTTP {status}{where}")
            if attempt < config.max_attempts:
                self._sleep(config.backoff_base * (2 ** (attempt - 1)))
        if last_failure == "HTTP 429":
            raise RateLimited(f"rate limited after {config.max_attempts} attempts{where}")
        raise TransportError(f"{last_failure} after {config.max_attempts} attempts{where}")


def _extract_text(payload, where: str) -> str:
    if not isinstance(payload, dict):
        raise MalformedResponse(f"response body is not a JSON object{where}")
    choices = payload.get("choices")
    if not isinstance(choices, list) or not choices:
        raise MalformedResponse(f"response has no choices{where}")
    message = choices[0].get("message") if isinstance(choices[0], dict) else None
    content = message.get("content") if isinstance(message, dict) else None
    if not isinstance(content, str) or not content.strip():
        raise MalformedResponse(f"response choice has no content{where}")
    return content.strip()


class ReplayTransport:
    """Serves responses from a fixture file; never touches the network."""

    kind = "replay"

    def __init__(self, fixture_path: str | Path) -> None:
        self.fixture_path = Path(fixture_path)
        self._responses: dict[str, str] = {}
        for entry in load_fixture(self.fixture_path):
            self._responses[entry["digest"]] = entry["response"]

    def send(self, config: ModelConfig, messages: Sequence[ChatMessage],
             context: str | None = None) -> str:
        digest = request_digest(config, messages)
        try:
            return self._responses[digest]
        except KeyError:
            where = f" for {context}" if context else ""
            raise FixtureMiss(
                f"no fixture entry{where} (digest {digest[:12]}…) in {self.fixture_path.name}; "
                "prompts have drifted from the recorded session"
            ) from None


class RecordTransport:
    """Live transport that appends every (digest, response) pair to a fixture."""

    kind = "live"

    def __init__(self, fixture_path: str | Path, api_key: str | None = None,
                 http_post: Callable | None = None,
                 sleep: Callable[[float], None] = time.sleep) -> None:
        self.fixture_path = Path(fixture_path)
        self._live = LiveTransport(api_key=api_key, http_post=http_post, sleep=sleep)
        self._lock = threading.Lock()
        self._entries: list[dict[str, str]] = (
            load_fixture(self.fixture_path) if self.fixture_path.exists() else []
        )

    def send(self, config: ModelConfig, messages: Sequence[ChatMessage],
             context: str | None = None) -> str:
        text = self._live.send(config, messages, context)
        digest = request_digest(config, messages)
        with self._lock:
            self._entries.append({"digest": digest, "response": text})
            save_fixture(self.fixture_path, self._entries)
        return text


def replay_session(fixture_path: str | Path) -> ReplayTransport:
    return ReplayTransport(fixture_path)


def record_session(fixture_path: str | Path, api_key: str | None = None,
                   http_post: Callable | None = None) -> RecordTransport:
    return RecordTransport(fixture_path, api_key=api_key, http_post=http_post)


class Gateway:
    """Caching front end over a transport; safe for concurrent use."""

    def __init__(self, config: ModelConfig, transport,
                 cache_enabled: bool = True,
                 cache_path: str | Path | None = None) -> None:
        self.config = config
        self.transport = transport
        self.cache_enabled = cache_enabled
        self.cache_path = Path(cache_path) if cache_path else None
        self._lock = threading.Lock()
        self._cache: dict[str, str] = {}
        if self.cache_path and self.cache_path.exists():
            for entry in load_fixture(self.cache_path):
                self._cache[entry["digest"]] = entry["response"]

    def complete(self, messages: Sequence[ChatMessage],
                 context: str | None = None) -> Completion:
        if not messages:
            raise ValueError("messages must be non-empty")
        digest = request_digest(self.config, messages)
        if self.cache_enabled:
            with self._lock:
                if digest in self._cache:
                    return Completion(request_digest=digest, text=self._cache[digest],
                                      transport="cache")
        text = self.transport.send(self.config, messages, context)
        if self.cache_enabled:
            with self._lock:
                self._cache[digest] = text
                if self.cache_path:
                    save_fixture(self.cache_path,
                                 [{"digest": d, "response": r} for d, r in self._cache.items()])
        return Completion(request_digest=digest, text=text, transport=self.transport.kind)


def complete(config: ModelConfig, messages: Sequence[ChatMessage],
             transport=None, api_key: str | None = None) -> Completion:
    """One-shot completion without cache persistence."""
    gateway = Gateway(config, transport or LiveTransport(api_key=api_key), cache_enabled=False)
    return gateway.complete(messages)
