"""Provider-agnostic chat-completion gateway.

One neutral request/response shape; provider-specific payloads are adapted at
the edge. Besides the remote providers there are two offline ones: a mock
(canned responses or a programmatic responder) and a record/replay pair keyed
on a stable hash of (messages, temperature, model), which keeps every test
deterministic and network-free.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Protocol

import httpx
import numpy as np

log = logging.getLogger("scengen.gateway")

Role = str  # system | user | assistant

DEFAULT_TEMPERATURE = 1.0
TEMPERATURE_PROFILES = {"default": 1.0, "precise": 0.3}


class GatewayError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class RequestTag(Enum):
    EXTRACT = "extract"
    SNIPPET = "snippet"
    REPAIR = "repair"
    EVALUATE = "evaluate"


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[tuple[Role, str], ...]
    temperature: float = DEFAULT_TEMPERATURE
    model: str = ""
    max_tokens: int = 2048
    tag: RequestTag = RequestTag.EXTRACT

    def __post_init__(self) -> None:
        if not self.messages or self.messages[0][0] != "system":
            raise ValueError("first message must have role 'system'")
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be in [0, 2]")


@dataclass(frozen=True)
class ChatResponse:
    content: str
    provider: str
    latency_ms: float
    usage: dict[str, int] = field(default_factory=dict)


class ProviderKind(Enum):
    OPENAI_COMPATIBLE = "openai_compatible"
    GEMINI = "gemini"
    DEEPSEEK = "deepseek"
    MOCK = "mock"
    REPLAY = "replay"


@dataclass(frozen=True)
class ProviderConfig:
    kind: ProviderKind
    endpoint: str = ""
    credential: str = ""  # env-var NAME, never the secret itself
    default_model: str = ""
    timeout: float = 60.0
    max_retries: int = 3
    backoff_base: float = 0.5
    concurrency: int = 4


BUILTIN_PROVIDERS = {
    "openai": ProviderConfig(
        ProviderKind.OPENAI_COMPATIBLE,
        endpoint="https://api.openai.com/v1",
        credential="OPENAI_API_KEY",
        default_model="gpt-4o",
    ),
    "gemini": ProviderConfig(
        ProviderKind.GEMINI,
        endpoint="https://generativelanguage.googleapis.com/v1beta",
        credential="GEMINI_API_KEY",
        default_model="gemini-2.0-flash",
    ),
    "deepseek": ProviderConfig(
        ProviderKind.DEEPSEEK,
        endpoint="https://api.deepseek.com/v1",
        credential="DEEPSEEK_API_KEY",
        default_model="deepseek-chat",
    ),
    "mock": ProviderConfig(ProviderKind.MOCK),
    "replay": ProviderConfig(ProviderKind.REPLAY),
}


def request_hash(request: ChatRequest) -> str:
    """Stable hash of (messages, temperature, model); max_tokens and tag are
    deliberately excluded."""
    payload = json.dumps(
        {
            "messages": [[role, content] for role, content in request.messages],
            "temperature": request.temperature,
            "model": request.model,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Provider(Protocol):
    name: str

    def complete(self, request: ChatRequest) -> ChatResponse: ...


class MockProvider:
    """Offline provider: per-tag canned responses and/or a responder callable
    receiving the full request."""

    name = "mock"

    def __init__(
        self,
        canned: dict[str, str] | None = None,
        responder: Callable[[ChatRequest], str] | None = None,
    ):
        self.canned = canned or {}
        self.responder = responder
        self.calls: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> ChatResponse:
        self.calls.append(request)
        if request.tag.value in self.canned:
            content = self.canned[request.tag.value]
        elif self.responder is not None:
            content = self.responder(request)
        else:
            raise GatewayError(
                "llm.malformed_response", f"mock has no response for tag {request.tag.value!r}"
            )
        return ChatResponse(content=content, provider=self.name, latency_ms=0.0)


class ReplayProvider:
    name = "replay"

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)

    def complete(self, request: ChatRequest) -> ChatResponse:
        digest = request_hash(request)
        path = self.fixtures_dir / f"{digest}.json"
        if not path.exists():
            raise GatewayError(
                "llm.fixture_missing", f"no recorded fixture for request hash {digest}"
            )
        record = json.loads(path.read_text(encoding="utf-8"))
        return ChatResponse(
            content=record["response"]["content"], provider=self.name, latency_ms=0.0
        )


class RecordingProvider:
    """Wraps a live provider and persists one fixture file per request hash."""

    name = "record"

    def __init__(self, inner: Provider, fixtures_dir: str | Path):
        self.inner = inner
        self.fixtures_dir = Path(fixtures_dir)
        self.fixtures_dir.mkdir(parents=True, exist_ok=True)

    def complete(self, request: ChatRequest) -> ChatResponse:
        response = self.inner.complete(request)
        digest = request_hash(request)
        record = {
            "request": {
                "hash": digest,
                "model": request.model,
                "temperature": request.temperature,
                "tag": request.tag.value,
                "messages": [[role, content] for role, content in request.messages],
            },
            "response": {"content": response.content},
        }
        path = self.fixtures_dir / f"{digest}.json"
        path.write_text(json.dumps(record, ensure_ascii=False, indent=1), encoding="utf-8")
        return response


class HttpProvider:
    """Remote chat completion with bounded retry on transient failures."""

    def __init__(self, config: ProviderConfig, name: str = "remote"):
        self.config = config
        self.name = name
        self._semaphore = threading.Semaphore(config.concurrency)

    def _credential(self) -> str:
        value = os.environ.get(self.config.credential, "")
        if not value:
            raise GatewayError(
                "llm.auth", f"credential env var {self.config.credential!r} is not set"
            )
        return value

    def _build(self, request: ChatRequest) -> tuple[str, dict, dict]:
        model = request.model or self.config.default_model
        if self.config.kind is ProviderKind.GEMINI:
            url = f"{self.config.endpoint}/models/{model}:generateContent"
            headers = {"x-goog-api-key": self._credential()}
            system = request.messages[0][1]
            contents = [
                {"role": "model" if role == "assistant" else "user", "parts": [{"text": content}]}
                for role, content in request.messages[1:]
            ]
            payload = {
                "system_instruction": {"parts": [{"text": system}]},
                "contents": contents,
                "generationConfig": {
                    "temperature": request.temperature,
                    "maxOutputTokens": request.max_tokens,
                },
            }
            return url, headers, payload
        url = f"{self.config.endpoint}/chat/completions"
        headers = {"Authorization": f"Bearer {self._credential()}"}
        payload = {
            "model": model,
            "messages": [{"role": role, "content": content} for role, content in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        return url, headers, payload

    def _extract(self, data: dict) -> tuple[str, dict[str, int]]:
        try:
            if self.config.kind is ProviderKind.GEMINI:
                content = data["candidates"][0]["content"]["parts"][0]["text"]
                usage = data.get("usageMetadata", {})
                tokens = {
                    "prompt_tokens": int(usage.get("promptTokenCount", 0)),
                    "completion_tokens": int(usage.get("candidatesTokenCount", 0)),
                }
            else:
                content = data["choices"][0]["message"]["content"]
                usage = data.get("usage", {})
                tokens = {
                    "prompt_tokens": int(usage.get("prompt_tokens", 0)),
                    "completion_tokens": int(usage.get("completion_tokens", 0)),
                }
        except (KeyError, IndexError, TypeError) as exc:
            raise GatewayError("llm.malformed_response", f"unexpected response shape: {exc}")
        if not content:
            raise GatewayError("llm.malformed_response", "empty completion content")
        return content, tokens

    def complete(self, request: ChatRequest) -> ChatResponse:
        url, headers, payload = self._build(request)
        attempts = self.config.max_retries + 1
        last_error: GatewayError | None = None
        start = time.monotonic()
        with self._semaphore:
            for attempt in range(attempts):
                if attempt > 0:
                    time.sleep(self.config.backoff_base * (2 ** (attempt - 1)))
                try:
                    response = httpx.post(
                        url, headers=headers, json=payload, timeout=self.config.timeout
                    )
                except httpx.TimeoutException:
                    last_error = GatewayError("llm.timeout", f"timeout contacting {self.name}")
                    log.warning("attempt %d/%d: timeout", attempt + 1, attempts)
                    continue
                except httpx.HTTPError as exc:
                    last_error = GatewayError("llm.timeout", f"transport error: {exc}")
                    log.warning("attempt %d/%d: transport error", attempt + 1, attempts)
                    continue
                if response.status_code in (401, 403):
                    raise GatewayError("llm.auth", f"authentication rejected ({response.status_code})")
                if response.status_code == 429 or response.status_code >= 500:
                    last_error = GatewayError(
                        "llm.rate_limited" if response.status_code == 429 else "llm.unavailable",
                        f"HTTP {response.status_code} from {self.name}",
                    )
                    log.warning(
                        "attempt %d/%d: HTTP %d", attempt + 1, attempts, response.status_code
                    )
                    continue
                try:
                    data = response.json()
                except json.JSONDecodeError as exc:
                    raise GatewayError("llm.malformed_response", f"non-JSON response: {exc}")
                content, usage = self._extract(data)
                latency = (time.monotonic() - start) * 1000
                log.info(
                    "tag=%s provider=%s model=%s attempts=%d latency_ms=%.0f",
                    request.tag.value,
                    self.name,
                    payload.get("model", request.model),
                    attempt + 1,
                    latency,
                )
                return ChatResponse(content=content, provider=self.name, latency_ms=latency, usage=usage)
        raise last_error or GatewayError("llm.timeout", "no attempt made")


def make_provider(
    config: ProviderConfig,
    name: str = "",
    fixtures_dir: str | Path | None = None,
    canned: dict[str, str] | None = None,
    responder: Callable[[ChatRequest], str] | None = None,
) -> Provider:
    if config.kind is ProviderKind.MOCK:
        return MockProvider(canned=canned, responder=responder)
    if config.kind is ProviderKind.REPLAY:
        if fixtures_dir is None:
            raise GatewayError("llm.fixture_missing", "replay provider needs a fixtures directory")
        return ReplayProvider(fixtures_dir)
    return HttpProvider(config, name=name or config.kind.value)


def complete(request: ChatRequest, config: ProviderConfig, **kwargs) -> ChatResponse:
    return make_provider(config, **kwargs).complete(request)


def record(provider: Provider, fixtures_dir: str | Path) -> RecordingProvider:
    return RecordingProvider(provider, fixtures_dir)


def replay(fixtures_dir: str | Path) -> ReplayProvider:
    return ReplayProvider(fixtures_dir)


class HttpEmbedder:
    """Remote embedding via an openai-compatible /embeddings endpoint; the
    local hashed-ngram embedding stays the default everywhere."""

    def __init__(self, config: ProviderConfig, model: str = "text-embedding-3-small"):
        self.config = config
        self.model = model

    def __call__(self, text: str) -> np.ndarray:
        key = os.environ.get(self.config.credential, "")
        if not key:
            raise GatewayError("llm.auth", f"credential env var {self.config.credential!r} is not set")
        try:
            response = httpx.post(
                f"{self.config.endpoint}/embeddings",
                headers={"Authorization": f"Bearer {key}"},
                json={"model": self.model, "input": text},
                timeout=self.config.timeout,
            )
            data = response.json()
            vector = np.asarray(data["data"][0]["embedding"], dtype=np.float64)
        except (httpx.HTTPError, json.JSONDecodeError, KeyError, IndexError) as exc:
            raise GatewayError("llm.malformed_response", f"embedding request failed: {exc}")
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise GatewayError("llm.malformed_response", "zero-norm embedding")
        return vector / norm
