"""Chat-completion backends: a real HTTP client and a deterministic mock.

Both expose a single method, ``complete(messages, cfg) -> ChatMessage``, so
the dialogue and retrieval layers never know which one they are talking to.
The wire protocol is the de-facto chat-completion REST convention:
``POST {endpoint}/chat/completions`` with a JSON body of model, messages,
temperature and max_tokens; the assistant text is the first choice's message
content. The API key comes from the ``LLM_API_KEY`` environment variable
only, never from config files.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence, Union

import httpx

from .errors import (
    ApiError,
    LlmTimeout,
    MalformedResponse,
    ScriptExhausted,
    TransportError,
)

__all__ = [
    "ROLES",
    "ChatMessage",
    "ModelConfig",
    "ChatBackend",
    "HttpBackend",
    "MockBackend",
    "validate_messages",
    "build_request_body",
    "API_KEY_ENV",
]

ROLES = ("system", "user", "assistant")
API_KEY_ENV = "LLM_API_KEY"

_BODY_EXCERPT_LIMIT = 200


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class ModelConfig:
    endpoint: str = ""
    model: str = ""
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0
    max_retries: int = 2
    backoff_base: float = 0.5

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


def validate_messages(messages: Sequence[ChatMessage]) -> None:
    """Transcripts start with exactly one system message; user/assistant
    content is never empty."""
    if not messages:
        raise ValueError("empty message list")
    if messages[0].role != "system":
        raise ValueError("transcript must begin with a system message")
    for i, msg in enumerate(messages):
        if i > 0 and msg.role == "system":
            raise ValueError("only the first message may have the system role")
        if msg.role in ("user", "assistant") and not msg.content:
            raise ValueError(f"message {i} ({msg.role}) has empty content")


class ChatBackend(Protocol):
    def complete(self, messages: Sequence[ChatMessage], cfg: ModelConfig) -> ChatMessage: ...


def build_request_body(messages: Sequence[ChatMessage], cfg: ModelConfig) -> bytes:
    """Deterministic request body: same messages and config always produce
    byte-identical JSON."""
    payload = {
        "model": cfg.model,
        "messages": [{"role": m.role, "content": m.content} for m in messages],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


class HttpBackend:
    """Remote chat-completion client with bounded concurrency and retries.

    Transport errors, timeouts and 5xx responses are retried with
    exponential backoff up to ``cfg.max_retries`` extra attempts; 4xx
    responses (auth, validation) are never retried.
    """

    def __init__(self, concurrency_limit: int = 4, transport: Optional[httpx.BaseTransport] = None):
        self._semaphore = threading.Semaphore(concurrency_limit)
        self._client = httpx.Client(transport=transport)

    def close(self) -> None:
        self._client.close()

    def complete(self, messages: Sequence[ChatMessage], cfg: ModelConfig) -> ChatMessage:
        validate_messages(messages)
        url = cfg.endpoint.rstrip("/") + "/chat/completions"
        body = build_request_body(messages, cfg)
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_error: Exception = TransportError("no attempt made")
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                time.sleep(cfg.backoff_base * 2 ** (attempt - 1))
            try:
                with self._semaphore:
                    response = self._client.post(
                        url, content=body, headers=headers, timeout=cfg.timeout
                    )
            except httpx.TimeoutException as exc:
                last_error = LlmTimeout(f"no reply within {cfg.timeout}s: {exc}")
                continue
            except httpx.TransportError as exc:
                last_error = TransportError(str(exc))
                continue
            if 400 <= response.status_code < 500:
                raise ApiError(response.status_code, response.text[:_BODY_EXCERPT_LIMIT])
            if response.status_code >= 500:
                last_error = ApiError(response.status_code, response.text[:_BODY_EXCERPT_LIMIT])
                continue
            return _parse_reply(response)
        raise last_error


def _parse_reply(response: httpx.Response) -> ChatMessage:
    try:
        data = response.json()
        content = data["choices"][0]["message"]["content"]
    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
        raise MalformedResponse(f"reply JSON lacks message content: {exc}") from exc
    if not isinstance(content, str) or not content:
        raise MalformedResponse("assistant content is empty or not text")
    return ChatMessage("assistant", content)


Reply = Union[str, Exception, Callable[[Sequence[ChatMessage]], str]]


@dataclass
class _Matcher:
    predicate: Callable[[str], bool]
    reply: Reply


class MockBackend:
    """Scripted backend for deterministic tests and offline demos.

    Either an ordered reply list (consumed one per call; running out raises
    :class:`ScriptExhausted` unless ``cycle`` is set) or a matcher table
    (first predicate matching the latest user message wins). Replies may be
    plain strings, exceptions to raise, or callables over the message list.
    Every request/reply pair is recorded in ``calls``.
    """

    def __init__(
        self,
        replies: Optional[Sequence[Reply]] = None,
        matchers: Optional[Sequence[tuple[Callable[[str], bool], Reply]]] = None,
        cycle: bool = False,
    ):
        if (replies is None) == (matchers is None):
            raise ValueError("provide exactly one of replies or matchers")
        if replies is not None and not replies:
            raise ValueError("reply script must be non-empty")
        self._replies = list(replies) if replies is not None else None
        self._matchers = [_Matcher(p, r) for p, r in matchers] if matchers is not None else None
        self._cycle = cycle
        self._position = 0
        self._lock = threading.Lock()
        self.calls: list[tuple[tuple[ChatMessage, ...], str]] = []

    def complete(self, messages: Sequence[ChatMessage], cfg: ModelConfig) -> ChatMessage:
        validate_messages(messages)
        with self._lock:
            reply = self._next_reply(messages)
        if isinstance(reply, Exception):
            raise reply
        text = reply(messages) if callable(reply) else reply
        with self._lock:
            self.calls.append((tuple(messages), text))
        return ChatMessage("assistant", text)

    def _next_reply(self, messages: Sequence[ChatMessage]) -> Reply:
        if self._replies is not None:
            if self._position >= len(self._replies):
                if not self._cycle:
                    raise ScriptExhausted(
                        f"mock script exhausted after {len(self._replies)} replies"
                    )
                self._position = 0
            reply = self._replies[self._position]
            self._position += 1
            return reply
        assert self._matchers is not None
        latest_user = next((m.content for m in reversed(messages) if m.role == "user"), "")
        for matcher in self._matchers:
            if matcher.predicate(latest_user):
                return matcher.reply
        raise ScriptExhausted(f"no matcher for request {latest_user[:80]!r}")
