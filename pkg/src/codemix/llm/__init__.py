"""Backend-agnostic chat-completion layer with retries, recording, and mocks."""

from codemix.llm.backends import (
    Backend,
    HTTPChatBackend,
    MockBackend,
    ScriptedBackend,
    prompt_hash,
    resolve_backend,
)
from codemix.llm.client import (
    AuthenticationError,
    BackendError,
    CallRecord,
    CompletionParams,
    CompletionResult,
    DegenerateFlag,
    FixtureMissError,
    RateLimiter,
    Recorder,
    TransportError,
    complete,
    detect_degenerate,
)

__all__ = [
    "AuthenticationError",
    "Backend",
    "BackendError",
    "CallRecord",
    "CompletionParams",
    "CompletionResult",
    "DegenerateFlag",
    "FixtureMissError",
    "HTTPChatBackend",
    "MockBackend",
    "RateLimiter",
    "Recorder",
    "ScriptedBackend",
    "TransportError",
    "complete",
    "detect_degenerate",
    "prompt_hash",
    "resolve_backend",
]
