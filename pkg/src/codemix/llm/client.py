"""Chat-completion client plumbing: params, retries, rate limiting, records.

Every model interaction in the package funnels through :func:`complete`, which
handles transient-failure retries with exponential backoff, optional sliding
window rate limiting, degenerate-output flagging, and audit recording. The
clock and sleep functions are injectable so tests run instantly.
"""

from __future__ import annotations

import json
import threading
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Callable, Optional

from codemix.prompts import RenderedPrompt

if TYPE_CHECKING:
    from codemix.llm.backends import Backend


class BackendError(RuntimeError):
    """Base for completion-backend failures."""


class TransportError(BackendError):
    """Transient failure (network, rate limit, 5xx); safe to retry."""


class AuthenticationError(BackendError):
    """Credential rejection; retrying cannot help."""


class FixtureMissError(BackendError):
    """Strict mock backend has no canned response for the prompt."""


class DegenerateFlag(str, Enum):
    EMPTY = "EMPTY"
    REPETITION = "REPETITION"


def detect_degenerate(text: str) -> frozenset:
    """Flag model outputs that are empty or pathologically repetitive.

    EMPTY: nothing but whitespace. REPETITION: one token makes up more than
    half of a 20+ token output, or any token repeats 10+ times in a row.
    Thresholds are calibrated so a single word echoed hundreds of times trips
    the flag while ordinary sentences never do.
    """
    if not text.strip():
        return frozenset({DegenerateFlag.EMPTY})
    flags = set()
    tokens = text.split()
    n = len(tokens)
    if n >= 20:
        _, top = Counter(tokens).most_common(1)[0]
        if top * 2 > n:
            flags.add(DegenerateFlag.REPETITION)
    run = 1
    for prev, cur in zip(tokens, tokens[1:]):
        run = run + 1 if cur == prev else 1
        if run >= 10:
            flags.add(DegenerateFlag.REPETITION)
            break
    return frozenset(flags)


@dataclass(frozen=True)
class CompletionParams:
    model_name: str = "default"
    temperature: float = 0.0
    max_output_tokens: int = 1024
    timeout: float = 60.0
    max_retries: int = 3

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CompletionParams":
        return cls(**data)


@dataclass(frozen=True)
class CompletionResult:
    text: str
    latency: float
    attempts: int
    backend_id: str
    degenerate_flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1 on a successful result")
        if self.latency < 0:
            raise ValueError("latency must be >= 0")

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "latency": self.latency,
            "attempts": self.attempts,
            "backend_id": self.backend_id,
            "degenerate_flags": sorted(f.value for f in self.degenerate_flags),
        }


@dataclass(frozen=True)
class CallRecord:
    sequence: int
    prompt_text: str
    prompt_hash: str
    prompt_kind: str
    pair_id: Optional[str]
    params: CompletionParams
    result: CompletionResult
    timestamp: float

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "timestamp": self.timestamp,
            "prompt_kind": self.prompt_kind,
            "pair_id": self.pair_id,
            "prompt_hash": self.prompt_hash,
            "prompt": self.prompt_text,
            "params": self.params.to_dict(),
            "result": self.result.to_dict(),
        }


class RateLimiter:
    """Sliding-window limiter: at most max_calls started per window_seconds.

    The single shared synchronization point for concurrent requests; acquire()
    blocks (via the injected sleep) until a slot opens.
    """

    def __init__(self, max_calls: int, window_seconds: float, *,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        if max_calls < 1:
            raise ValueError("max_calls must be >= 1")
        if window_seconds <= 0:
            raise ValueError("window_seconds must be positive")
        self.max_calls = max_calls
        self.window_seconds = window_seconds
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._starts = deque()

    def acquire(self) -> float:
        """Block until a call may start; return the recorded start time."""
        while True:
            with self._lock:
                now = self._clock()
                while self._starts and now - self._starts[0] >= self.window_seconds:
                    self._starts.popleft()
                if len(self._starts) < self.max_calls:
                    self._starts.append(now)
                    return now
                wait = self.window_seconds - (now - self._starts[0])
            self._sleep(max(wait, self.window_seconds / 1000.0))


class Recorder:
    """Thread-safe ordered ledger of every completion made during a run."""

    def __init__(self, *, clock: Callable[[], float] = time.time):
        self._clock = clock
        self._lock = threading.Lock()
        self._records = []
        self._sequence = 0

    def record(self, prompt: RenderedPrompt, params: CompletionParams,
               result: CompletionResult) -> CallRecord:
        from codemix.llm.backends import prompt_hash

        with self._lock:
            self._sequence += 1
            rec = CallRecord(
                sequence=self._sequence,
                prompt_text=prompt.text,
                prompt_hash=prompt_hash(prompt.text),
                prompt_kind=prompt.kind.label,
                pair_id=prompt.pair.id,
                params=params,
                result=result,
                timestamp=self._clock(),
            )
            self._records.append(rec)
        return rec

    @property
    def records(self) -> tuple:
        with self._lock:
            return tuple(self._records)

    def kinds(self) -> list:
        """Prompt-kind labels in call order, for pipeline-shape assertions."""
        return [r.prompt_kind for r in self.records]

    def fixture_map(self) -> dict:
        """prompt hash -> response text; later calls win on hash collisions."""
        return {r.prompt_hash: r.result.text for r in self.records}

    def to_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")

    def write_fixtures(self, path) -> None:
        """Dump replayable fixtures consumable by the mock backend."""
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                line = {"prompt_hash": rec.prompt_hash, "response": rec.result.text}
                fh.write(json.dumps(line, ensure_ascii=False) + "\n")


def complete(backend: "Backend", prompt: RenderedPrompt,
             params: Optional[CompletionParams] = None, *,
             recorder: Optional[Recorder] = None,
             limiter: Optional[RateLimiter] = None,
             sleep: Callable[[float], None] = time.sleep,
             clock: Callable[[], float] = time.monotonic,
             backoff_base: float = 0.5,
             backoff_factor: float = 2.0) -> CompletionResult:
    """Run one prompt through a backend with retries and bookkeeping.

    Transient (transport) failures are retried up to params.max_retries times
    with exponential backoff; authentication and fixture-miss errors propagate
    immediately. Degenerate flags are computed on the raw text before any
    cleaning. Successful calls are appended to the recorder when one is given.
    """
    params = params if params is not None else CompletionParams()
    attempts = 0
    delay = backoff_base
    while True:
        attempts += 1
        if limiter is not None:
            limiter.acquire()
        started = clock()
        try:
            text = backend.send(prompt.text, params)
        except TransportError:
            if attempts > params.max_retries:
                raise
            sleep(delay)
            delay *= backoff_factor
            continue
        result = CompletionResult(
            text=text,
            latency=clock() - started,
            attempts=attempts,
            backend_id=backend.backend_id,
            degenerate_flags=detect_degenerate(text),
        )
        if recorder is not None:
            recorder.record(prompt, params, result)
        return result
