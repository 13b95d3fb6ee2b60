"""Completion backends: deterministic mock, scripted stub, and HTTP remote.

All backends share a two-method surface (``backend_id`` plus ``send``). The
mock keys canned responses by a stable hash of the NFC-normalized prompt so
fixtures survive serialization roundtrips and minor encoding differences.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import unicodedata
from typing import Iterable, Mapping, Optional

from codemix.llm.client import (
    AuthenticationError,
    BackendError,
    CompletionParams,
    FixtureMissError,
    TransportError,
)


def prompt_hash(text: str) -> str:
    """Stable fixture key: sha256 hex of the NFC-normalized prompt."""
    normalized = unicodedata.normalize("NFC", text)
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


class Backend:
    """Minimal contract: single prompt in, single response text out."""

    backend_id: str = "base"

    def send(self, prompt_text: str, params: CompletionParams) -> str:
        raise NotImplementedError


class MockBackend(Backend):
    """Fixture-driven backend for offline, bit-reproducible runs.

    strict=True raises on unknown prompts, naming the hash so the missing
    fixture can be added; strict=False echoes the last non-empty prompt line,
    which is enough for smoke tests of plumbing that ignores content.
    """

    def __init__(self, fixtures: Optional[Mapping[str, str]] = None, *,
                 strict: bool = True, backend_id: str = "mock"):
        self.backend_id = backend_id
        self.strict = strict
        self._fixtures = dict(fixtures or {})

    @classmethod
    def from_jsonl(cls, path, *, strict: bool = True,
                   backend_id: str = "mock") -> "MockBackend":
        fixtures = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                    fixtures[row["prompt_hash"]] = row["response"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise BackendError(f"{path}:{lineno}: bad fixture line") from exc
        return cls(fixtures, strict=strict, backend_id=backend_id)

    def add(self, prompt_text: str, response: str) -> None:
        self._fixtures[prompt_hash(prompt_text)] = response

    def send(self, prompt_text: str, params: CompletionParams) -> str:
        key = prompt_hash(prompt_text)
        if key in self._fixtures:
            return self._fixtures[key]
        if self.strict:
            raise FixtureMissError(f"no fixture for prompt hash {key}")
        for line in reversed(prompt_text.splitlines()):
            if line.strip():
                return line.strip()
        return ""


class ScriptedBackend(Backend):
    """Replies from a fixed script, in call order; exceptions in the script
    are raised instead of returned (for retry-path tests)."""

    def __init__(self, script: Iterable, *, backend_id: str = "scripted"):
        self.backend_id = backend_id
        self._script = list(script)
        self._lock = threading.Lock()
        self._cursor = 0
        self.prompts_seen = []

    def send(self, prompt_text: str, params: CompletionParams) -> str:
        with self._lock:
            if self._cursor >= len(self._script):
                raise BackendError(
                    f"scripted backend exhausted after {len(self._script)} calls")
            item = self._script[self._cursor]
            self._cursor += 1
            self.prompts_seen.append(prompt_text)
        if isinstance(item, BaseException):
            raise item
        return item

    @property
    def calls_made(self) -> int:
        with self._lock:
            return self._cursor


class HTTPChatBackend(Backend):
    """JSON chat-completion client over HTTP.

    Credentials and routing come from the environment, one set per backend id:
    CODEMIX_ENDPOINT_<ID>, CODEMIX_MODEL_<ID>, CODEMIX_API_KEY_<ID> (id
    uppercased, dashes to underscores). A pre-built httpx client may be
    injected for testing.
    """

    def __init__(self, backend_id: str, endpoint: str, model_name: str,
                 api_key: str, *, client=None):
        if not endpoint:
            raise BackendError("endpoint URL must be non-empty")
        self.backend_id = backend_id
        self.endpoint = endpoint
        self.model_name = model_name
        self._api_key = api_key
        self._client = client

    @staticmethod
    def _env_suffix(backend_id: str) -> str:
        return backend_id.upper().replace("-", "_")

    @classmethod
    def from_env(cls, backend_id: str, *, client=None) -> "HTTPChatBackend":
        suffix = cls._env_suffix(backend_id)
        endpoint = os.environ.get(f"CODEMIX_ENDPOINT_{suffix}")
        if not endpoint:
            raise BackendError(f"CODEMIX_ENDPOINT_{suffix} is not set")
        api_key = os.environ.get(f"CODEMIX_API_KEY_{suffix}")
        if not api_key:
            raise AuthenticationError(f"CODEMIX_API_KEY_{suffix} is not set")
        model_name = os.environ.get(f"CODEMIX_MODEL_{suffix}", "")
        return cls(backend_id, endpoint, model_name, api_key, client=client)

    def send(self, prompt_text: str, params: CompletionParams) -> str:
        import httpx

        payload = {
            "model": self.model_name or params.model_name,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self._api_key}"}
        try:
            if self._client is not None:
                response = self._client.post(self.endpoint, json=payload,
                                             headers=headers,
                                             timeout=params.timeout)
            else:
                response = httpx.post(self.endpoint, json=payload,
                                      headers=headers, timeout=params.timeout)
        except httpx.TransportError as exc:
            raise TransportError(f"transport failure: {exc}") from exc
        if response.status_code in (401, 403):
            raise AuthenticationError(
                f"backend {self.backend_id} rejected credentials "
                f"({response.status_code})")
        if response.status_code == 429 or response.status_code >= 500:
            raise TransportError(
                f"backend {self.backend_id} returned {response.status_code}")
        if response.status_code != 200:
            raise BackendError(
                f"backend {self.backend_id} returned {response.status_code}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendError("malformed completion response") from exc


def resolve_backend(spec: str, *, fixtures_path=None) -> Backend:
    """Build a backend from a CLI-style id.

    "mock" → lenient echo mock; "mock:<fixtures.jsonl>" → strict fixture mock;
    anything else is treated as a remote backend id configured via env vars.
    """
    if spec == "mock":
        if fixtures_path is not None:
            return MockBackend.from_jsonl(fixtures_path)
        return MockBackend(strict=False)
    if spec.startswith("mock:"):
        return MockBackend.from_jsonl(spec.split(":", 1)[1])
    return HTTPChatBackend.from_env(spec)
