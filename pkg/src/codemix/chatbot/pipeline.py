"""The question/answer translation pipeline and per-session chat state.

A code-mixed query is (optionally) transliterated into the matrix script,
translated to English, answered from retrieved context, and the English
answer translated back into code-mixed text. Every model call goes through
the shared completion layer, so rate limits and call records apply here too.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from codemix.chatbot.index import Index
from codemix.chatbot.retrieval import DEFAULT_KEEP, DEFAULT_RAW_TOP, retrieve_context
from codemix.corpus import LanguagePair, clean_output
from codemix.llm import BackendError, CompletionParams, complete
from codemix.prompts import (
    render_chat_answer,
    render_chat_to_cm,
    render_translate_to_english,
    render_translit_to_matrix,
)

DEFAULT_MEMORY_TURNS = 6


class ChatRole(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"


@dataclass(frozen=True)
class ChatTurn:
    role: ChatRole
    pair: LanguagePair
    text_cm: str
    text_en: str = ""
    source_node_ids: tuple = ()
    error: Optional[str] = None

    def __post_init__(self):
        if self.role is ChatRole.USER and self.source_node_ids:
            raise ValueError("user turns carry no source nodes")


@dataclass(frozen=True)
class _Exchange:
    query_en: str
    turn: ChatTurn


def _history_chunk(history: Sequence[ChatTurn]) -> Optional[str]:
    lines = []
    for turn in history:
        speaker = "User" if turn.role is ChatRole.USER else "Assistant"
        text = turn.text_en or turn.text_cm
        if text:
            lines.append(f"{speaker}: {text}")
    if not lines:
        return None
    return "Conversation so far:\n" + "\n".join(lines)


def _error_turn(pair: LanguagePair, diagnostic: str) -> ChatTurn:
    return ChatTurn(role=ChatRole.ASSISTANT, pair=pair, text_cm="",
                    text_en="", error=diagnostic)


def _complete_with_retry(backend, prompt, params, recorder, limiter):
    """One automatic retry when the output comes back degenerate."""
    result = complete(backend, prompt, params, recorder=recorder,
                      limiter=limiter)
    if result.degenerate_flags:
        result = complete(backend, prompt, params, recorder=recorder,
                          limiter=limiter)
    return result


def _pipeline(query_cm: str, pair: LanguagePair, index: Index, backend, *,
              params: Optional[CompletionParams] = None,
              history: Sequence[ChatTurn] = (),
              use_translit_bridge: Optional[bool] = None,
              top: int = DEFAULT_RAW_TOP, keep: int = DEFAULT_KEEP,
              scorer=None, reranker=None, recorder=None,
              limiter=None) -> _Exchange:
    if not query_cm or not query_cm.strip():
        raise ValueError("query is empty")
    params = params if params is not None else CompletionParams()
    bridge = (pair.requires_translit_bridge if use_translit_bridge is None
              else use_translit_bridge)
    try:
        working = query_cm
        if bridge:
            translit = complete(backend,
                                render_translit_to_matrix(pair, working),
                                params, recorder=recorder, limiter=limiter)
            if translit.degenerate_flags:
                return _Exchange("", _error_turn(
                    pair, "transliteration step returned a degenerate output"))
            working = clean_output(translit.text)

        translated = complete(backend,
                              render_translate_to_english(pair, working),
                              params, recorder=recorder, limiter=limiter)
        query_en = clean_output(translated.text)
        if not query_en:
            return _Exchange("", _error_turn(
                pair, "query translation returned an empty output"))

        context = retrieve_context(index, query_en, top=top, keep=keep,
                                   scorer=scorer, reranker=reranker)
        chunks = [node.text.strip() for node, _ in context.nodes]
        memory = _history_chunk(history)
        if memory is not None:
            chunks = [memory] + chunks

        answer_result = _complete_with_retry(
            backend, render_chat_answer(pair, query_en, chunks), params,
            recorder, limiter)
        if answer_result.degenerate_flags:
            return _Exchange(query_en, _error_turn(
                pair, "answer generation degenerate after one retry"))
        answer_en = answer_result.text.strip()

        to_cm = complete(backend, render_chat_to_cm(pair, answer_en), params,
                         recorder=recorder, limiter=limiter)
        if to_cm.degenerate_flags:
            return _Exchange(query_en, _error_turn(
                pair, "code-mixed translation returned a degenerate output"))
        turn = ChatTurn(role=ChatRole.ASSISTANT, pair=pair,
                        text_cm=to_cm.text.strip(), text_en=answer_en,
                        source_node_ids=tuple(context.node_ids))
        return _Exchange(query_en, turn)
    except BackendError as exc:
        return _Exchange("", _error_turn(pair, f"backend failure: {exc}"))


def answer(query_cm: str, pair: LanguagePair, index: Index, backend,
           **kwargs) -> ChatTurn:
    """Answer one code-mixed question; returns the assistant turn, which on
    failure carries a diagnostic in `error` instead of text."""
    return _pipeline(query_cm, pair, index, backend, **kwargs).turn


@dataclass
class ChatSession:
    """One conversation: immutable shared index, private turn history."""

    pair: LanguagePair
    index: Index
    backend: object
    params: Optional[CompletionParams] = None
    memory_turns: int = DEFAULT_MEMORY_TURNS
    use_translit_bridge: Optional[bool] = None
    scorer: object = None
    reranker: object = None
    recorder: object = None
    limiter: object = None
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    turns: list = field(default_factory=list)

    def __post_init__(self):
        self._lock = threading.Lock()

    def ask(self, query_cm: str) -> ChatTurn:
        """Run the pipeline for one query. Successful exchanges append a user
        and an assistant turn; failures leave the thread untouched."""
        with self._lock:
            history = tuple(self.turns[-self.memory_turns:])
            exchange = _pipeline(
                query_cm, self.pair, self.index, self.backend,
                params=self.params, history=history,
                use_translit_bridge=self.use_translit_bridge,
                scorer=self.scorer, reranker=self.reranker,
                recorder=self.recorder, limiter=self.limiter)
            if exchange.turn.error is None:
                self.turns.append(ChatTurn(role=ChatRole.USER, pair=self.pair,
                                           text_cm=query_cm,
                                           text_en=exchange.query_en))
                self.turns.append(exchange.turn)
            return exchange.turn
