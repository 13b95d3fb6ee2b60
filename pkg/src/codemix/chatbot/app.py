"""HTTP face of the chatbot: /chat, /pairs, /health."""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from codemix.chatbot.index import Index
from codemix.chatbot.pipeline import DEFAULT_MEMORY_TURNS, ChatSession
from codemix.corpus import LANGUAGE_PAIRS
from codemix.llm import CompletionParams, RateLimiter, Recorder


class ChatRequest(BaseModel):
    pair: str
    message: str
    session_id: Optional[str] = None


class ChatResponse(BaseModel):
    answer_cm: str
    answer_en: str
    sources: list
    session_id: str


def create_app(index: Optional[Index] = None, backend=None, *,
               params: Optional[CompletionParams] = None,
               memory_turns: int = DEFAULT_MEMORY_TURNS,
               recorder: Optional[Recorder] = None,
               limiter: Optional[RateLimiter] = None,
               allow_origins=("*",)) -> FastAPI:
    """Build the service. Passing index=None serves 503 on /chat until an
    index is attached to app.state, which lets the process come up first and
    index in the background."""
    app = FastAPI(title="codemix chatbot")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(allow_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.index = index
    app.state.backend = backend
    app.state.params = params
    app.state.memory_turns = memory_turns
    app.state.recorder = recorder
    app.state.limiter = limiter
    app.state.sessions = {}
    app.state.sessions_lock = threading.Lock()

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "index_loaded": app.state.index is not None}

    @app.get("/pairs")
    def pairs() -> list:
        return [{"id": pair.id, "label": pair.label}
                for pair in LANGUAGE_PAIRS.values()]

    @app.post("/chat", response_model=ChatResponse)
    def chat(request: ChatRequest) -> ChatResponse:
        if app.state.index is None or app.state.backend is None:
            raise HTTPException(status_code=503, detail="index not loaded")
        if request.pair not in LANGUAGE_PAIRS:
            raise HTTPException(status_code=400,
                                detail=f"unknown language pair {request.pair!r}")
        if not request.message.strip():
            raise HTTPException(status_code=400, detail="message is empty")
        pair = LANGUAGE_PAIRS[request.pair]
        with app.state.sessions_lock:
            session = app.state.sessions.get(request.session_id)
            if session is None or session.pair is not pair:
                session = ChatSession(
                    pair=pair, index=app.state.index,
                    backend=app.state.backend, params=app.state.params,
                    memory_turns=app.state.memory_turns,
                    recorder=app.state.recorder, limiter=app.state.limiter,
                    **({"session_id": request.session_id}
                       if request.session_id else {}))
                app.state.sessions[session.session_id] = session
        turn = session.ask(request.message)
        if turn.error is not None:
            raise HTTPException(status_code=502, detail=turn.error)
        return ChatResponse(answer_cm=turn.text_cm, answer_en=turn.text_en,
                            sources=list(turn.source_node_ids),
                            session_id=session.session_id)

    return app


def serve(app: FastAPI, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port)
