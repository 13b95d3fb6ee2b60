"""RAG chatbot: hierarchical index, merge/rerank retrieval, chat pipeline."""

from codemix.chatbot.app import ChatRequest, ChatResponse, create_app, serve
from codemix.chatbot.index import (
    DEFAULT_LEAF_SIZE,
    DEFAULT_PARENT_SIZE,
    Index,
    IndexNode,
    IndexingError,
    NodeLevel,
    build_index,
)
from codemix.chatbot.pipeline import (
    DEFAULT_MEMORY_TURNS,
    ChatRole,
    ChatSession,
    ChatTurn,
    answer,
)
from codemix.chatbot.retrieval import (
    DEFAULT_KEEP,
    DEFAULT_RAW_TOP,
    BM25Scorer,
    RetrievalResult,
    RetrievalStage,
    auto_merge,
    overlap_scores,
    rerank,
    retrieve,
    retrieve_context,
    terms_of,
)

__all__ = [
    "BM25Scorer",
    "ChatRequest",
    "ChatResponse",
    "ChatRole",
    "ChatSession",
    "ChatTurn",
    "DEFAULT_KEEP",
    "DEFAULT_LEAF_SIZE",
    "DEFAULT_MEMORY_TURNS",
    "DEFAULT_PARENT_SIZE",
    "DEFAULT_RAW_TOP",
    "Index",
    "IndexNode",
    "IndexingError",
    "NodeLevel",
    "RetrievalResult",
    "RetrievalStage",
    "answer",
    "auto_merge",
    "build_index",
    "create_app",
    "overlap_scores",
    "rerank",
    "retrieve",
    "retrieve_context",
    "serve",
    "terms_of",
]
