"""Leaf retrieval with BM25-style scoring, parent auto-merge, and reranking.

The default scorer and reranker are purely lexical so retrieval is offline
and deterministic; both are pluggable call points where a remote embedding
or cross-encoder service can be swapped in via configuration.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from codemix.chatbot.index import Index, IndexNode, NodeLevel

DEFAULT_RAW_TOP = 12
DEFAULT_KEEP = 6

_BM25_K1 = 1.5
_BM25_B = 0.75

_TERM_RE = re.compile(r"[^\W_]+", re.UNICODE)


def terms_of(text: str) -> list:
    return _TERM_RE.findall(text.lower())


class RetrievalStage(str, Enum):
    RAW = "raw"
    MERGED = "merged"
    RERANKED = "reranked"


@dataclass(frozen=True)
class RetrievalResult:
    nodes: tuple  # of (IndexNode, score), best first
    stage: RetrievalStage

    def __post_init__(self):
        scores = [s for _, s in self.nodes]
        if scores != sorted(scores, reverse=True):
            raise ValueError("retrieval results must be in non-increasing "
                             "score order")
        if self.stage is RetrievalStage.RAW:
            if any(n.level is not NodeLevel.LEAF for n, _ in self.nodes):
                raise ValueError("raw retrieval may only contain leaves")

    @property
    def node_ids(self) -> list:
        return [n.id for n, _ in self.nodes]


class BM25Scorer:
    """Okapi BM25 over the index leaves with the Lucene idf variant (never
    negative, so disjoint-vocabulary queries score exactly zero)."""

    def __init__(self, leaves):
        self._tfs = []
        self._lengths = []
        df = Counter()
        for leaf in leaves:
            tf = Counter(terms_of(leaf.text))
            self._tfs.append(tf)
            self._lengths.append(sum(tf.values()))
            df.update(tf.keys())
        n_docs = max(len(self._tfs), 1)
        self._avgdl = (sum(self._lengths) / n_docs) if self._lengths else 0.0
        self._idf = {
            term: math.log(1.0 + (n_docs - count + 0.5) / (count + 0.5))
            for term, count in df.items()
        }

    def scores(self, query: str) -> list:
        query_terms = terms_of(query)
        out = []
        for tf, length in zip(self._tfs, self._lengths):
            score = 0.0
            norm = _BM25_K1 * (1.0 - _BM25_B
                               + _BM25_B * (length / self._avgdl
                                            if self._avgdl else 0.0))
            for term in query_terms:
                f = tf.get(term, 0)
                if f:
                    score += self._idf[term] * f * (_BM25_K1 + 1.0) / (f + norm)
            out.append(score)
        return out


def overlap_scores(query: str, nodes) -> list:
    """Fraction of distinct query terms present in each node's text."""
    query_terms = set(terms_of(query))
    if not query_terms:
        return [0.0 for _ in nodes]
    out = []
    for node in nodes:
        node_terms = set(terms_of(node.text))
        out.append(len(query_terms & node_terms) / len(query_terms))
    return out


def _ranked(nodes, scores, limit):
    order = sorted(range(len(nodes)),
                   key=lambda i: (-scores[i], nodes[i].position))
    return tuple((nodes[i], scores[i]) for i in order[:limit])


def retrieve(index: Index, query_en: str, top: int = DEFAULT_RAW_TOP,
             scorer=None) -> RetrievalResult:
    """Score every leaf against the query; keep the best `top`, ties broken
    by document position."""
    if not query_en or not query_en.strip():
        raise ValueError("query is empty")
    if top < 1:
        raise ValueError("top must be >= 1")
    leaves = index.leaves
    if scorer is None:
        scorer = BM25Scorer(leaves).scores
    scores = list(scorer(query_en))
    if len(scores) != len(leaves):
        raise ValueError("scorer returned a wrong-sized score list")
    return RetrievalResult(nodes=_ranked(leaves, scores, top),
                           stage=RetrievalStage.RAW)


def auto_merge(result: RetrievalResult, index: Index) -> RetrievalResult:
    """Replace leaves with their parent when a strict majority of the
    parent's children were retrieved; the parent inherits the best replaced
    score."""
    if result.stage is not RetrievalStage.RAW:
        raise ValueError("auto_merge expects a raw retrieval result")
    by_parent = {}
    for leaf, score in result.nodes:
        by_parent.setdefault(leaf.parent_id, []).append((leaf, score))
    nodes, scores = [], []
    for parent_id, group in by_parent.items():
        parent = index.node(parent_id)
        if 2 * len(group) > len(parent.child_ids):
            nodes.append(parent)
            scores.append(max(s for _, s in group))
        else:
            for leaf, score in group:
                nodes.append(leaf)
                scores.append(score)
    return RetrievalResult(nodes=_ranked(nodes, scores, len(nodes)),
                           stage=RetrievalStage.MERGED)


def rerank(result: RetrievalResult, query_en: str, keep: int = DEFAULT_KEEP,
           reranker=None) -> RetrievalResult:
    """Re-score merged nodes (default: query-term overlap) and keep the top
    `keep` in non-increasing order."""
    if result.stage is not RetrievalStage.MERGED:
        raise ValueError("rerank expects a merged retrieval result")
    if keep < 1:
        raise ValueError("keep must be >= 1")
    nodes = [n for n, _ in result.nodes]
    if reranker is None:
        reranker = overlap_scores
    scores = list(reranker(query_en, nodes))
    if len(scores) != len(nodes):
        raise ValueError("reranker returned a wrong-sized score list")
    return RetrievalResult(nodes=_ranked(nodes, scores, keep),
                           stage=RetrievalStage.RERANKED)


def retrieve_context(index: Index, query_en: str, top: int = DEFAULT_RAW_TOP,
                     keep: int = DEFAULT_KEEP, scorer=None,
                     reranker=None) -> RetrievalResult:
    """Full retrieval pipeline: raw top-N, auto-merge, rerank to top-keep."""
    raw = retrieve(index, query_en, top=top, scorer=scorer)
    merged = auto_merge(raw, index)
    return rerank(merged, query_en, keep=keep, reranker=reranker)
