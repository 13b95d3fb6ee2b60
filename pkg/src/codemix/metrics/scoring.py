"""Tokenization and the three evaluation metrics, computed from scratch.

All metrics work on TokenSeq values produced by a single tokenization policy;
the policy id travels with every report so numbers from different policies are
never silently compared.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from codemix.corpus import Direction, clean_output
from codemix.metrics import kernels
from codemix.metrics.stemmer import porter_stem

TOKENIZE_POLICY_ID = "lower-punct-ws-v1"


@dataclass(frozen=True)
class TokenSeq:
    tokens: tuple[str, ...]
    policy_id: str = TOKENIZE_POLICY_ID

    def __post_init__(self):
        if any(not t for t in self.tokens):
            raise ValueError("empty token in TokenSeq")

    def __len__(self) -> int:
        return len(self.tokens)

    def __bool__(self) -> bool:
        return bool(self.tokens)


def tokenize(text: str) -> TokenSeq:
    """Lowercase, split punctuation and symbol characters into standalone
    tokens, split the rest on whitespace. Diacritics and non-Latin letters
    pass through untouched."""
    tokens: list[str] = []
    buf: list[str] = []

    def flush():
        if buf:
            tokens.append("".join(buf))
            buf.clear()

    for ch in text.lower():
        if ch.isspace():
            flush()
        elif unicodedata.category(ch)[0] in ("P", "S"):
            flush()
            tokens.append(ch)
        else:
            buf.append(ch)
    flush()
    return TokenSeq(tuple(tokens))


@dataclass(frozen=True)
class BleuBreakdown:
    precisions: tuple[tuple[int, int], ...]  # (matched, total) for n = 1..4
    hyp_length: int
    ref_length: int
    brevity_penalty: float


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(hyps: Sequence[TokenSeq], refs: Sequence[TokenSeq],
                max_n: int = 4) -> tuple[float, BleuBreakdown]:
    """Corpus BLEU without smoothing, single reference per hypothesis.

    Modified n-gram precisions aggregated over the corpus, geometric mean
    with uniform weights, times the brevity penalty. Any zero aggregated
    precision zeroes the score.
    """
    if len(hyps) != len(refs):
        raise ValueError(f"got {len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise ValueError("need at least one hypothesis")
    for i, h in enumerate(hyps):
        if not h:
            raise ValueError(f"empty hypothesis at pair index {i}")

    matched = [0] * max_n
    total = [0] * max_n
    c = 0
    r = 0
    for hyp, ref in zip(hyps, refs):
        c += len(hyp)
        r += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngram_counts(hyp.tokens, n)
            ref_counts = _ngram_counts(ref.tokens, n)
            matched[n - 1] += sum(min(cnt, ref_counts[g]) for g, cnt in hyp_counts.items())
            total[n - 1] += max(len(hyp) - n + 1, 0)

    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    breakdown = BleuBreakdown(tuple(zip(matched, total)), c, r, bp)
    if any(m == 0 or t == 0 for m, t in zip(matched, total)):
        return 0.0, breakdown
    log_sum = sum(math.log(m / t) for m, t in zip(matched, total))
    return 100.0 * bp * math.exp(log_sum / max_n), breakdown


def _to_ids(tokens: Iterable[str], vocab: dict[str, int]) -> list[int]:
    ids = []
    for t in tokens:
        if t not in vocab:
            vocab[t] = len(vocab)
        ids.append(vocab[t])
    return ids


def rouge_l(hyp: TokenSeq, ref: TokenSeq) -> tuple[float, float, float]:
    """LCS-based precision, recall, F1 in [0, 1]; zeros when either side is
    empty or nothing is shared."""
    if not hyp or not ref:
        return 0.0, 0.0, 0.0
    vocab: dict[str, int] = {}
    lcs = kernels.lcs_length(_to_ids(hyp.tokens, vocab), _to_ids(ref.tokens, vocab))
    p = lcs / len(hyp)
    r = lcs / len(ref)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


@dataclass(frozen=True)
class SynonymTable:
    """Groups of mutually substitutable words for the METEOR synonym stage."""
    id: str
    groups: tuple[frozenset[str], ...]
    _word_to_group: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for gi, group in enumerate(self.groups):
            for w in group:
                self._word_to_group.setdefault(w, gi)

    @classmethod
    def from_groups(cls, table_id: str, groups: Iterable[Iterable[str]]) -> "SynonymTable":
        return cls(table_id, tuple(frozenset(w.lower() for w in g) for g in groups))

    def group_of(self, word: str) -> Optional[int]:
        return self._word_to_group.get(word)


def _meteor_stage_keys(hyp_tokens: Sequence[str], ref_tokens: Sequence[str],
                       stemming: bool, synonyms: Optional[SynonymTable],
                       ) -> tuple[list[list[int]], list[list[int]]]:
    vocab: dict[str, int] = {}
    h_exact = _to_ids(hyp_tokens, vocab)
    r_exact = _to_ids(ref_tokens, vocab)
    h_stages = [h_exact]
    r_stages = [r_exact]
    if stemming:
        h_stages.append(_to_ids((porter_stem(t) for t in hyp_tokens), vocab))
        r_stages.append(_to_ids((porter_stem(t) for t in ref_tokens), vocab))
    if synonyms is not None:
        # tokens with no group fall back to their own word id; group keys are
        # offset past every interned id so the two key spaces cannot collide
        offset = len(vocab) + 1

        def syn_keys(tokens: Sequence[str], exact: Sequence[int]) -> list[int]:
            keys = []
            for t, wid in zip(tokens, exact):
                g = synonyms.group_of(t)
                keys.append(offset + g if g is not None else wid)
            return keys

        h_stages.append(syn_keys(hyp_tokens, h_exact))
        r_stages.append(syn_keys(ref_tokens, r_exact))
    return h_stages, r_stages


def meteor(hyp: TokenSeq, ref: TokenSeq, stemming: bool = False,
           synonyms: Optional[SynonymTable] = None) -> float:
    """Score in [0, 1]: greedy staged alignment (exact, then stem, then
    synonym), harmonic mean weighted 9:1 toward recall, times a fragmentation
    penalty 0.5*(chunks/matches)^3."""
    if not hyp or not ref:
        return 0.0
    hyp_stages, ref_stages = _meteor_stage_keys(hyp.tokens, ref.tokens, stemming, synonyms)
    m, chunks = kernels.greedy_align(hyp_stages, ref_stages)
    if m == 0:
        return 0.0
    p = m / len(hyp)
    r = m / len(ref)
    f_mean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / m) ** 3
    return f_mean * (1.0 - penalty)


@dataclass(frozen=True)
class MetricReport:
    """The three corpus scores, reported on the 0-100 scale."""
    bleu: float
    rouge_l_f1: float
    meteor: float
    n_pairs: int
    options: dict

    def as_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "rouge_l_f1": self.rouge_l_f1,
            "meteor": self.meteor,
            "n_pairs": self.n_pairs,
            "options": self.options,
        }


def evaluate_corpus(pairs: Sequence[tuple[str, str]], direction: Direction,
                    stemming: Optional[bool] = None,
                    synonyms: Optional[SynonymTable] = None,
                    clean: bool = True,
                    on_empty: str = "error") -> MetricReport:
    """Score (hypothesis, reference) text pairs.

    Hypotheses are cleaned (unless ``clean`` is off), both sides tokenized,
    then corpus BLEU, mean ROUGE-L F1, and mean METEOR are computed, all
    scaled to 0-100. Stemming defaults to on only when translating back into
    English.

    ``on_empty`` controls hypotheses that clean to nothing: "error" raises
    (matching corpus_bleu), "partial" scores them 0 for ROUGE/METEOR and
    computes BLEU over the non-empty subset.
    """
    if not pairs:
        raise ValueError("empty pair list")
    if on_empty not in ("error", "partial"):
        raise ValueError(f"unknown on_empty policy {on_empty!r}")
    if stemming is None:
        stemming = direction is Direction.CM2EN

    hyp_seqs = []
    ref_seqs = []
    for hyp_text, ref_text in pairs:
        hyp_seqs.append(tokenize(clean_output(hyp_text) if clean else hyp_text))
        ref_seqs.append(tokenize(ref_text))

    empties = [i for i, h in enumerate(hyp_seqs) if not h]
    if empties and on_empty == "error":
        raise ValueError(f"empty hypothesis at pair index {empties[0]}")

    kept = [(h, r) for h, r in zip(hyp_seqs, ref_seqs) if h]
    if kept:
        bleu_score, _ = corpus_bleu([h for h, _ in kept], [r for _, r in kept])
    else:
        bleu_score = 0.0

    rouge_f1s = [rouge_l(h, r)[2] for h, r in zip(hyp_seqs, ref_seqs)]
    meteor_scores = [meteor(h, r, stemming=stemming, synonyms=synonyms)
                     for h, r in zip(hyp_seqs, ref_seqs)]

    n = len(pairs)
    return MetricReport(
        bleu=bleu_score,
        rouge_l_f1=100.0 * sum(rouge_f1s) / n,
        meteor=100.0 * sum(meteor_scores) / n,
        n_pairs=n,
        options={
            "stemming": stemming,
            "synonyms": synonyms.id if synonyms is not None else None,
            "tokenize_policy": TOKENIZE_POLICY_ID,
            "cleaned": clean,
            "lowercased_in_clean": False,
            "on_empty": on_empty,
            "n_empty_hyps": len(empties),
        },
    )
