"""Evaluation metrics: tokenization, corpus BLEU, ROUGE-L, METEOR."""

from codemix.metrics.kernels import KERNEL_BACKEND, greedy_align, lcs_length
from codemix.metrics.scoring import (
    TOKENIZE_POLICY_ID,
    BleuBreakdown,
    MetricReport,
    SynonymTable,
    TokenSeq,
    corpus_bleu,
    evaluate_corpus,
    meteor,
    rouge_l,
    tokenize,
)
from codemix.metrics.stemmer import porter_stem

__all__ = [
    "KERNEL_BACKEND",
    "TOKENIZE_POLICY_ID",
    "BleuBreakdown",
    "MetricReport",
    "SynonymTable",
    "TokenSeq",
    "corpus_bleu",
    "evaluate_corpus",
    "greedy_align",
    "lcs_length",
    "meteor",
    "porter_stem",
    "rouge_l",
    "tokenize",
]
