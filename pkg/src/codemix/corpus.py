"""Parallel dataset handling: loading, splitting, output cleaning, and script diagnostics.

A dataset is a list of (english, code_mixed) sentence pairs for one language
pair. Files are TSV (english TAB code_mixed) or JSON-lines with keys
``english`` / ``code_mixed``; the extension picks the parser.
"""

from __future__ import annotations

import json
import random
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence


class Script(str, Enum):
    DEVANAGARI = "Devanagari"
    BENGALI = "Bengali"
    GUJARATI = "Gujarati"
    LATIN = "Latin"


class Direction(str, Enum):
    """Translation direction: English to code-mixed, or back."""
    EN2CM = "en2cm"
    CM2EN = "cm2en"


@dataclass(frozen=True)
class LanguagePair:
    """One of the five English-X pairs.

    ``matrix_language`` is the language that supplies the grammatical frame of
    the code-mixed sentence; English is always the embedded language.
    ``matrix_informal`` is the colloquial English name used in some prompt
    wordings ("Bangla" vs "Bengali"); it equals ``matrix_language`` for the
    other pairs.
    """

    id: str
    matrix_language: str
    matrix_script: Script
    matrix_informal: str = ""
    requires_translit_bridge: bool = False

    def __post_init__(self):
        if not self.matrix_informal:
            object.__setattr__(self, "matrix_informal", self.matrix_language)

    @property
    def label(self) -> str:
        return f"English-{self.matrix_language}"


EN_HI = LanguagePair("en-hi", "Hindi", Script.DEVANAGARI)
EN_BN = LanguagePair("en-bn", "Bengali", Script.BENGALI, matrix_informal="Bangla",
                     requires_translit_bridge=True)
EN_GU = LanguagePair("en-gu", "Gujarati", Script.GUJARATI)
EN_FR = LanguagePair("en-fr", "French", Script.LATIN)
EN_ES = LanguagePair("en-es", "Spanish", Script.LATIN)

LANGUAGE_PAIRS: dict[str, LanguagePair] = {p.id: p for p in (EN_HI, EN_BN, EN_GU, EN_FR, EN_ES)}


def get_pair(pair_id: str) -> LanguagePair:
    try:
        return LANGUAGE_PAIRS[pair_id]
    except KeyError:
        known = ", ".join(sorted(LANGUAGE_PAIRS))
        raise KeyError(f"unknown language pair {pair_id!r} (known: {known})") from None


class DatasetError(ValueError):
    """Malformed dataset file or invalid split request."""


@dataclass(frozen=True)
class ParallelExample:
    id: str
    pair: LanguagePair
    english: str
    code_mixed: str

    def __post_init__(self):
        if not self.english.strip():
            raise DatasetError(f"example {self.id}: empty english sentence")
        if not self.code_mixed.strip():
            raise DatasetError(f"example {self.id}: empty code-mixed sentence")


@dataclass
class Dataset:
    pair: LanguagePair
    examples: list[ParallelExample] = field(default_factory=list)

    def __post_init__(self):
        ids = [ex.id for ex in self.examples]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DatasetError(f"duplicate example ids: {dupes}")

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)


def load_parallel(path: str | Path, pair: LanguagePair) -> Dataset:
    """Load a parallel file, preserving file order.

    Ids default to zero-padded line indices; JSON-lines records may carry
    their own ``id``. Blank lines are skipped. Errors name the 1-based line
    number.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    text = path.read_text(encoding="utf-8")
    jsonl = path.suffix.lower() in (".jsonl", ".ndjson", ".json")
    examples = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        if jsonl:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if "english" not in obj or "code_mixed" not in obj:
                raise DatasetError(f"{path}:{lineno}: missing english/code_mixed keys")
            english, code_mixed = obj["english"], obj["code_mixed"]
            ex_id = str(obj.get("id", f"{lineno - 1:04d}"))
        else:
            fields = line.split("\t")
            if len(fields) != 2:
                raise DatasetError(
                    f"{path}:{lineno}: expected 2 tab-separated fields, got {len(fields)}"
                )
            english, code_mixed = fields
            ex_id = f"{lineno - 1:04d}"
        if not english.strip() or not code_mixed.strip():
            raise DatasetError(f"{path}:{lineno}: empty field")
        examples.append(ParallelExample(ex_id, pair, english.strip(), code_mixed.strip()))
    return Dataset(pair, examples)


def split_examples(dataset: Dataset, n_shots_pool: int, n_test: int,
                   seed: int) -> tuple[Dataset, Dataset]:
    """Draw a disjoint shot pool and test set, deterministically for a seed.

    The pool is drawn first, the test set from the remainder; both keep the
    dataset's original ordering.
    """
    n = len(dataset)
    if n_shots_pool < 0 or n_test < 0:
        raise DatasetError("split sizes must be non-negative")
    if n_shots_pool + n_test > n:
        raise DatasetError(
            f"need {n_shots_pool + n_test} examples (pool {n_shots_pool} + test {n_test}), "
            f"have {n}"
        )
    order = list(range(n))
    random.Random(seed).shuffle(order)
    pool_idx = set(order[:n_shots_pool])
    test_idx = set(order[n_shots_pool:n_shots_pool + n_test])
    pool = [ex for i, ex in enumerate(dataset.examples) if i in pool_idx]
    test = [ex for i, ex in enumerate(dataset.examples) if i in test_idx]
    return Dataset(dataset.pair, pool), Dataset(dataset.pair, test)


# Labels a model tends to prefix to its translation; stripped before scoring.
# Matching is case-insensitive; longer labels listed first so they win.
DEFAULT_CLEAN_LABELS = (
    "Transliteration to Roman",
    "Code-Mixed",
    "Translation",
    "English",
    "Output",
)

_QUOTE_PAIRS = {'"': '"', "'": "'", "“": "”", "‘": "’", "«": "»"}
_WS_RUN = re.compile(r"\s+")


def _strip_label(text: str, labels: Sequence[str]) -> str:
    lowered = text.lower()
    for label in labels:
        prefix = label.lower()
        if lowered.startswith(prefix):
            rest = text[len(label):].lstrip()
            if rest.startswith(":"):
                return rest[1:].lstrip()
    return text


def _strip_quotes(text: str) -> str:
    if len(text) >= 2 and text[0] in _QUOTE_PAIRS and text[-1] == _QUOTE_PAIRS[text[0]]:
        # for symmetric quotes, only strip a lone surrounding pair
        if text[0] == text[-1] and text.count(text[0]) != 2:
            return text
        return text[1:-1].strip()
    return text


def clean_output(raw: str, labels: Sequence[str] = DEFAULT_CLEAN_LABELS) -> str:
    """Strip leading answer labels and wrapping quotes, normalize whitespace.

    Total and idempotent: the pipeline is applied until a fixed point, so a
    doubly labelled output ("Translation: Code-Mixed: ...") still comes out
    bare.
    """
    text = raw
    while True:
        prev = text
        text = _WS_RUN.sub(" ", text).strip()
        text = _strip_label(text, labels)
        text = _strip_quotes(text)
        if text == prev:
            return text


_TOKEN_WITH_URL = re.compile(r"\s*\S*(?:https?|t\.co/)\S*", re.IGNORECASE)
_MENTION = re.compile(r"\s*@\S*")


def normalize_social(text: str) -> str:
    """Normalize social-media text: lowercase, drop URLs and mentions, keep
    hashtag text, and squeeze any character repeated more than twice in a row
    (whitespace included) down to one occurrence."""
    text = text.lower()
    text = _TOKEN_WITH_URL.sub("", text)
    text = _MENTION.sub("", text)
    text = text.replace("#", "")
    text = re.sub(r"(.)\1{2,}", r"\1", text, flags=re.DOTALL)
    return text.strip()


_SCRIPT_RANGES = (
    (Script.DEVANAGARI.value, 0x0900, 0x097F),
    (Script.BENGALI.value, 0x0980, 0x09FF),
    (Script.GUJARATI.value, 0x0A80, 0x0AFF),
)
_LATIN_RANGES = ((0x0041, 0x024F), (0x1E00, 0x1EFF))


def _classify_letter(ch: str) -> str:
    cp = ord(ch)
    for lo, hi in _LATIN_RANGES:
        if lo <= cp <= hi:
            return Script.LATIN.value
    for name, lo, hi in _SCRIPT_RANGES:
        if lo <= cp <= hi:
            return name
    return "Other"


@dataclass(frozen=True)
class ScriptProfile:
    counts: dict[str, int]
    latin_ratio: float

    @property
    def total_letters(self) -> int:
        return sum(self.counts.values())


def script_profile(text: str) -> ScriptProfile:
    """Count letter codepoints per script block; non-letters are ignored.

    ``latin_ratio`` is Latin letters over all letters (0 for letterless text).
    Used to diagnose non-Roman leakage in model output that was asked to stay
    in Roman script.
    """
    counts: dict[str, int] = {}
    for ch in text:
        if unicodedata.category(ch).startswith("L"):
            key = _classify_letter(ch)
            counts[key] = counts.get(key, 0) + 1
    total = sum(counts.values())
    ratio = counts.get(Script.LATIN.value, 0) / total if total else 0.0
    return ScriptProfile(counts, ratio)


def dataset_script_report(dataset: Dataset) -> list[tuple[str, ScriptProfile]]:
    """Profile every gold code-mixed sentence; callers warn on non-Roman gold
    for non-Latin matrix pairs rather than rejecting the data."""
    return [(ex.id, script_profile(ex.code_mixed)) for ex in dataset]


def write_tsv(examples: Iterable[ParallelExample], path: str | Path) -> None:
    lines = [f"{ex.english}\t{ex.code_mixed}" for ex in examples]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
