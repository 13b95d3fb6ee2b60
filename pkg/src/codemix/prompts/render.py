"""Prompt construction for every model interaction in the pipeline.

Templates live in ``templates/`` as plain text with ``{slot}`` markers; lines
starting with '#' at the top of a file are loader-stripped comments. Filling
is strict: a template's slots and the provided values must match exactly, so
drift between a template file and its call site fails loudly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

from codemix.corpus import Direction, LanguagePair, ParallelExample, Script


class PromptVariant(str, Enum):
    KSHOT_ALPHA = "kshot_alpha"
    KSHOT_BETA = "kshot_beta"
    RULE = "rule"
    EXTRACTION = "extraction"
    TRANSLATE_CM2EN = "translate_cm2en"
    TRANSLIT_TO_MATRIX = "translit_to_matrix"
    TRANSLATE_EN2CM_0SHOT = "translate_en2cm_0shot"
    CHAT_ANSWER = "chat_answer"
    CHAT_TO_CM = "chat_to_cm"


class RuleId(str, Enum):
    R1 = "rule1"
    R2 = "rule2"
    R3 = "rule3"
    R4 = "rule4"

    @property
    def number(self) -> int:
        return int(self.value[-1])


ALLOWED_K = (0, 1, 10, 20)

_KSHOT_VARIANTS = (PromptVariant.KSHOT_ALPHA, PromptVariant.KSHOT_BETA)


@dataclass(frozen=True)
class PromptKind:
    variant: PromptVariant
    k: int = 0
    rule_id: Optional[RuleId] = None
    direction: Direction = Direction.EN2CM

    def __post_init__(self):
        if (self.rule_id is not None) != (self.variant is PromptVariant.RULE):
            raise ValueError("rule_id must be set exactly when variant is RULE")
        if self.variant in _KSHOT_VARIANTS:
            if self.k not in ALLOWED_K:
                raise ValueError(f"k must be one of {ALLOWED_K}, got {self.k}")
        elif self.k != 0:
            raise ValueError(f"k must be 0 for {self.variant.value} prompts")

    @property
    def label(self) -> str:
        """Short stable tag for call ledgers, e.g. ``kshot_beta10`` or ``rule3``."""
        if self.variant is PromptVariant.RULE:
            return self.rule_id.value
        if self.variant in _KSHOT_VARIANTS:
            return f"{self.variant.value}{self.k}"
        return self.variant.value


@dataclass(frozen=True)
class RenderedPrompt:
    kind: PromptKind
    pair: LanguagePair
    text: str
    placeholders_filled: dict

    def __post_init__(self):
        # a remaining slot marker is legal only if a filled value contained it
        for name in _SLOT_RE.findall(self.text):
            if name not in _ALL_SLOTS:
                continue
            marker = "{" + name + "}"
            if not any(marker in str(v) for v in self.placeholders_filled.values()):
                raise ValueError(f"unfilled template slot {marker!r} in prompt text")


_SLOT_RE = re.compile(r"\{([a-z_]+)\}")
# every slot name any template may use; used to catch typos at fill time
_ALL_SLOTS = frozenset({
    "sentence", "example", "examples", "matrix_language", "matrix_informal",
    "matrix_script", "fenced_output", "context", "question",
})


@lru_cache(maxsize=None)
def _load_template(name: str) -> str:
    path = resources.files("codemix.prompts") / "templates" / name
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    start = 0
    while start < len(lines) and lines[start].startswith("#"):
        start += 1
    return "\n".join(lines[start:]).rstrip("\n")


def _fill(template: str, **slots: str) -> tuple[str, dict]:
    wanted = set(_SLOT_RE.findall(template))
    unknown = wanted - _ALL_SLOTS
    if unknown:
        raise ValueError(f"template uses unknown slots: {sorted(unknown)}")
    missing = wanted - set(slots)
    extra = set(slots) - wanted
    if missing or extra:
        raise ValueError(f"slot mismatch: missing {sorted(missing)}, unused {sorted(extra)}")
    text = template
    for key, value in slots.items():
        text = text.replace(f"{{{key}}}", value)
    return text, dict(slots)


def render_kshot(pair: LanguagePair, direction: Direction, variant: PromptVariant,
                 k: int, shots: Sequence[ParallelExample], sentence: str) -> RenderedPrompt:
    """k-shot translation prompt. Alpha shots show only the code-mixed side;
    beta shots show the English/code-mixed pair. k=0 is the bare instruction
    prompt for the direction."""
    if variant not in _KSHOT_VARIANTS:
        raise ValueError(f"not a k-shot variant: {variant}")
    if len(shots) != k:
        raise ValueError(f"expected {k} shots, got {len(shots)}")
    if not sentence.strip():
        raise ValueError("empty input sentence")
    kind = PromptKind(variant=variant, k=k, direction=direction)

    if k == 0:
        template = _load_template(f"kshot0_{direction.value}.txt")
        text, filled = _fill(template, matrix_informal=pair.matrix_informal,
                             sentence=sentence)
        return RenderedPrompt(kind, pair, text, filled)

    alpha = variant is PromptVariant.KSHOT_ALPHA
    stem = "alpha" if alpha else "beta"
    count = "one" if k == 1 else "many"
    template = _load_template(f"kshot_{stem}_{count}_{direction.value}.txt")

    slots: dict[str, str] = {"sentence": sentence}
    if alpha and k == 1:
        slots["example"] = shots[0].code_mixed
        slots["matrix_language"] = pair.matrix_language
    elif alpha:
        slots["examples"] = "\n".join(f'"{s.code_mixed}"' for s in shots)
    else:
        slots["examples"] = "\n\n".join(
            f'English: "{s.english}"\n\nCode-Mixed: "{s.code_mixed}"' for s in shots)
    slots["matrix_informal"] = pair.matrix_informal
    text, filled = _fill(template, **slots)
    return RenderedPrompt(kind, pair, text, filled)


_STEP_LINE_RE = re.compile(r"^\d+\. ")


def render_rule(rule_id: RuleId, pair: LanguagePair, sentence: str) -> RenderedPrompt:
    """Numbered instruction chain for one generation rule. Latin-script pairs
    drop the trailing transliteration step: their code-mixed form already is
    the native orthography."""
    if not sentence.strip():
        raise ValueError("empty input sentence")
    template = _load_template(f"{rule_id.value}.txt")
    text, filled = _fill(template, matrix_language=pair.matrix_language,
                         sentence=sentence)
    if pair.matrix_script is Script.LATIN:
        lines = text.split("\n")
        step_idxs = [i for i, ln in enumerate(lines) if _STEP_LINE_RE.match(ln)]
        last = step_idxs[-1]
        if "Transliterat" not in lines[last]:
            raise RuntimeError(f"{rule_id.value} template: final step is not transliteration")
        text = "\n".join(lines[:last]).rstrip("\n")
    kind = PromptKind(variant=PromptVariant.RULE, rule_id=rule_id)
    return RenderedPrompt(kind, pair, text, filled)


def _fence_for(payload: str) -> str:
    longest = max((len(m.group(0)) for m in re.finditer(r"`+", payload)), default=0)
    return "`" * max(3, longest + 1)


def render_extraction(pair: LanguagePair, llm_output: str) -> RenderedPrompt:
    """Ask the model to pull the final sentence out of a step-by-step
    transcript. The transcript is fenced; the fence grows past any backtick
    run inside the payload."""
    if not llm_output.strip():
        raise ValueError("empty transcript")
    fence = _fence_for(llm_output)
    fenced = f"{fence}\n{llm_output}\n{fence}"
    text, filled = _fill(_load_template("extraction.txt"), fenced_output=fenced)
    kind = PromptKind(variant=PromptVariant.EXTRACTION)
    return RenderedPrompt(kind, pair, text, filled)


def render_translit_to_matrix(pair: LanguagePair, sentence: str) -> RenderedPrompt:
    if pair.matrix_script is Script.LATIN:
        raise ValueError(f"{pair.id} is already Latin-script; nothing to transliterate")
    if not sentence.strip():
        raise ValueError("empty input sentence")
    text, filled = _fill(_load_template("translit_to_matrix.txt"),
                         matrix_script=pair.matrix_script.value, sentence=sentence)
    kind = PromptKind(variant=PromptVariant.TRANSLIT_TO_MATRIX)
    return RenderedPrompt(kind, pair, text, filled)


def render_translate_to_english(pair: LanguagePair, sentence: str) -> RenderedPrompt:
    if not sentence.strip():
        raise ValueError("empty input sentence")
    text, filled = _fill(_load_template("translate_to_english.txt"), sentence=sentence)
    kind = PromptKind(variant=PromptVariant.TRANSLATE_CM2EN, direction=Direction.CM2EN)
    return RenderedPrompt(kind, pair, text, filled)


def render_translate_en2cm(pair: LanguagePair, sentence: str) -> RenderedPrompt:
    """Plain zero-shot English-to-code-mixed translation prompt."""
    if not sentence.strip():
        raise ValueError("empty input sentence")
    text, filled = _fill(_load_template("kshot0_en2cm.txt"),
                         matrix_informal=pair.matrix_informal, sentence=sentence)
    kind = PromptKind(variant=PromptVariant.TRANSLATE_EN2CM_0SHOT)
    return RenderedPrompt(kind, pair, text, filled)


def render_chat_answer(pair: LanguagePair, question: str,
                       context_chunks: Sequence[str]) -> RenderedPrompt:
    if not question.strip():
        raise ValueError("empty question")
    if not context_chunks:
        raise ValueError("no context chunks")
    context = "\n\n".join(context_chunks)
    text, filled = _fill(_load_template("chat_answer.txt"),
                         context=context, question=question)
    kind = PromptKind(variant=PromptVariant.CHAT_ANSWER)
    return RenderedPrompt(kind, pair, text, filled)


def render_chat_to_cm(pair: LanguagePair, answer: str) -> RenderedPrompt:
    if not answer.strip():
        raise ValueError("empty answer")
    text, filled = _fill(_load_template("chat_to_cm.txt"),
                         matrix_informal=pair.matrix_informal, sentence=answer)
    kind = PromptKind(variant=PromptVariant.CHAT_TO_CM)
    return RenderedPrompt(kind, pair, text, filled)
