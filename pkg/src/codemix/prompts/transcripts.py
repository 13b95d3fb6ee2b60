"""Parsing of numbered step-by-step transcripts produced by rule prompts.

A well-formed transcript is a sequence of "N. Label: body" steps; the body
may continue over several lines until the next step marker. The parsed final
sentence doubles as the local fallback when LLM-based extraction fails.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from codemix.prompts.render import RuleId


class TranscriptError(ValueError):
    """Transcript does not follow the numbered step format."""


@dataclass(frozen=True)
class RuleStep:
    number: int
    label: str
    body: str


@dataclass(frozen=True)
class RuleTranscript:
    rule_id: RuleId
    steps: tuple[RuleStep, ...]
    final_sentence: str


_STEP_MARKER = re.compile(r"^[ \t]*(\d+)\.\s+", re.MULTILINE)


def parse_rule_transcript(text: str, rule_id: RuleId) -> RuleTranscript:
    """Split a transcript on leading "N." markers.

    Step numbers must start at 1 and strictly increase. The label is the text
    before the first colon of a step (empty if the step has no colon); the
    body is everything after it, whitespace-trimmed. The final sentence is
    the body of the last step. Input is NFC-normalized first so visually
    identical non-Latin text compares equal.
    """
    text = unicodedata.normalize("NFC", text)
    markers = list(_STEP_MARKER.finditer(text))
    if not markers:
        raise TranscriptError("no numbered steps found")

    steps = []
    prev_number = 0
    for i, marker in enumerate(markers):
        number = int(marker.group(1))
        if i == 0 and number != 1:
            raise TranscriptError(f"first step is numbered {number}, expected 1")
        if number <= prev_number:
            raise TranscriptError(
                f"step numbers must strictly increase: {number} after {prev_number}")
        prev_number = number
        end = markers[i + 1].start() if i + 1 < len(markers) else len(text)
        segment = text[marker.end():end].strip()
        if ":" in segment:
            label, _, body = segment.partition(":")
            steps.append(RuleStep(number, label.strip(), body.strip()))
        else:
            steps.append(RuleStep(number, "", segment))

    final = steps[-1].body
    if not final:
        raise TranscriptError("last step has no sentence payload")
    return RuleTranscript(rule_id, tuple(steps), final)
