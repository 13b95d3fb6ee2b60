"""Prompt rendering and transcript parsing."""

from codemix.prompts.render import (
    ALLOWED_K,
    PromptKind,
    PromptVariant,
    RenderedPrompt,
    RuleId,
    render_chat_answer,
    render_chat_to_cm,
    render_extraction,
    render_kshot,
    render_rule,
    render_translate_en2cm,
    render_translate_to_english,
    render_translit_to_matrix,
)
from codemix.prompts.transcripts import (
    RuleStep,
    RuleTranscript,
    TranscriptError,
    parse_rule_transcript,
)

__all__ = [
    "ALLOWED_K",
    "PromptKind",
    "PromptVariant",
    "RenderedPrompt",
    "RuleId",
    "RuleStep",
    "RuleTranscript",
    "TranscriptError",
    "parse_rule_transcript",
    "render_chat_answer",
    "render_chat_to_cm",
    "render_extraction",
    "render_kshot",
    "render_rule",
    "render_translate_en2cm",
    "render_translate_to_english",
    "render_translit_to_matrix",
]
