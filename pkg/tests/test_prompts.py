import unicodedata
from pathlib import Path

import pytest

from codemix.corpus import EN_BN, EN_ES, EN_FR, EN_HI, LANGUAGE_PAIRS, Direction, ParallelExample
from codemix.prompts import (
    PromptKind,
    PromptVariant,
    RuleId,
    TranscriptError,
    parse_rule_transcript,
    render_chat_answer,
    render_chat_to_cm,
    render_extraction,
    render_kshot,
    render_rule,
    render_translate_en2cm,
    render_translate_to_english,
    render_translit_to_matrix,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDENS = Path(__file__).parent / "goldens"

SENTENCE = "Is it such a curious question?"
TRICK_EN = "The trick is to start to build right from the back of your throat"
TRICK_CM = "Trick ta holo to start to build ekdom tomar throat er pechon theke"
TRICK_SHOT = ParallelExample("shot0", EN_BN, TRICK_EN, TRICK_CM)


def make_shots(n, pair=EN_BN):
    return [ParallelExample(f"s{i}", pair, f"English sentence {i}.", f"Mixed bakyo {i}.")
            for i in range(n)]


# ---------------------------------------------------------------- kinds

def test_kind_requires_rule_id_only_for_rules():
    with pytest.raises(ValueError, match="rule_id"):
        PromptKind(variant=PromptVariant.RULE)
    with pytest.raises(ValueError, match="rule_id"):
        PromptKind(variant=PromptVariant.KSHOT_ALPHA, rule_id=RuleId.R1)
    PromptKind(variant=PromptVariant.RULE, rule_id=RuleId.R2)


def test_kind_restricts_k_values():
    for k in (0, 1, 10, 20):
        PromptKind(variant=PromptVariant.KSHOT_BETA, k=k)
    for k in (2, 5, 15, -1):
        with pytest.raises(ValueError, match="k must be one of"):
            PromptKind(variant=PromptVariant.KSHOT_BETA, k=k)
    with pytest.raises(ValueError, match="k must be 0"):
        PromptKind(variant=PromptVariant.EXTRACTION, k=1)


# ---------------------------------------------------------------- goldens

def test_zero_shot_en_bn_matches_golden():
    out = render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_BETA, 0, [], SENTENCE)
    assert out.text == (GOLDENS / "kshot0_en_bn.txt").read_text(encoding="utf-8")


def test_one_shot_beta_en_bn_matches_golden():
    out = render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_BETA, 1,
                       [TRICK_SHOT], SENTENCE)
    assert out.text == (GOLDENS / "kshot1_beta_en_bn.txt").read_text(encoding="utf-8")


def test_one_shot_alpha_en_bn_matches_golden():
    out = render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_ALPHA, 1,
                       [TRICK_SHOT], SENTENCE)
    assert out.text == (GOLDENS / "kshot1_alpha_en_bn.txt").read_text(encoding="utf-8")


# ---------------------------------------------------------------- k-shot

def test_zero_shot_names_the_informal_language():
    out = render_kshot(EN_HI, Direction.EN2CM, PromptVariant.KSHOT_ALPHA, 0, [], SENTENCE)
    assert "Hindi-english" in out.text
    out = render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_ALPHA, 0, [], SENTENCE)
    assert "Bangla-english" in out.text
    assert "Bengali-english" not in out.text


def test_alpha_embeds_only_code_mixed_sides():
    shots = make_shots(10)
    out = render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_ALPHA, 10, shots,
                       SENTENCE)
    for s in shots:
        assert s.code_mixed in out.text
        assert s.english not in out.text
    assert out.text.count(SENTENCE) == 1


def test_beta_embeds_both_sides_in_shot_order():
    shots = make_shots(10)
    out = render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_BETA, 10, shots,
                       SENTENCE)
    assert out.text.count("English: ") == 10
    assert out.text.count("Code-Mixed: ") == 10
    positions = [out.text.index(s.code_mixed) for s in shots]
    assert positions == sorted(positions)
    assert out.text.count(SENTENCE) == 1


def test_twenty_shot_renders_twenty_examples():
    shots = make_shots(20)
    out = render_kshot(EN_HI, Direction.EN2CM, PromptVariant.KSHOT_BETA, 20, shots,
                       SENTENCE)
    assert out.text.count("English: ") == 20
    assert out.kind.k == 20


def test_kshot_rejects_shot_count_mismatch():
    with pytest.raises(ValueError, match="expected 10 shots, got 3"):
        render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_ALPHA, 10,
                     make_shots(3), SENTENCE)


def test_kshot_rejects_empty_sentence():
    with pytest.raises(ValueError, match="empty input"):
        render_kshot(EN_BN, Direction.EN2CM, PromptVariant.KSHOT_ALPHA, 0, [], "  ")


def test_kshot_rendering_is_deterministic():
    args = (EN_BN, Direction.EN2CM, PromptVariant.KSHOT_BETA, 10, make_shots(10), SENTENCE)
    assert render_kshot(*args).text == render_kshot(*args).text


def test_cm2en_prompts_ask_for_english():
    out = render_kshot(EN_HI, Direction.CM2EN, PromptVariant.KSHOT_BETA, 0, [],
                       "Unhone ise market mein vapas daal diya.")
    assert "English translation" in out.text
    assert "roman script" not in out.text
    out = render_kshot(EN_HI, Direction.CM2EN, PromptVariant.KSHOT_BETA, 1,
                       make_shots(1, EN_HI), "Unhone ise market mein vapas daal diya.")
    assert "English translation" in out.text


# ---------------------------------------------------------------- rules

def test_rule1_translates_then_tags_the_translation():
    out = render_rule(RuleId.R1, EN_HI, SENTENCE)
    lines = out.text.split("\n")
    step1 = next(ln for ln in lines if ln.startswith("1. "))
    step2 = next(ln for ln in lines if ln.startswith("2. "))
    assert step1.startswith("1. Hindi Translation:")
    assert "PoS tag" in step2 and "translation" in step2


def test_rule2_lists_the_tag_filter():
    out = render_rule(RuleId.R2, EN_BN, SENTENCE)
    assert "Noun (NN), Adjective (JJ), Adverb (RB)" in out.text
    assert "CC" in out.text and "Interjection (UH)" in out.text
    assert "PoS tag every word of the English sentence" in out.text


def test_rule4_selects_second_largest_phrase():
    out = render_rule(RuleId.R4, EN_HI, SENTENCE)
    assert "the phrase with the second-largest length" in out.text


def test_rules_contain_sentence_exactly_once_for_all_pairs():
    for pair in LANGUAGE_PAIRS.values():
        for rule in RuleId:
            out = render_rule(rule, pair, SENTENCE)
            assert out.text.count(SENTENCE) == 1, (pair.id, rule)


def test_rules_end_with_transliteration_for_non_latin_pairs():
    for rule in RuleId:
        text = render_rule(rule, EN_BN, SENTENCE).text
        last_step = [ln for ln in text.split("\n") if ln[:1].isdigit()][-1]
        assert "Transliterat" in last_step


def test_latin_pairs_skip_the_transliteration_step():
    for pair in (EN_FR, EN_ES):
        for rule in RuleId:
            text = render_rule(rule, pair, SENTENCE).text
            assert "Transliterat" not in text
            steps = [ln for ln in text.split("\n") if ln[:1].isdigit()]
            bn_steps = [ln for ln in render_rule(rule, EN_BN, SENTENCE).text.split("\n")
                        if ln[:1].isdigit()]
            assert len(steps) == len(bn_steps) - 1


# ---------------------------------------------------------------- extraction

def test_extraction_wraps_transcript_in_fence():
    transcript = (FIXTURES / "rule1_transcript.txt").read_text(encoding="utf-8")
    out = render_extraction(EN_BN, transcript)
    assert transcript in out.text
    assert "```" in out.text
    assert "Extract the <sentence> in the final output" in out.text


def test_extraction_escalates_fence_on_collision():
    payload = "step text\n```\nembedded block\n```"
    out = render_extraction(EN_BN, payload)
    assert "````\n" in out.text
    assert out.text.count("````") == 2


def test_extraction_rejects_empty_payload():
    with pytest.raises(ValueError, match="empty transcript"):
        render_extraction(EN_BN, "   ")


# ---------------------------------------------------------------- other kinds

def test_translit_prompt_names_the_script():
    out = render_translit_to_matrix(EN_BN, "finetuning er somporke bolo")
    assert "Bengali script" in out.text
    out = render_translit_to_matrix(EN_HI, "kya haal hai")
    assert "Devanagari script" in out.text


def test_translit_rejected_for_latin_pairs():
    with pytest.raises(ValueError, match="already Latin-script"):
        render_translit_to_matrix(EN_FR, "c'est la vie mon ami")


def test_translate_prompts_carry_their_kind():
    to_en = render_translate_to_english(EN_BN, "ফাইনটিউনিং সম্পর্কে বলো")
    assert to_en.kind.variant is PromptVariant.TRANSLATE_CM2EN
    to_cm = render_translate_en2cm(EN_BN, "Tell me about fine-tuning")
    assert to_cm.kind.variant is PromptVariant.TRANSLATE_EN2CM_0SHOT
    assert "Bangla-english" in to_cm.text


def test_chat_prompts():
    out = render_chat_answer(EN_HI, "What is chunk size?",
                             ["chunk one text", "chunk two text"])
    assert "chunk one text" in out.text and "chunk two text" in out.text
    assert "What is chunk size?" in out.text
    back = render_chat_to_cm(EN_HI, "The chunk size is 512.")
    assert "Hindi-english" in back.text
    with pytest.raises(ValueError, match="no context"):
        render_chat_answer(EN_HI, "question?", [])


# ---------------------------------------------------------------- parsing

EXPECTED_FINALS = {
    "rule1": "Eta ki such ekti curious question?",
    "rule2": "E ki such curious question?",
    "rule3": "Eta ki emon a curious question?",
    "rule4": "Eta ki such a koutuholprod proshno?",
}


@pytest.mark.parametrize("rule", list(RuleId))
def test_parse_fixture_transcripts_final_sentences(rule):
    text = (FIXTURES / f"{rule.value}_transcript.txt").read_text(encoding="utf-8")
    parsed = parse_rule_transcript(text, rule)
    want = unicodedata.normalize("NFC", EXPECTED_FINALS[rule.value])
    assert parsed.final_sentence == want
    assert parsed.final_sentence.encode("utf-8") == want.encode("utf-8")


def test_parse_rule1_steps_and_labels():
    text = (FIXTURES / "rule1_transcript.txt").read_text(encoding="utf-8")
    parsed = parse_rule_transcript(text, RuleId.R1)
    assert [s.number for s in parsed.steps] == [1, 2, 3, 4, 5]
    assert parsed.steps[0].label == "Bengali Translation"
    assert parsed.steps[4].label == "Transliteration"


def test_parse_rule2_multiline_bodies():
    text = (FIXTURES / "rule2_transcript.txt").read_text(encoding="utf-8")
    parsed = parse_rule_transcript(text, RuleId.R2)
    assert [s.number for s in parsed.steps] == [1, 2, 3, 4, 5, 6]
    assert parsed.steps[0].body.startswith("Is (VBZ) it (PRP)")
    assert parsed.steps[1].label.startswith("List of words which are either")


def test_parse_rejects_free_text():
    with pytest.raises(TranscriptError, match="no numbered steps"):
        parse_rule_transcript("free text with no numbering at all", RuleId.R1)


def test_parse_rejects_bad_numbering():
    with pytest.raises(TranscriptError, match="expected 1"):
        parse_rule_transcript("2. Label: body\n3. Label: body", RuleId.R1)
    with pytest.raises(TranscriptError, match="strictly increase"):
        parse_rule_transcript("1. A: x\n3. B: y\n2. C: z", RuleId.R1)


def test_parse_rejects_empty_final_payload():
    with pytest.raises(TranscriptError, match="no sentence payload"):
        parse_rule_transcript("1. Translation: ok\n2. Transliteration:", RuleId.R1)


def test_parse_step_without_colon_gets_empty_label():
    parsed = parse_rule_transcript("1. just some text\n2. Final: done here", RuleId.R1)
    assert parsed.steps[0].label == ""
    assert parsed.steps[0].body == "just some text"
