"""Experiment orchestration: k-shot, rule-chain, and transliteration runs.

Each run maps a test set through prompt rendering and a completion backend,
cleans the outputs, scores them against gold, and optionally persists a
deterministic records file plus report and result tables. With the mock
backend every artifact is byte-identical across runs and worker counts.
"""

from __future__ import annotations

import json
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from codemix.corpus import (
    DEFAULT_CLEAN_LABELS,
    Dataset,
    Direction,
    LanguagePair,
    ParallelExample,
    Script,
    clean_output,
    load_parallel,
    split_examples,
)
from codemix.llm import (
    BackendError,
    CompletionParams,
    RateLimiter,
    Recorder,
    complete,
    prompt_hash,
    resolve_backend,
)
from codemix.metrics import TOKENIZE_POLICY_ID, evaluate_corpus, meteor, rouge_l, tokenize
from codemix.prompts import (
    ALLOWED_K,
    PromptVariant,
    RuleId,
    RuleTranscript,
    TranscriptError,
    parse_rule_transcript,
    render_extraction,
    render_kshot,
    render_rule,
    render_translate_to_english,
    render_translit_to_matrix,
)


class RunError(RuntimeError):
    """The run as a whole could not produce a scoreable result."""


class Method(str, Enum):
    KSHOT_ALPHA = "kshot-alpha"
    KSHOT_BETA = "kshot-beta"
    RULE = "rule"
    TRANSLIT_BRIDGE = "translit-bridge"


_KSHOT_METHODS = (Method.KSHOT_ALPHA, Method.KSHOT_BETA)

_METHOD_TO_VARIANT = {
    Method.KSHOT_ALPHA: PromptVariant.KSHOT_ALPHA,
    Method.KSHOT_BETA: PromptVariant.KSHOT_BETA,
}


@dataclass(frozen=True)
class ExperimentConfig:
    pair: LanguagePair
    direction: Direction
    method: Method
    k: int = 0
    rule_id: Optional[RuleId] = None
    backend_id: str = "mock"
    params: CompletionParams = CompletionParams()
    seed: int = 13
    dataset_path: Optional[Path] = None
    pool_path: Optional[Path] = None
    test_path: Optional[Path] = None
    pool_size: int = 20
    test_size: int = 100
    output_dir: Optional[Path] = None
    workers: int = 4
    drop_degenerate: bool = False

    def __post_init__(self):
        for name in ("dataset_path", "pool_path", "test_path", "output_dir"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, Path):
                object.__setattr__(self, name, Path(value))
        if (self.rule_id is not None) != (self.method is Method.RULE):
            raise ValueError("rule_id must be set exactly when method is rule")
        if self.method in _KSHOT_METHODS:
            if self.k not in ALLOWED_K:
                raise ValueError(f"k must be one of {ALLOWED_K}, got {self.k}")
        elif self.k != 0:
            raise ValueError(f"k must be 0 for method {self.method.value}")
        if self.method is Method.RULE and self.direction is not Direction.EN2CM:
            raise ValueError("rule chains generate code-mixed text; use en2cm")
        if self.method is Method.TRANSLIT_BRIDGE:
            if self.direction is not Direction.CM2EN:
                raise ValueError("the transliteration bridge translates toward "
                                 "English; use cm2en")
            if self.pair.matrix_script is Script.LATIN:
                raise ValueError(
                    f"{self.pair.id} is already Latin-script; no bridge to apply")
        if self.dataset_path is not None and self.test_path is not None:
            raise ValueError("give either dataset_path (split mode) or "
                             "pool_path/test_path, not both")
        if self.dataset_path is None and self.test_path is None:
            raise ValueError("a dataset_path or test_path is required")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def experiment_id(self) -> str:
        if self.method in _KSHOT_METHODS:
            return f"{self.method.value}-{self.k}-{self.direction.value}"
        if self.method is Method.RULE:
            return f"{self.rule_id.value}-{self.direction.value}"
        return f"{self.method.value}-{self.direction.value}"

    @property
    def model_label(self) -> str:
        return f"{self.backend_id}:{self.params.model_name}"

    def to_dict(self) -> dict:
        """Run-identity metadata. Execution knobs that cannot change results
        (worker count, output location) are deliberately excluded."""
        return {
            "pair": self.pair.id,
            "direction": self.direction.value,
            "method": self.method.value,
            "k": self.k,
            "rule": self.rule_id.value if self.rule_id else None,
            "backend": self.backend_id,
            "params": self.params.to_dict(),
            "seed": self.seed,
            "dataset": str(self.dataset_path) if self.dataset_path else None,
            "pool": str(self.pool_path) if self.pool_path else None,
            "test": str(self.test_path) if self.test_path else None,
            "pool_size": self.pool_size if self.dataset_path else None,
            "test_size": self.test_size if self.dataset_path else None,
        }


@dataclass
class GenerationRecord:
    example_id: str
    input_text: str
    reference: str
    prompt_hashes: tuple = ()
    raw_outputs: tuple = ()
    steps: Optional[RuleTranscript] = None
    cleaned_output: str = ""
    degenerate_flags: tuple = ()
    failed: bool = False
    parse_failed: bool = False
    failure: Optional[str] = None
    metrics: Optional[dict] = None

    def to_dict(self) -> dict:
        steps = None
        if self.steps is not None:
            steps = {
                "rule": self.steps.rule_id.value,
                "steps": [{"number": s.number, "label": s.label, "body": s.body}
                          for s in self.steps.steps],
                "final_sentence": self.steps.final_sentence,
            }
        return {
            "example_id": self.example_id,
            "input": self.input_text,
            "reference": self.reference,
            "prompt_hashes": list(self.prompt_hashes),
            "raw_outputs": list(self.raw_outputs),
            "steps": steps,
            "cleaned": self.cleaned_output,
            "degenerate_flags": list(self.degenerate_flags),
            "failed": self.failed,
            "parse_failed": self.parse_failed,
            "failure": self.failure,
            "metrics": self.metrics,
        }


def _load_sets(config: ExperimentConfig) -> tuple[Optional[Dataset], Dataset]:
    if config.test_path is not None:
        test = load_parallel(config.test_path, config.pair)
        pool = (load_parallel(config.pool_path, config.pair)
                if config.pool_path is not None else None)
        return pool, test
    full = load_parallel(config.dataset_path, config.pair)
    pool, test = split_examples(full, config.pool_size, config.test_size,
                                config.seed)
    return pool, test


def _sides(example: ParallelExample, direction: Direction) -> tuple[str, str]:
    if direction is Direction.EN2CM:
        return example.english, example.code_mixed
    return example.code_mixed, example.english


def _finish(record: GenerationRecord, final_text: str,
            drop_degenerate: bool) -> GenerationRecord:
    if drop_degenerate and record.degenerate_flags:
        final_text = ""
    record.cleaned_output = clean_output(final_text)
    return record


def _map_examples(config: ExperimentConfig, examples: Sequence[ParallelExample],
                  build) -> list:
    if not examples:
        raise RunError("test set is empty")
    if config.workers == 1:
        records = [build(ex) for ex in examples]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(build, examples))
    records.sort(key=lambda r: r.example_id)
    if all(r.failed for r in records):
        raise RunError(f"all {len(records)} sentences failed")
    return records


def _score(config: ExperimentConfig, records: Sequence[GenerationRecord]):
    pairs = [(r.cleaned_output, r.reference) for r in records]
    report = evaluate_corpus(pairs, config.direction, on_empty="partial")
    stemming = report.options["stemming"]
    for record in records:
        if record.cleaned_output.strip():
            hyp = tokenize(record.cleaned_output)
            ref = tokenize(record.reference)
            _, _, f1 = rouge_l(hyp, ref)
            record.metrics = {
                "rouge_l_f1": 100.0 * f1,
                "meteor": 100.0 * meteor(hyp, ref, stemming=stemming),
            }
        else:
            record.metrics = {"rouge_l_f1": 0.0, "meteor": 0.0}
    return report


def _run(config: ExperimentConfig, build_record, backend, recorder, limiter):
    backend = backend if backend is not None else resolve_backend(config.backend_id)
    pool, test = _load_sets(config)
    shots = []
    if config.k > 0:
        available = len(pool.examples) if pool is not None else 0
        if available < config.k:
            raise RunError(f"need {config.k} shot examples, pool has {available}")
        shots = pool.examples[:config.k]
    records = _map_examples(
        config, test.examples,
        lambda ex: build_record(ex, shots, backend, recorder, limiter))
    report = _score(config, records)
    if config.output_dir is not None:
        write_run(config, records, report)
    return records, report


def run_kshot(config: ExperimentConfig, backend=None, recorder: Optional[Recorder] = None,
              limiter: Optional[RateLimiter] = None):
    """Run the k-shot experiment described by the config.

    Per test sentence: render the α or β prompt, complete, clean, record.
    Backend failures after retries mark the record failed and the run
    continues; a run where every sentence failed raises RunError.
    """
    if config.method not in _KSHOT_METHODS:
        raise ValueError(f"run_kshot cannot run method {config.method.value}")
    variant = _METHOD_TO_VARIANT[config.method]

    def build(ex, shots, backend, recorder, limiter):
        source, reference = _sides(ex, config.direction)
        record = GenerationRecord(ex.id, source, reference)
        prompt = render_kshot(config.pair, config.direction, variant, config.k,
                              shots, source)
        record.prompt_hashes = (prompt_hash(prompt.text),)
        try:
            result = complete(backend, prompt, config.params,
                              recorder=recorder, limiter=limiter)
        except BackendError as exc:
            record.failed = True
            record.failure = str(exc)
            return record
        record.raw_outputs = (result.text,)
        record.degenerate_flags = tuple(sorted(f.value for f in
                                               result.degenerate_flags))
        return _finish(record, result.text, config.drop_degenerate)

    return _run(config, build, backend, recorder, limiter)


def run_rule_chain(config: ExperimentConfig, backend=None,
                   recorder: Optional[Recorder] = None,
                   limiter: Optional[RateLimiter] = None):
    """Run a two-step rule chain: worked transcript, then sentence extraction.

    The extraction prompt goes through the backend; when the transcript is
    already degenerate the extraction call is skipped, and when extraction
    returns something empty or degenerate the local transcript parser supplies
    the final sentence instead. Unparseable transcripts with no usable
    extraction are flagged parse-failed and scored as empty.
    """
    if config.method is not Method.RULE:
        raise ValueError(f"run_rule_chain cannot run method {config.method.value}")

    def build(ex, shots, backend, recorder, limiter):
        source, reference = _sides(ex, config.direction)
        record = GenerationRecord(ex.id, source, reference)
        rule_prompt = render_rule(config.rule_id, config.pair, source)
        record.prompt_hashes = (prompt_hash(rule_prompt.text),)
        try:
            rule_result = complete(backend, rule_prompt, config.params,
                                   recorder=recorder, limiter=limiter)
        except BackendError as exc:
            record.failed = True
            record.failure = str(exc)
            return record
        transcript_text = rule_result.text
        record.raw_outputs = (transcript_text,)
        flags = set(rule_result.degenerate_flags)

        try:
            record.steps = parse_rule_transcript(transcript_text, config.rule_id)
        except TranscriptError:
            record.steps = None

        final = None
        if not rule_result.degenerate_flags:
            extraction = render_extraction(config.pair, transcript_text)
            record.prompt_hashes += (prompt_hash(extraction.text),)
            try:
                ext_result = complete(backend, extraction, config.params,
                                      recorder=recorder, limiter=limiter)
            except BackendError as exc:
                record.failed = True
                record.failure = str(exc)
                return record
            record.raw_outputs += (ext_result.text,)
            flags |= set(ext_result.degenerate_flags)
            if not ext_result.degenerate_flags:
                final = ext_result.text
        if final is None:
            # degenerate transcript or degenerate extraction: local fallback
            if record.steps is not None:
                final = record.steps.final_sentence
            else:
                record.parse_failed = True
                final = ""
        record.degenerate_flags = tuple(sorted(f.value for f in flags))
        return _finish(record, final, config.drop_degenerate)

    return _run(config, build, backend, recorder, limiter)


def run_translit_bridge(config: ExperimentConfig, backend=None,
                        recorder: Optional[Recorder] = None,
                        limiter: Optional[RateLimiter] = None):
    """Transliterate Roman code-mixed input to the matrix script, then 0-shot
    translate the result to English; scored against the English gold."""
    if config.method is not Method.TRANSLIT_BRIDGE:
        raise ValueError(
            f"run_translit_bridge cannot run method {config.method.value}")

    def build(ex, shots, backend, recorder, limiter):
        source, reference = _sides(ex, config.direction)
        record = GenerationRecord(ex.id, source, reference)
        translit = render_translit_to_matrix(config.pair, source)
        record.prompt_hashes = (prompt_hash(translit.text),)
        try:
            translit_result = complete(backend, translit, config.params,
                                       recorder=recorder, limiter=limiter)
        except BackendError as exc:
            record.failed = True
            record.failure = str(exc)
            return record
        record.raw_outputs = (translit_result.text,)
        if translit_result.degenerate_flags:
            record.degenerate_flags = tuple(sorted(
                f.value for f in translit_result.degenerate_flags))
            record.failed = True
            record.failure = "transliteration output degenerate"
            return record
        native = clean_output(translit_result.text)
        translate = render_translate_to_english(config.pair, native)
        record.prompt_hashes += (prompt_hash(translate.text),)
        try:
            translate_result = complete(backend, translate, config.params,
                                        recorder=recorder, limiter=limiter)
        except BackendError as exc:
            record.failed = True
            record.failure = str(exc)
            return record
        record.raw_outputs += (translate_result.text,)
        record.degenerate_flags = tuple(sorted(
            f.value for f in translate_result.degenerate_flags))
        return _finish(record, translate_result.text, config.drop_degenerate)

    return _run(config, build, backend, recorder, limiter)


def run_experiment(config: ExperimentConfig, backend=None,
                   recorder: Optional[Recorder] = None,
                   limiter: Optional[RateLimiter] = None):
    """Dispatch to the right runner for the config's method."""
    if config.method in _KSHOT_METHODS:
        return run_kshot(config, backend, recorder, limiter)
    if config.method is Method.RULE:
        return run_rule_chain(config, backend, recorder, limiter)
    return run_translit_bridge(config, backend, recorder, limiter)


def _git_hash() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"],
                             capture_output=True, text=True, timeout=5,
                             cwd=Path(__file__).resolve().parent)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def run_metadata(config: ExperimentConfig, records) -> dict:
    return {
        "format": 1,
        "run": config.to_dict(),
        "experiment_id": config.experiment_id,
        "model_label": config.model_label,
        "policies": {
            "tokenize": TOKENIZE_POLICY_ID,
            "clean_labels": list(DEFAULT_CLEAN_LABELS),
        },
        "git_hash": _git_hash(),
        "n_records": len(records),
        "n_failed": sum(1 for r in records if r.failed),
        "n_parse_failed": sum(1 for r in records if r.parse_failed),
    }


def write_run(config: ExperimentConfig, records, report,
              output_dir: Optional[Path] = None) -> Path:
    """Persist records.jsonl (metadata header + one line per example, sorted
    by example id), report.json, and single-row tables."""
    from codemix.runner.tables import TableEntry, emit_table

    out = Path(output_dir if output_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    lines = [json.dumps(run_metadata(config, records), ensure_ascii=False,
                        sort_keys=True)]
    lines += [json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True)
              for r in records]
    (out / "records.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    (out / "report.json").write_text(
        json.dumps(report.as_dict(), ensure_ascii=False, sort_keys=True,
                   indent=2) + "\n", encoding="utf-8")

    table = emit_table([TableEntry(config.model_label, config.experiment_id,
                                   config.pair.id, report)])
    (out / "table.tsv").write_text(table.to_tsv(), encoding="utf-8")
    (out / "table.md").write_text(table.to_markdown(), encoding="utf-8")
    return out
