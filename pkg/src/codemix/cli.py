"""Command-line interface.

Subcommands: run (k-shot and bridge experiments), rules (rule chains),
score (offline metric evaluation), table (aggregate run directories),
chatbot index / chatbot serve.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from codemix.corpus import LANGUAGE_PAIRS, DatasetError, Direction, get_pair
from codemix.llm import BackendError, CompletionParams, resolve_backend
from codemix.metrics import MetricReport, evaluate_corpus
from codemix.prompts import RuleId
from codemix.runner import (
    ExperimentConfig,
    Method,
    RunError,
    TableEntry,
    emit_table,
    run_experiment,
)


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", default="mock",
                        help="backend id: 'mock', 'mock:<fixtures.jsonl>', or "
                             "a remote id configured via CODEMIX_* env vars")
    parser.add_argument("--model", default="default",
                        help="model name sent to the backend")
    parser.add_argument("--temperature", type=float, default=0.0)
    parser.add_argument("--max-retries", type=int, default=3)


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", type=Path,
                        help="single parallel file, split by --seed")
    parser.add_argument("--pool", type=Path, help="explicit shot-pool file")
    parser.add_argument("--test", type=Path, help="explicit test-set file")
    parser.add_argument("--pool-size", type=int, default=20)
    parser.add_argument("--test-size", type=int, default=100)
    parser.add_argument("--seed", type=int, default=13)


def _add_run_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pair", required=True, choices=sorted(LANGUAGE_PAIRS))
    _add_dataset_args(parser)
    _add_backend_args(parser)
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--drop-degenerate", action="store_true",
                        help="score flagged-degenerate outputs as empty")


def _params(args) -> CompletionParams:
    return CompletionParams(model_name=args.model,
                            temperature=args.temperature,
                            max_retries=args.max_retries)


def _config_from_args(args, method: Method, direction: Direction,
                      k: int = 0, rule_id=None) -> ExperimentConfig:
    return ExperimentConfig(
        pair=get_pair(args.pair), direction=direction, method=method, k=k,
        rule_id=rule_id, backend_id=args.backend, params=_params(args),
        seed=args.seed, dataset_path=args.dataset, pool_path=args.pool,
        test_path=args.test, pool_size=args.pool_size,
        test_size=args.test_size, output_dir=args.out, workers=args.workers,
        drop_degenerate=args.drop_degenerate)


def _print_report(report: MetricReport) -> None:
    print(f"bleu={report.bleu:.2f} rouge_l_f1={report.rouge_l_f1:.2f} "
          f"meteor={report.meteor:.2f} n={report.n_pairs}")


def cmd_run(args) -> int:
    method = Method(args.method)
    direction = Direction(args.direction)
    config = _config_from_args(args, method, direction, k=args.k)
    backend = resolve_backend(config.backend_id)
    records, report = run_experiment(config, backend=backend)
    failed = sum(1 for r in records if r.failed)
    _print_report(report)
    if failed:
        print(f"{failed} of {len(records)} sentences failed", file=sys.stderr)
    if config.output_dir:
        print(f"wrote {config.output_dir}")
    return 0


def cmd_rules(args) -> int:
    rule_id = RuleId(f"rule{args.rule}")
    config = _config_from_args(args, Method.RULE, Direction.EN2CM,
                               rule_id=rule_id)
    backend = resolve_backend(config.backend_id)
    records, report = run_experiment(config, backend=backend)
    parse_failed = sum(1 for r in records if r.parse_failed)
    _print_report(report)
    if parse_failed:
        print(f"{parse_failed} of {len(records)} transcripts unextractable",
              file=sys.stderr)
    if config.output_dir:
        print(f"wrote {config.output_dir}")
    return 0


def cmd_score(args) -> int:
    pairs = []
    with open(args.pairs_file, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DatasetError(
                    f"{args.pairs_file}:{lineno}: expected hypothesis<TAB>"
                    f"reference, got {len(fields)} fields")
            pairs.append((fields[0], fields[1]))
    report = evaluate_corpus(pairs, Direction(args.direction),
                             on_empty=args.on_empty)
    print("bleu\trouge_l_f1\tmeteor\tn_pairs")
    print(f"{report.bleu:.2f}\t{report.rouge_l_f1:.2f}\t"
          f"{report.meteor:.2f}\t{report.n_pairs}")
    print(json.dumps(report.as_dict(), ensure_ascii=False, sort_keys=True))
    return 0


def cmd_table(args) -> int:
    entries = []
    for run_dir in args.run_dirs:
        records_path = run_dir / "records.jsonl"
        report_path = run_dir / "report.json"
        if not records_path.exists() or not report_path.exists():
            raise RunError(f"{run_dir} is not a run directory "
                           "(missing records.jsonl or report.json)")
        meta = json.loads(records_path.read_text(encoding="utf-8")
                          .splitlines()[0])
        report = MetricReport(**json.loads(report_path.read_text(
            encoding="utf-8")))
        entries.append(TableEntry(model=meta["model_label"],
                                  experiment=meta["experiment_id"],
                                  pair_id=meta["run"]["pair"],
                                  report=report))
    table = emit_table(entries)
    print(table.to_tsv(), end="")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "table.tsv").write_text(table.to_tsv(), encoding="utf-8")
        (args.out / "table.md").write_text(table.to_markdown(),
                                           encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_chatbot_index(args) -> int:
    from codemix.chatbot import build_index

    document = args.doc.read_text(encoding="utf-8")
    index = build_index(document, leaf_size=args.leaf_size,
                        parent_size=args.parent_size)
    index.save(args.out)
    print(f"indexed {len(index.parents)} parents / {len(index.leaves)} leaves "
          f"-> {args.out}")
    return 0


def cmd_chatbot_serve(args) -> int:
    from codemix.chatbot import Index, build_index, create_app, serve

    if args.index:
        index = Index.load(args.index)
    elif args.doc:
        index = build_index(args.doc.read_text(encoding="utf-8"))
    else:
        raise RunError("chatbot serve needs --index or --doc")
    backend = resolve_backend(args.backend)
    app = create_app(index=index, backend=backend,
                     params=CompletionParams(model_name=args.model),
                     memory_turns=args.memory_turns)
    if args.check:
        print(f"ready: {len(index.leaves)} leaves, backend {args.backend}")
        return 0
    serve(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codemix",
        description="Code-mixed generation experiments, metrics, and chatbot.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a k-shot or bridge experiment")
    p_run.add_argument("--direction", required=True,
                       choices=[d.value for d in Direction])
    p_run.add_argument("--method", required=True,
                       choices=["kshot-alpha", "kshot-beta", "translit-bridge"])
    p_run.add_argument("--k", type=int, default=0, choices=[0, 1, 10, 20])
    _add_run_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_rules = sub.add_parser("rules", help="run a rule-based prompt chain")
    p_rules.add_argument("--rule", type=int, required=True,
                         choices=[1, 2, 3, 4])
    _add_run_common(p_rules)
    p_rules.set_defaults(func=cmd_rules)

    p_score = sub.add_parser("score",
                             help="score a hypothesis/reference TSV")
    p_score.add_argument("pairs_file", type=Path,
                         help="TSV of hypothesis<TAB>reference lines")
    p_score.add_argument("--direction", default=Direction.EN2CM.value,
                         choices=[d.value for d in Direction])
    p_score.add_argument("--on-empty", default="partial",
                         choices=["error", "partial"])
    p_score.set_defaults(func=cmd_score)

    p_table = sub.add_parser("table", help="aggregate run directories")
    p_table.add_argument("run_dirs", type=Path, nargs="+")
    p_table.add_argument("--out", type=Path)
    p_table.set_defaults(func=cmd_table)

    p_bot = sub.add_parser("chatbot", help="chatbot index and serving")
    bot_sub = p_bot.add_subparsers(dest="chatbot_command", required=True)

    p_index = bot_sub.add_parser("index", help="build a document index")
    p_index.add_argument("--doc", type=Path, required=True)
    p_index.add_argument("--out", type=Path, required=True)
    p_index.add_argument("--leaf-size", type=int, default=512)
    p_index.add_argument("--parent-size", type=int, default=2048)
    p_index.set_defaults(func=cmd_chatbot_index)

    p_serve = bot_sub.add_parser("serve", help="serve the chatbot over HTTP")
    p_serve.add_argument("--index", type=Path)
    p_serve.add_argument("--doc", type=Path)
    p_serve.add_argument("--backend", default="mock")
    p_serve.add_argument("--model", default="default")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--memory-turns", type=int, default=6)
    p_serve.add_argument("--check", action="store_true",
                         help="build everything, print a status line, exit")
    p_serve.set_defaults(func=cmd_chatbot_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, RunError, BackendError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
