"""Experiment orchestration and result tabulation."""

from codemix.runner.experiment import (
    ExperimentConfig,
    GenerationRecord,
    Method,
    RunError,
    run_experiment,
    run_kshot,
    run_metadata,
    run_rule_chain,
    run_translit_bridge,
    write_run,
)
from codemix.runner.tables import (
    PAIR_COLUMN_ORDER,
    ResultTable,
    TableEntry,
    emit_table,
)

__all__ = [
    "ExperimentConfig",
    "GenerationRecord",
    "Method",
    "PAIR_COLUMN_ORDER",
    "ResultTable",
    "RunError",
    "TableEntry",
    "emit_table",
    "run_experiment",
    "run_kshot",
    "run_metadata",
    "run_rule_chain",
    "run_translit_bridge",
    "write_run",
]
