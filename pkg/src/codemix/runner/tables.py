"""Result tables: one row per (model, experiment), metric columns per pair."""

from __future__ import annotations

from dataclasses import dataclass

from codemix.metrics import MetricReport

PAIR_COLUMN_ORDER = ("en-hi", "en-bn", "en-gu", "en-fr", "en-es")
_PAIR_SHORT = {"en-hi": "HI", "en-bn": "BN", "en-gu": "GU",
               "en-fr": "FR", "en-es": "ES"}
_METRIC_SHORT = ("B", "R", "M")
MISSING_CELL = "-"


@dataclass(frozen=True)
class TableEntry:
    model: str
    experiment: str
    pair_id: str
    report: MetricReport

    def __post_init__(self):
        if self.pair_id not in _PAIR_SHORT:
            raise ValueError(f"unknown language pair {self.pair_id!r}")


@dataclass(frozen=True)
class ResultTable:
    rows: tuple
    pair_ids: tuple
    cells: dict

    def _header(self) -> list:
        head = ["model", "experiment"]
        for pid in self.pair_ids:
            head += [f"{_PAIR_SHORT[pid]} {m}" for m in _METRIC_SHORT]
        return head

    def _body(self) -> list:
        body = []
        for model, experiment in self.rows:
            row = [model, experiment]
            for pid in self.pair_ids:
                cell = self.cells.get((model, experiment, pid))
                if cell is None:
                    row += [MISSING_CELL] * 3
                else:
                    row += [f"{v:.2f}" for v in cell]
            body.append(row)
        return body

    def to_tsv(self) -> str:
        lines = ["\t".join(self._header())]
        lines += ["\t".join(row) for row in self._body()]
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        header = self._header()
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in self._body()]
        return "\n".join(lines) + "\n"


def emit_table(entries) -> ResultTable:
    """Collect per-pair reports into a table.

    Rows are (model, experiment) in stable sorted order; pair columns follow
    the fixed HI, BN, GU, FR, ES order, restricted to pairs present. Scores
    render to 2 decimals on the 0-100 scale.
    """
    entries = list(entries)
    if not entries:
        raise ValueError("no reports to tabulate")
    cells = {}
    for entry in entries:
        key = (entry.model, entry.experiment, entry.pair_id)
        if key in cells:
            raise ValueError(f"duplicate report for {key}")
        cells[key] = (entry.report.bleu, entry.report.rouge_l_f1,
                      entry.report.meteor)
    rows = tuple(sorted({(e.model, e.experiment) for e in entries}))
    present = {e.pair_id for e in entries}
    pair_ids = tuple(p for p in PAIR_COLUMN_ORDER if p in present)
    return ResultTable(rows=rows, pair_ids=pair_ids, cells=cells)
