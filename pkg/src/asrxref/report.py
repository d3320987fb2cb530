"""Run reports: per-iteration rows, cumulative totals, rendering.

report.json is written with sorted keys and fixed indentation so that
deterministic (virtual-clock) runs produce byte-identical files, which is
what makes cache-reuse verifiable by comparison.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["IterationRow", "RunReport", "report_render"]

_COUNT_FIELDS = ("cases_processed", "failed", "success", "indeterminate",
                 "engine_errors")


@dataclass(frozen=True)
class IterationRow:
    iteration: int
    cases_processed: int
    failed: int
    success: int
    indeterminate: int
    engine_errors: int
    clock_used: float


@dataclass
class RunReport:
    rows: list[IterationRow]
    per_asr_failed: dict[str, int]
    config: dict
    seed: int
    notes: list[str] = field(default_factory=list)
    run_dir: Path | None = None  # not serialized; reports must not embed it

    def totals(self) -> dict:
        out = {name: sum(getattr(r, name) for r in self.rows)
               for name in _COUNT_FIELDS}
        out["clock_used"] = sum(r.clock_used for r in self.rows)
        return out

    @property
    def total_failed(self) -> int:
        return sum(r.failed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "iterations": [vars(r) | {} for r in self.rows],
            "totals": self.totals(),
            "per_asr_failed": dict(self.per_asr_failed),
            "config": self.config,
            "seed": self.seed,
            "notes": list(self.notes),
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, payload: dict) -> "RunReport":
        rows = [IterationRow(**row) for row in payload["iterations"]]
        return cls(rows=rows, per_asr_failed=dict(payload["per_asr_failed"]),
                   config=payload["config"], seed=payload["seed"],
                   notes=list(payload.get("notes", [])))

    def to_csv_str(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["iteration", *_COUNT_FIELDS, "clock_used"]
        writer.writerow(header)
        for r in self.rows:
            writer.writerow([r.iteration] + [getattr(r, f) for f in _COUNT_FIELDS]
                            + [r.clock_used])
        totals = self.totals()
        writer.writerow(["total"] + [totals[f] for f in _COUNT_FIELDS]
                        + [totals["clock_used"]])
        return buf.getvalue()

    def render_text(self) -> str:
        header = ["iter", "cases", "failed", "success", "indet", "errors", "clock"]
        table = [header]
        for r in self.rows:
            table.append([str(r.iteration), str(r.cases_processed), str(r.failed),
                          str(r.success), str(r.indeterminate),
                          str(r.engine_errors), f"{r.clock_used:.3f}"])
        totals = self.totals()
        table.append(["total"] + [str(totals[f]) for f in _COUNT_FIELDS]
                     + [f"{totals['clock_used']:.3f}"])
        widths = [max(len(row[i]) for row in table) for i in range(len(header))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths))
                 for row in table]
        lines.insert(1, "  ".join("-" * w for w in widths))
        target = self.config.get("target_asr")
        lines.append("")
        lines.append(f"failed cases per recognizer as target "
                     f"(configured target: {target}):")
        for name, count in self.per_asr_failed.items():
            marker = " *" if name == target else ""
            lines.append(f"  {name}: {count}{marker}")
        if not any(r.cases_processed for r in self.rows):
            lines.append("")
            lines.append("warning: no cases were processed")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def report_render(report: RunReport, run_dir: Path | None = None) -> str:
    """Render the human-readable table and write report.json / report.csv.

    Returns the text table; files are written next to cases.jsonl when a
    run directory is known.
    """
    target = run_dir or report.run_dir
    if target is not None:
        target = Path(target)
        target.mkdir(parents=True, exist_ok=True)
        (target / "report.json").write_text(report.to_json_str(), encoding="utf-8")
        (target / "report.csv").write_text(report.to_csv_str(), encoding="utf-8")
    return report.render_text()
