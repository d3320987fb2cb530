"""One-parameter ablation sweeps over a base configuration.

Each axis value yields one full run; all runs share the base config's seed
and output directory, so synthesized audio and transcriptions are computed
once and reused. Results stream into sweep.csv row by row, so an aborted
sweep still leaves the finished rows behind. Sweeps require the virtual
clock: wall-clock budgets would make settings incomparable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .config import RunConfig
from .errors import ConfigurationError
from .report import RunReport
from .scheduler import run
from .store import ArtifactStore

__all__ = ["AXES", "SweepRow", "sweep"]

AXES = ("visibility", "estimator", "asrs", "chunking")


@dataclass(frozen=True)
class SweepRow:
    axis: str
    setting: str
    total_failed: int
    cases_processed: int
    per_asr_failed: dict[str, int]


def _derive(base: RunConfig, axis: str, value) -> tuple[str, RunConfig]:
    if axis == "visibility":
        v = int(value)
        if v <= 0:
            raise ConfigurationError(f"visibility values must be positive, got {value!r}")
        return str(v), base.replace(text_batch_size=v)
    if axis == "estimator":
        return str(value), base.replace(estimator=str(value))
    if axis == "asrs":
        names = tuple(value)
        if base.target_asr not in names:
            raise ConfigurationError(
                f"asrs setting {list(names)} does not contain target "
                f"'{base.target_asr}'")
        return "|".join(names), base.replace(asrs=names)
    if axis == "chunking":
        if value not in ("static", "dynamic"):
            raise ConfigurationError(f"chunking values must be static/dynamic, "
                                     f"got {value!r}")
        return str(value), base.replace(chunking=str(value))
    raise ConfigurationError(f"unknown sweep axis '{axis}'; valid axes: {AXES}")


def sweep(base: RunConfig, axis: str, values: list | None = None,
          csv_path: str | Path | None = None) -> list[tuple[SweepRow, RunReport]]:
    """Run one RunReport per axis value and emit the comparison CSV."""
    if base.clock != "virtual":
        raise ConfigurationError("sweeps require clock='virtual' so settings "
                                 "are compared under identical budgets")
    if axis == "chunking" and not values:
        values = ["static", "dynamic"]
    if not values:
        raise ConfigurationError(f"sweep axis '{axis}' needs at least one value")

    derived = [_derive(base, axis, v) for v in values]
    asr_names = sorted({name for _, cfg in derived for name in cfg.asrs})
    csv_path = Path(csv_path) if csv_path else Path(base.output_dir) / "sweep.csv"
    csv_path.parent.mkdir(parents=True, exist_ok=True)

    # one store for the whole sweep: every setting reuses the same artifacts
    store = ArtifactStore(base.output_dir, recompute=base.recompute)
    results: list[tuple[SweepRow, RunReport]] = []
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["axis", "setting", "total_failed", "cases_processed"]
                        + [f"failed_as_target:{n}" for n in asr_names])
        fh.flush()
        for setting, cfg in derived:
            report = run(cfg, store=store)
            row = SweepRow(axis=axis, setting=setting,
                           total_failed=report.total_failed,
                           cases_processed=report.totals()["cases_processed"],
                           per_asr_failed=dict(report.per_asr_failed))
            writer.writerow([row.axis, row.setting, row.total_failed,
                             row.cases_processed]
                            + [row.per_asr_failed.get(n, "") for n in asr_names])
            fh.flush()
            results.append((row, report))
    return results


def load_sweep_csv(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def sweep_summary_json(results: list[tuple[SweepRow, RunReport]]) -> str:
    rows = [{"axis": r.axis, "setting": r.setting, "total_failed": r.total_failed,
             "cases_processed": r.cases_processed,
             "per_asr_failed": r.per_asr_failed} for r, _ in results]
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"
