"""Command-line entry points: run, sweep, report.

Exit codes: 0 success, 1 engine or system failure that aborted the command,
2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import OUTPUT_DIR_ENV, parse_config, engine_from_dict
from .errors import ConfigurationError, XrefError
from .report import RunReport, report_render
from .scheduler import run as run_scheduler
from .store import load_cases
from .sweep import AXES, sweep

__all__ = ["main"]


def _load_adapter_manifests(directory: str):
    """External engine descriptors from *.json manifests in a directory."""
    descs = []
    root = Path(directory)
    if not root.is_dir():
        raise ConfigurationError(f"--adapters directory {directory!r} does not exist")
    for path in sorted(root.glob("*.json")):
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise ConfigurationError(f"manifest {path}: invalid JSON ({exc})")
        if not isinstance(raw, dict):
            raise ConfigurationError(f"manifest {path}: must be a JSON object")
        fields = {"name": raw.get("name"), "kind": raw.get("kind"),
                  "backend": "external", "exec": raw.get("command")}
        if "virtual_cost" in raw:
            fields["virtual_cost"] = raw["virtual_cost"]
        descs.append(engine_from_dict(fields))
    return descs


def _merge_manifests(config, adapters_dir):
    if not adapters_dir:
        return config
    extra = tuple(_load_adapter_manifests(adapters_dir))
    return config.replace(engines=config.engines + extra)


def _cmd_run(args) -> int:
    config = _merge_manifests(parse_config(args.config), args.adapters)
    report = run_scheduler(config)
    print(report_render(report), end="")
    if report.run_dir is not None:
        print(f"\nrun directory: {report.run_dir}")
    return 0


def _parse_axis_values(args) -> list:
    if args.values_json:
        return json.loads(args.values_json)
    return list(args.values or [])


def _cmd_sweep(args) -> int:
    config = _merge_manifests(parse_config(args.config), args.adapters)
    values = _parse_axis_values(args)
    results = sweep(config, args.axis, values, csv_path=args.out)
    csv_path = args.out or Path(config.output_dir) / "sweep.csv"
    for row, _report in results:
        print(f"{row.axis}={row.setting}: total_failed={row.total_failed} "
              f"cases={row.cases_processed}")
    print(f"sweep CSV: {csv_path}")
    return 0


def _cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    report_path = run_dir / "report.json"
    if not report_path.exists():
        raise XrefError(f"{report_path} not found; is {run_dir} a run directory?")
    report = RunReport.from_dict(json.loads(report_path.read_text(encoding="utf-8")))
    # re-validate persisted cases while we are here; bad records are an error
    load_cases(run_dir)
    print(report.render_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asrxref",
        description="Differential testing of speech recognizers via synthesized "
                    "audio and multi-engine cross-referencing.",
        epilog=f"The {OUTPUT_DIR_ENV} environment variable overrides the "
               f"configured output directory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured run")
    p_run.add_argument("config", help="path to config.json")
    p_run.add_argument("--adapters", metavar="DIR",
                       help="directory of external adapter manifest files")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="ablation sweep over one parameter")
    p_sweep.add_argument("config", help="path to the base config.json")
    p_sweep.add_argument("--adapters", metavar="DIR",
                         help="directory of external adapter manifest files")
    p_sweep.add_argument("--axis", required=True, choices=AXES)
    p_sweep.add_argument("--values", nargs="*",
                         help="axis values (e.g. 4 12 40, or estimator names)")
    p_sweep.add_argument("--values-json",
                         help="axis values as JSON (needed for asrs sets)")
    p_sweep.add_argument("--out", help="sweep CSV path "
                                       "(default: <output_dir>/sweep.csv)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_report = sub.add_parser("report", help="re-render a finished run's report")
    p_report.add_argument("run_dir", help="run directory containing report.json")
    p_report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (XrefError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
