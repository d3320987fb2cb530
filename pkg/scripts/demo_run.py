#!/usr/bin/env python3
"""End-to-end demo on simulated engines.

Builds a 200-text corpus where 20% of texts trip the target recognizer,
then compares a plain corpus-order run against a run prioritized by the
built-in failure estimator, under the same virtual time budget. Finishes
with a visibility sweep. Everything lands under --workdir.
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

from asrxref.config import parse_config
from asrxref.report import report_render
from asrxref.scheduler import run
from asrxref.sweep import sweep

TRIGGERS = ["zygomatic", "quixotic", "fjordland", "xylophone", "kvetching",
            "bazooka", "jacuzzi", "puzzling", "vortexes", "zeppelin"]


def write_demo_config(workdir: Path, corpus: Path) -> Path:
    config = {
        "tts": "demo-tts",
        "asrs": ["target", "reference"],
        "target_asr": "target",
        "estimator": "none",
        "corpus": str(corpus),
        "num_iteration": 10,
        "text_batch_size": 120,
        "time_budget": 30,
        "clock": "virtual",
        "output_dir": str(workdir / "out"),
        "engines": [
            {"name": "demo-tts", "kind": "tts", "backend": "simulated",
             "virtual_cost": 1.0, "sim": {"rng_seed": 1}},
            {"name": "target", "kind": "asr", "backend": "simulated",
             "virtual_cost": 1.0,
             "sim": {"trigger_tokens": TRIGGERS, "rng_seed": 2}},
            {"name": "reference", "kind": "asr", "backend": "simulated",
             "virtual_cost": 1.0, "sim": {"rng_seed": 3}},
        ],
    }
    path = workdir / "config.json"
    path.write_text(json.dumps(config, indent=2))
    return path


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo-workdir")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    workdir = Path(args.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    corpus = workdir / "corpus.txt"
    subprocess.run([sys.executable, str(Path(__file__).parent / "make_corpus.py"),
                    "--size", "200", "--trigger-rate", "0.2",
                    "--seed", str(args.seed), "--out", str(corpus)], check=True)

    config_path = write_demo_config(workdir, corpus)
    config = parse_config(config_path)

    print("== corpus-order run (no estimator) ==")
    baseline = run(config)
    print(report_render(baseline), end="")

    print("\n== estimator-prioritized run, same budget ==")
    boosted = run(config.replace(estimator="builtin-nb"))
    print(report_render(boosted), end="")

    gain = boosted.total_failed - baseline.total_failed
    print(f"\nestimator found {boosted.total_failed} failed cases vs "
          f"{baseline.total_failed} in corpus order ({gain:+d})")

    print("\n== visibility sweep (estimator on) ==")
    rows = sweep(config.replace(estimator="builtin-nb"), "visibility",
                 [4, 12, 40, 120])
    for row, _ in rows:
        print(f"  visibility {row.setting:>3}: {row.total_failed} failed cases")
    print(f"\nsweep CSV: {Path(config.output_dir) / 'sweep.csv'}")


if __name__ == "__main__":
    main()
