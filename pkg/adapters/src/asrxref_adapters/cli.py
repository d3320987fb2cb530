"""Adapter kit commands: serve the bundled adapters, check conformance."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .conformance import conformance_check
from .echo import serve_echo
from .sk_estimator import serve_sk_estimator


def _cmd_check(args) -> int:
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        command = manifest["command"]
        expected_kind = manifest.get("kind")
    else:
        command = args.command
        expected_kind = None
    if not command:
        print("check needs --manifest or a command after --", file=sys.stderr)
        return 2
    report = conformance_check(list(command))
    print(report.render())
    if expected_kind and report.kind != expected_kind:
        print(f"kind mismatch: manifest says {expected_kind!r}, "
              f"adapter says {report.kind!r}")
        return 1
    return 0 if report.passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="asrxref-adapters",
        description="Reference adapters and conformance checking for the "
                    "asrxref wire protocol.")
    sub = parser.add_subparsers(dest="command_name", required=True)

    p_echo = sub.add_parser("serve-echo",
                            help="noiseless reference adapter (sidecar echo)")
    p_echo.add_argument("--kind", choices=["tts", "asr"], required=True)

    sub.add_parser("serve-sk-estimator",
                   help="scikit-learn logistic regression failure estimator")

    p_hf_asr = sub.add_parser("serve-hf-asr",
                              help="transformers speech recognition wrapper")
    p_hf_asr.add_argument("--model", default="facebook/wav2vec2-base-960h")
    p_hf_tts = sub.add_parser("serve-hf-tts",
                              help="transformers text-to-speech wrapper")
    p_hf_tts.add_argument("--model", default="facebook/mms-tts-eng")
    p_hf_est = sub.add_parser("serve-hf-estimator",
                              help="transformer sequence-classifier estimator")
    p_hf_est.add_argument("--model", default="distilbert-base-uncased")

    p_check = sub.add_parser("check", help="run the conformance checks")
    p_check.add_argument("--manifest", help="adapter manifest JSON")
    p_check.add_argument("command", nargs="*",
                         help="adapter command (after --)")

    args = parser.parse_args(argv)
    if args.command_name == "serve-echo":
        serve_echo(args.kind)
    elif args.command_name == "serve-sk-estimator":
        serve_sk_estimator()
    elif args.command_name == "serve-hf-asr":
        from .hf import serve_hf_asr
        serve_hf_asr(args.model)
    elif args.command_name == "serve-hf-tts":
        from .hf import serve_hf_tts
        serve_hf_tts(args.model)
    elif args.command_name == "serve-hf-estimator":
        from .hf import serve_hf_estimator
        serve_hf_estimator(args.model)
    elif args.command_name == "check":
        return _cmd_check(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
