"""Server side of the adapter wire protocol.

One JSON object per line on stdin, one per line on stdout. The loop
answers the hello handshake itself and dispatches everything else to the
wrapped engine. Failures of any kind become ok:false replies; the loop
never crashes on bad input, because the framework treats a dead adapter
as an engine failure for every subsequent case.
"""

from __future__ import annotations

import json
import sys

PROTOCOL_OPS = ("hello", "tts", "asr", "fit", "predict")


def write_silent_wav(path: str, n_samples: int = 320) -> None:
    """A minimal valid 16 kHz mono PCM16 WAV (all zero samples)."""
    import struct
    import wave

    with wave.open(path, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(16000)
        wav.writeframes(struct.pack(f"<{n_samples}h", *([0] * n_samples)))


def write_sidecar(audio_path: str, text: str, valid: bool = True) -> None:
    with open(audio_path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump({"text": text, "valid": valid}, fh)


def read_sidecar_text(audio_path: str) -> str:
    with open(audio_path + ".meta.json", encoding="utf-8") as fh:
        return json.load(fh)["text"]


def serve(engine, kind: str, stdin=None, stdout=None) -> None:
    """Answer requests until stdin closes. `engine` provides the op methods
    its kind requires: synthesize(text, out) / transcribe(audio) /
    fit(data) + predict(texts)."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def reply(obj):
        stdout.write(json.dumps(obj) + "\n")
        stdout.flush()

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be a JSON object")
        except ValueError as exc:
            reply({"id": "", "ok": False, "error": f"malformed request: {exc}"})
            continue
        rid = str(request.get("id", ""))
        op = request.get("op")
        if op == "hello":
            reply({"id": rid, "ok": True, "kind": kind})
            continue
        try:
            if op == "tts" and kind == "tts":
                out = engine.synthesize(request["text"], request["out"])
                reply({"id": rid, "ok": True, "audio": out})
            elif op == "asr" and kind == "asr":
                reply({"id": rid, "ok": True,
                       "text": engine.transcribe(request["audio"])})
            elif op == "fit" and kind == "estimator":
                engine.fit(request["data"])
                reply({"id": rid, "ok": True})
            elif op == "predict" and kind == "estimator":
                probs = engine.predict(request["texts"])
                reply({"id": rid, "ok": True, "probs": [float(p) for p in probs]})
            else:
                reply({"id": rid, "ok": False, "error": f"unknown op {op!r}"})
        except Exception as exc:  # noqa: BLE001 - protocol demands ok:false, not a crash
            reply({"id": rid, "ok": False, "error": f"{type(exc).__name__}: {exc}"})
