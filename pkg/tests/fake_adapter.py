"""Configurable protocol double for adapter client tests.

Standalone on purpose: it exercises the wire protocol without importing the
package under test. Misbehavior modes simulate the failure cases the client
must surface.
"""

import argparse
import io
import json
import struct
import sys
import time


def tiny_wav_bytes(n_samples=160):
    buf = io.BytesIO()
    import wave
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(16000)
        w.writeframes(struct.pack(f"<{n_samples}h", *([0] * n_samples)))
    return buf.getvalue()


def emit(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--kind", default="tts")
    parser.add_argument("--mode", default="ok",
                        choices=["ok", "error", "bad-id", "malformed", "crash",
                                 "sleep"])
    args = parser.parse_args()

    for line in sys.stdin:
        req = json.loads(line)
        rid, op = req.get("id"), req.get("op")
        if op == "hello":
            emit({"id": rid, "ok": True, "kind": args.kind})
            continue
        if args.mode == "crash":
            print("synthetic adapter crash", file=sys.stderr)
            sys.exit(3)
        if args.mode == "sleep":
            time.sleep(5)
        if args.mode == "error":
            emit({"id": rid, "ok": False, "error": "decode failure"})
            continue
        if args.mode == "bad-id":
            emit({"id": "999", "ok": True})
            continue
        if args.mode == "malformed":
            sys.stdout.write("this is not json\n")
            sys.stdout.flush()
            continue
        if op == "tts":
            out = req["out"]
            with open(out + ".meta.json", "w") as fh:
                json.dump({"text": req["text"], "valid": True}, fh)
            with open(out, "wb") as fh:
                fh.write(tiny_wav_bytes())
            emit({"id": rid, "ok": True, "audio": out})
        elif op == "asr":
            try:
                with open(req["audio"] + ".meta.json") as fh:
                    text = json.load(fh)["text"]
            except OSError:
                emit({"id": rid, "ok": False, "error": "no sidecar"})
                continue
            emit({"id": rid, "ok": True, "text": text})
        elif op == "fit":
            emit({"id": rid, "ok": True})
        elif op == "predict":
            emit({"id": rid, "ok": True,
                  "probs": [min(1.0, len(t) / 100.0) for t in req["texts"]]})
        else:
            emit({"id": rid, "ok": False, "error": "unknown op"})


if __name__ == "__main__":
    main()
