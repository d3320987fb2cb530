"""Protocol conformance checker for external adapters.

Drives a candidate adapter through the handshake, a kind-appropriate
valid operation, an unknown op, and a malformed request line, verifying
id discipline and that the process survives every step. An adapter that
passes is usable by the framework without modification.
"""

from __future__ import annotations

import json
import queue
import subprocess
import tempfile
import threading
import wave
from dataclasses import dataclass
from pathlib import Path

from .protocol import write_sidecar, write_silent_wav

__all__ = ["CheckResult", "ConformanceReport", "conformance_check"]

REPLY_TIMEOUT = 30.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    command: list[str]
    kind: str | None
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"adapter: {' '.join(self.command)}"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


class _Probe:
    """Minimal protocol client used only for checking."""

    def __init__(self, command: list[str]):
        self.proc = subprocess.Popen(command, stdin=subprocess.PIPE,
                                     stdout=subprocess.PIPE,
                                     stderr=subprocess.PIPE, text=True,
                                     encoding="utf-8", bufsize=1)
        self._lines: queue.Queue = queue.Queue()
        threading.Thread(target=self._pump, daemon=True).start()
        self._n = 0

    def _pump(self):
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def send_raw(self, text: str) -> None:
        self.proc.stdin.write(text)
        self.proc.stdin.flush()

    def read_reply(self) -> dict:
        line = self._lines.get(timeout=REPLY_TIMEOUT)
        if line is None:
            raise RuntimeError("adapter process exited: "
                               + (self.proc.stderr.read() or "").strip()[-500:])
        return json.loads(line)

    def request(self, op: str, **payload) -> tuple[str, dict]:
        self._n += 1
        rid = str(self._n)
        self.send_raw(json.dumps({"id": rid, "op": op, **payload}) + "\n")
        return rid, self.read_reply()

    def close(self):
        try:
            self.proc.stdin.close()
            self.proc.terminate()
            self.proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            self.proc.kill()


def _check_valid_op(probe: _Probe, kind: str, workdir: Path) -> tuple[bool, str]:
    if kind == "tts":
        out = str(workdir / "probe.wav")
        rid, reply = probe.request("tts", text="probe text", out=out)
        if reply.get("id") != rid:
            return False, f"reply id {reply.get('id')!r} != {rid!r}"
        if not reply.get("ok"):
            return False, f"tts replied ok:false ({reply.get('error')})"
        audio = reply.get("audio")
        if not isinstance(audio, str) or not Path(audio).exists():
            return False, "tts reply has no existing 'audio' path"
        try:
            with wave.open(audio, "rb") as wav:
                if wav.getnframes() <= 0:
                    return False, "tts wrote an empty WAV"
        except wave.Error as exc:
            return False, f"tts output is not a WAV: {exc}"
        return True, ""
    if kind == "asr":
        audio = str(workdir / "probe.wav")
        write_sidecar(audio, "probe text")
        write_silent_wav(audio)
        rid, reply = probe.request("asr", audio=audio)
        if reply.get("id") != rid:
            return False, f"reply id {reply.get('id')!r} != {rid!r}"
        if not reply.get("ok") or not isinstance(reply.get("text"), str):
            return False, f"asr reply not ok or missing text ({reply.get('error')})"
        return True, ""
    if kind == "estimator":
        rid, reply = probe.request("fit", data=[{"text": "bad zebra", "label": 1},
                                                {"text": "fine text", "label": 0}])
        if reply.get("id") != rid or not reply.get("ok"):
            return False, f"fit failed ({reply.get('error')})"
        rid, reply = probe.request("predict", texts=["bad zebra", "fine text"])
        if reply.get("id") != rid or not reply.get("ok"):
            return False, f"predict failed ({reply.get('error')})"
        probs = reply.get("probs")
        if (not isinstance(probs, list) or len(probs) != 2
                or not all(isinstance(p, (int, float)) and 0 <= p <= 1
                           for p in probs)):
            return False, f"predict probs malformed: {probs!r}"
        return True, ""
    return False, f"unknown kind {kind!r}"


def conformance_check(command: list[str]) -> ConformanceReport:
    checks: list[CheckResult] = []
    kind = None
    probe = _Probe(command)
    workdir = Path(tempfile.mkdtemp(prefix="conformance-"))
    try:
        # 1. handshake
        try:
            probe.send_raw(json.dumps({"id": "0", "op": "hello"}) + "\n")
            reply = probe.read_reply()
            kind = reply.get("kind")
            ok = (reply.get("id") == "0" and reply.get("ok") is True
                  and kind in ("tts", "asr", "estimator"))
            checks.append(CheckResult("handshake", ok, "" if ok else repr(reply)))
        except (RuntimeError, ValueError, queue.Empty) as exc:
            checks.append(CheckResult("handshake", False, str(exc)))
            return ConformanceReport(command=command, kind=None, checks=checks)

        # 2. a valid operation for the advertised kind
        try:
            ok, detail = _check_valid_op(probe, kind, workdir)
        except (RuntimeError, ValueError, queue.Empty) as exc:
            ok, detail = False, str(exc)
        checks.append(CheckResult(f"valid {kind} op", ok, detail))

        # 3. unknown op must be refused politely, with the right id
        try:
            rid, reply = probe.request("frobnicate")
            ok = reply.get("id") == rid and reply.get("ok") is False
            checks.append(CheckResult("unknown op refused", ok,
                                      "" if ok else repr(reply)))
        except (RuntimeError, ValueError, queue.Empty) as exc:
            checks.append(CheckResult("unknown op refused", False, str(exc)))

        # 4. malformed input must not kill the loop
        try:
            probe.send_raw("this is not json\n")
            reply = probe.read_reply()
            ok = reply.get("ok") is False
            detail = "" if ok else repr(reply)
            # loop must still serve afterwards
            probe.send_raw(json.dumps({"id": "z", "op": "hello"}) + "\n")
            after = probe.read_reply()
            alive = after.get("id") == "z" and after.get("ok") is True
            checks.append(CheckResult("survives malformed input", ok and alive,
                                      detail if not ok else
                                      ("" if alive else "loop died after error")))
        except (RuntimeError, ValueError, queue.Empty) as exc:
            checks.append(CheckResult("survives malformed input", False, str(exc)))
    finally:
        probe.close()
    return ConformanceReport(command=command, kind=kind, checks=checks)
