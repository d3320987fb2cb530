"""Client side of the external-adapter wire protocol.

An adapter is a long-lived subprocess exchanging one JSON object per line
over stdin/stdout. The framework opens it lazily, performs a handshake
({"id":"0","op":"hello"} -> {"id":"0","ok":true,"kind":...}), and then
issues tts/asr/fit/predict requests with monotonically increasing ids. A
single adapter serializes its own requests; replies must echo the request
id. Any deviation (crash, timeout, id mismatch, malformed JSON, ok:false)
surfaces as an EngineError with the captured stderr tail.
"""

from __future__ import annotations

import collections
import json
import queue
import subprocess
import threading
from pathlib import Path

from .errors import EngineError

__all__ = ["AdapterClient"]

DEFAULT_TIMEOUT = 300.0
STDERR_TAIL_LINES = 50


class AdapterClient:
    """Owns one adapter process and speaks the protocol to it."""

    def __init__(self, engine_name: str, command: list[str], expected_kind: str,
                 timeout: float = DEFAULT_TIMEOUT):
        self.engine_name = engine_name
        self.command = command
        self.expected_kind = expected_kind
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._replies: queue.Queue = queue.Queue()
        self._stderr_tail: collections.deque[str] = collections.deque(
            maxlen=STDERR_TAIL_LINES)
        self._next_id = 1
        self._lock = threading.Lock()

    # -- process management -------------------------------------------------

    def _ensure_started(self) -> None:
        if self._proc is not None:
            return
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.PIPE, text=True, encoding="utf-8", bufsize=1)
        except OSError as exc:
            raise EngineError(self.engine_name, f"failed to start adapter: {exc}")
        threading.Thread(target=self._pump_stdout, daemon=True).start()
        threading.Thread(target=self._pump_stderr, daemon=True).start()
        reply = self._roundtrip({"id": "0", "op": "hello"}, request_id="0")
        kind = reply.get("kind")
        if kind != self.expected_kind:
            raise EngineError(
                self.engine_name,
                f"handshake kind '{kind}' does not match configured "
                f"kind '{self.expected_kind}'", request_id="0",
                stderr=self._stderr())

    def _pump_stdout(self) -> None:
        proc = self._proc
        for line in proc.stdout:
            self._replies.put(line)
        self._replies.put(None)  # EOF marker

    def _pump_stderr(self) -> None:
        proc = self._proc
        for line in proc.stderr:
            self._stderr_tail.append(line.rstrip("\n"))

    def _stderr(self) -> str:
        return "\n".join(self._stderr_tail)

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            proc.stdin.close()
            proc.terminate()
            proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            proc.kill()

    # -- protocol -----------------------------------------------------------

    def _roundtrip(self, request: dict, request_id: str) -> dict:
        proc = self._proc
        try:
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
        except (OSError, ValueError):
            raise EngineError(self.engine_name, "adapter stdin closed",
                              request_id=request_id, stderr=self._stderr())
        try:
            line = self._replies.get(timeout=self.timeout)
        except queue.Empty:
            raise EngineError(self.engine_name,
                              f"no reply within {self.timeout:g} s",
                              request_id=request_id, stderr=self._stderr())
        if line is None:
            raise EngineError(self.engine_name, "adapter process exited",
                              request_id=request_id, stderr=self._stderr())
        try:
            reply = json.loads(line)
        except ValueError:
            raise EngineError(self.engine_name,
                              f"malformed JSON reply: {line!r}",
                              request_id=request_id, stderr=self._stderr())
        if not isinstance(reply, dict) or reply.get("id") != request_id:
            raise EngineError(self.engine_name,
                              f"reply id {reply.get('id')!r} does not match "
                              f"request id {request_id!r}",
                              request_id=request_id, stderr=self._stderr())
        if not reply.get("ok"):
            raise EngineError(self.engine_name,
                              str(reply.get("error", "unspecified adapter error")),
                              request_id=request_id, stderr=self._stderr())
        return reply

    def call(self, op: str, **payload) -> dict:
        """Issue one request and return the ok reply."""
        with self._lock:
            self._ensure_started()
            request_id = str(self._next_id)
            self._next_id += 1
            return self._roundtrip({"id": request_id, "op": op, **payload},
                                   request_id=request_id)

    # -- typed operations ---------------------------------------------------

    def tts(self, text: str, out_path: Path) -> Path:
        reply = self.call("tts", text=text, out=str(out_path))
        produced = reply.get("audio")
        if not isinstance(produced, str):
            raise EngineError(self.engine_name,
                              "tts reply missing 'audio' path", stderr=self._stderr())
        return Path(produced)

    def asr(self, audio_path: Path) -> str:
        reply = self.call("asr", audio=str(audio_path))
        text = reply.get("text")
        if not isinstance(text, str):
            raise EngineError(self.engine_name,
                              "asr reply missing 'text'", stderr=self._stderr())
        return text

    def fit(self, data: list[dict]) -> None:
        self.call("fit", data=data)

    def predict(self, texts: list[str]) -> list[float]:
        reply = self.call("predict", texts=texts)
        probs = reply.get("probs")
        if not isinstance(probs, list) or len(probs) != len(texts):
            raise EngineError(self.engine_name,
                              "predict reply 'probs' missing or wrong length",
                              stderr=self._stderr())
        return [float(p) for p in probs]
