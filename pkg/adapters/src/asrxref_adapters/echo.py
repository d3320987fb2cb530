"""The reference echo adapter: a noiseless TTS/ASR channel.

As a TTS it writes a silent WAV and records the requested text in the
sidecar; as an ASR it reads the sidecar back. Wiring it in as both TTS
and ASR therefore classifies every case a success, which makes it the
canonical end-to-end smoke test for the whole pipeline, with no speech
models involved.
"""

from __future__ import annotations

from .protocol import read_sidecar_text, serve, write_sidecar, write_silent_wav


class EchoTts:
    def synthesize(self, text: str, out: str) -> str:
        write_sidecar(out, text, valid=True)  # sidecar first, then audio
        write_silent_wav(out)
        return out


class EchoAsr:
    def transcribe(self, audio: str) -> str:
        return read_sidecar_text(audio)


def serve_echo(kind: str) -> None:
    if kind == "tts":
        serve(EchoTts(), "tts")
    elif kind == "asr":
        serve(EchoAsr(), "asr")
    else:
        raise SystemExit(f"echo adapter serves tts or asr, not {kind!r}")
