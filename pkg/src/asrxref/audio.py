"""WAV interchange helpers.

All audio moving through the pipeline is RIFF WAV, 16 kHz, mono, 16-bit
signed little-endian PCM. Synthesized placeholder audio carries a sidecar
`<path>.meta.json` with the spoken text and a validity flag; writes are
atomic (temp file + rename) so interrupted runs never leave torn artifacts.
"""

from __future__ import annotations

import io
import json
import math
import os
import wave
from pathlib import Path

SAMPLE_RATE = 16000
SAMPLE_WIDTH = 2
CHANNELS = 1


_ensured_dirs: set[str] = set()


def ensure_dir(path: Path) -> None:
    """mkdir -p with a process-wide memo; artifact trees are written densely
    enough that re-checking the same directories costs real time."""
    key = str(path)
    if key not in _ensured_dirs:
        path.mkdir(parents=True, exist_ok=True)
        _ensured_dirs.add(key)


def atomic_write_bytes(path: Path, data: bytes) -> None:
    ensure_dir(path.parent)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def pcm16_wav_bytes(samples: list[float]) -> bytes:
    """Encode float samples in [-1, 1] as a 16 kHz mono PCM16 WAV."""
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(CHANNELS)
        wav.setsampwidth(SAMPLE_WIDTH)
        wav.setframerate(SAMPLE_RATE)
        frames = bytearray()
        for s in samples:
            v = max(-1.0, min(1.0, s))
            frames += int(v * 32767).to_bytes(2, "little", signed=True)
        wav.writeframes(bytes(frames))
    return buf.getvalue()


TONE_SAMPLES = 320


def placeholder_tone(text_index: int, n_samples: int = TONE_SAMPLES) -> bytes:
    """Deterministic tiny sine burst standing in for synthesized speech."""
    freq = 220.0 + 20.0 * (text_index % 64)
    samples = [0.3 * math.sin(2.0 * math.pi * freq * t / SAMPLE_RATE)
               for t in range(n_samples)]
    return pcm16_wav_bytes(samples)


def wav_duration_s(path: Path) -> float | None:
    """Duration in seconds, or None when the file is not a conforming WAV."""
    try:
        with wave.open(str(path), "rb") as wav:
            if (wav.getnchannels() != CHANNELS or wav.getsampwidth() != SAMPLE_WIDTH
                    or wav.getframerate() != SAMPLE_RATE or wav.getnframes() <= 0):
                return None
            return wav.getnframes() / SAMPLE_RATE
    except (OSError, wave.Error, EOFError):
        return None


def sidecar_path(audio_path: Path) -> Path:
    return audio_path.with_name(audio_path.name + ".meta.json")


def write_sidecar(audio_path: Path, text: str, valid: bool) -> None:
    atomic_write_text(sidecar_path(audio_path),
                      json.dumps({"text": text, "valid": valid}))


def read_sidecar(audio_path: Path) -> dict | None:
    """Parsed sidecar dict, or None when absent or unreadable."""
    try:
        raw = sidecar_path(audio_path).read_text(encoding="utf-8")
        meta = json.loads(raw)
    except (OSError, ValueError):
        return None
    if not isinstance(meta, dict) or "text" not in meta or "valid" not in meta:
        return None
    return meta
