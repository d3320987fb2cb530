"""Engine descriptors, built-in simulated engines, and the engine registry.

Two backends exist behind one interface: `simulated` engines are
deterministic noisy channels good for experiments and tests, `external`
engines are subprocess adapters speaking the line-delimited JSON protocol
(see adapters.py). Determinism of the simulators is per call site: the
generator for a given (engine, text) pair is derived by hashing
(rng_seed, engine name, text_index), so adding or removing other engines
never perturbs existing results.
"""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import audio as audio_io
from .corpus import CorpusEntry, normalize_text
from .errors import ConfigurationError, EngineError

__all__ = [
    "SimModel", "EngineDescriptor", "AudioRef", "Transcription",
    "call_rng", "distractor_token", "sim_corrupt",
    "tts_generate", "asr_recognize", "EngineRegistry",
    "BUILTIN_ESTIMATOR",
]

KINDS = ("tts", "asr", "estimator")
BACKENDS = ("simulated", "external")
BUILTIN_ESTIMATOR = "builtin-nb"


@dataclass(frozen=True)
class SimModel:
    """Noisy-channel parameters for a simulated engine.

    Per word: a token in `trigger_tokens` is always substituted; otherwise
    one draw decides deletion (< p_del drops it) and, if kept, a second
    draw decides substitution (< p_sub replaces it). Substitutes are
    deterministic distractor tokens, never equal to the original.
    """

    p_sub: float = 0.0
    p_del: float = 0.0
    trigger_tokens: frozenset[str] = frozenset()
    invalid_audio_rate: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("p_sub", "p_del", "invalid_audio_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class EngineDescriptor:
    """Identity and invocation details of one engine."""

    name: str
    kind: str
    backend: str
    exec_: tuple[str, ...] | None = None
    sim: SimModel | None = None
    virtual_cost: float = 1.0

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("engine name must be non-empty")
        if self.kind not in KINDS:
            raise ConfigurationError(f"engine '{self.name}': unknown kind '{self.kind}'")
        if self.backend not in BACKENDS:
            raise ConfigurationError(
                f"engine '{self.name}': unknown backend '{self.backend}'")
        if self.virtual_cost < 0:
            raise ConfigurationError(f"engine '{self.name}': negative virtual_cost")
        if self.backend == "external":
            if not self.exec_ or self.sim is not None:
                raise ConfigurationError(
                    f"engine '{self.name}': external backend requires exec and no sim")
        elif self.kind == "estimator":
            # built-in estimators need neither a command nor channel noise
            if self.exec_ is not None:
                raise ConfigurationError(
                    f"engine '{self.name}': simulated estimator takes no exec")
        elif self.sim is None or self.exec_ is not None:
            raise ConfigurationError(
                f"engine '{self.name}': simulated backend requires sim and no exec")


@dataclass(frozen=True)
class AudioRef:
    """Pointer to one synthesized WAV plus its validity."""

    engine_name: str
    text_index: int
    path: Path
    duration_s: float
    valid: bool


@dataclass(frozen=True)
class Transcription:
    asr_name: str
    text_index: int
    raw: str
    norm: str = field(default="", compare=True)

    def __post_init__(self):
        object.__setattr__(self, "norm", normalize_text(self.raw))


def call_rng(rng_seed: int, engine_name: str, text_index: int) -> random.Random:
    """Deterministic generator for one (engine, text) call."""
    key = f"{rng_seed}:{engine_name}:{text_index}".encode("utf-8")
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def distractor_token(token: str) -> str:
    """Stable replacement word for `token`, guaranteed different from it."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=4).hexdigest()
    cand = "w" + digest
    return cand if cand != token else cand + "x"


def sim_corrupt(words: list[str], model: SimModel, stream: random.Random) -> list[str]:
    """Apply the noisy channel to a token list.

    Draw order per token (fixed so results are reproducible): trigger
    substitution consumes no draws; otherwise the deletion draw comes
    first, then the substitution draw only for surviving tokens.
    """
    out: list[str] = []
    for token in words:
        if token in model.trigger_tokens:
            out.append(distractor_token(token))
            continue
        if stream.random() < model.p_del:
            continue
        if stream.random() < model.p_sub:
            out.append(distractor_token(token))
        else:
            out.append(token)
    return out


def _audio_paths(out_dir: Path, tts_name: str, text_index: int) -> Path:
    return Path(out_dir) / tts_name / "audio" / f"{text_index}.wav"


def load_audio_ref(engine_name: str, text_index: int, path: Path) -> AudioRef:
    """Build an AudioRef from on-disk state.

    Validity comes from the sidecar when one exists (simulated engines and
    the reference adapters always write one), otherwise from whether the
    file parses as conforming WAV.
    """
    duration = audio_io.wav_duration_s(path)
    meta = audio_io.read_sidecar(path)
    valid = bool(meta["valid"]) if meta is not None else duration is not None
    return AudioRef(engine_name=engine_name, text_index=text_index, path=path,
                    duration_s=duration or 0.0, valid=valid)


def tts_generate(tts: EngineDescriptor, entry: CorpusEntry, out_dir: Path,
                 clock=None, adapter=None) -> AudioRef:
    """Synthesize audio for one corpus entry under the engine's namespace.

    Writes <out_dir>/<name>/audio/<index>.wav (sidecar first, then WAV, so
    a torn write never looks like a finished artifact) and charges the
    engine's virtual cost to `clock` when one is given.
    """
    if tts.kind != "tts":
        raise ConfigurationError(f"engine '{tts.name}' is not a TTS engine")
    if clock is not None:
        clock.charge(tts.virtual_cost)
    path = _audio_paths(Path(out_dir), tts.name, entry.index)
    audio_io.ensure_dir(path.parent)
    if tts.backend == "simulated":
        rng = call_rng(tts.sim.rng_seed, tts.name, entry.index)
        valid = rng.random() >= tts.sim.invalid_audio_rate
        audio_io.write_sidecar(path, entry.raw_text, valid)
        tone = audio_io.placeholder_tone(entry.index)
        audio_io.atomic_write_bytes(path, tone)
        return AudioRef(engine_name=tts.name, text_index=entry.index, path=path,
                        duration_s=audio_io.TONE_SAMPLES / audio_io.SAMPLE_RATE,
                        valid=valid)
    else:
        # adapters write to a staging name; publishing the sidecar before the
        # WAV keeps a torn write indistinguishable from a cache miss
        staging = path.with_name(f"part-{path.name}")
        produced = adapter.tts(entry.raw_text, staging)
        try:
            if produced != staging:
                staging.write_bytes(Path(produced).read_bytes())
            staged_meta = audio_io.sidecar_path(staging)
            if staged_meta.exists():
                os.replace(staged_meta, audio_io.sidecar_path(path))
            os.replace(staging, path)
        except OSError as exc:
            raise EngineError(tts.name,
                              f"adapter reported success but the audio could "
                              f"not be collected from {produced}: {exc}")
    return load_audio_ref(tts.name, entry.index, path)


def asr_recognize(asr: EngineDescriptor, audio: AudioRef,
                  clock=None, adapter=None) -> Transcription:
    """Transcribe one audio reference.

    Invalid audio short-circuits to an empty transcription without
    consulting the engine; the attempt still costs virtual time, mirroring
    a real recognizer chewing on garbage input.
    """
    if asr.kind != "asr":
        raise ConfigurationError(f"engine '{asr.name}' is not an ASR engine")
    if clock is not None:
        clock.charge(asr.virtual_cost)
    if not audio.valid:
        return Transcription(asr_name=asr.name, text_index=audio.text_index, raw="")
    if asr.backend == "simulated":
        meta = audio_io.read_sidecar(audio.path)
        if meta is None:
            raise EngineError(asr.name, f"audio {audio.path} has no readable sidecar")
        words = normalize_text(meta["text"]).split()
        stream = call_rng(asr.sim.rng_seed, asr.name, audio.text_index)
        raw = " ".join(sim_corrupt(words, asr.sim, stream))
    else:
        raw = adapter.asr(audio.path)
    return Transcription(asr_name=asr.name, text_index=audio.text_index, raw=raw)


class EngineRegistry:
    """Name-unique collection of engine descriptors plus live adapter clients."""

    def __init__(self):
        self._engines: dict[str, EngineDescriptor] = {}
        self._clients: dict[str, object] = {}
        self.adapter_timeout = 300.0
        self.register(EngineDescriptor(name=BUILTIN_ESTIMATOR, kind="estimator",
                                       backend="simulated"))

    def register(self, desc: EngineDescriptor) -> None:
        if desc.name in self._engines:
            raise ConfigurationError(f"duplicate engine name '{desc.name}'")
        self._engines[desc.name] = desc

    def names(self) -> list[str]:
        return list(self._engines)

    def require(self, name: str, kind: str) -> EngineDescriptor:
        desc = self._engines.get(name)
        if desc is None:
            raise ConfigurationError(f"engine '{name}' is not registered")
        if desc.kind != kind:
            raise ConfigurationError(
                f"engine '{name}' has kind '{desc.kind}', expected '{kind}'")
        return desc

    def adapter_for(self, desc: EngineDescriptor):
        """Lazily started, long-lived adapter client for an external engine."""
        from .adapters import AdapterClient

        client = self._clients.get(desc.name)
        if client is None:
            client = AdapterClient(desc.name, list(desc.exec_), desc.kind,
                                   timeout=self.adapter_timeout)
            self._clients[desc.name] = client
        return client

    def close(self) -> None:
        for client in self._clients.values():
            client.close()
        self._clients.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
