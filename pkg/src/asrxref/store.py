"""Artifact persistence: audio/transcription cache and case records.

Layout under the configured output directory:

    <output_dir>/cache/<engine>/audio/<index>.wav (+ .meta.json sidecar)
    <output_dir>/cache/<engine>/transcription/<index>.txt
    <output_dir>/runs/<stamp>/cases.jsonl, report.json, report.csv

The cache is shared across runs; each run gets its own timestamped
directory. Writes go through temp-file-plus-rename, so a crashed run never
poisons the cache. Cache hits skip the producer entirely; any virtual-time
accounting for the call is the caller's business, so reuse does not change
what a deterministic run reports.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from . import audio as audio_io
from .corpus import CorpusEntry, normalize_text
from .engines import AudioRef, Transcription, load_audio_ref
from .errors import CaseValidationError
from .oracle import CaseRecord, Outcome, judge_all

__all__ = ["CacheKey", "ArtifactStore", "append_case", "load_cases",
           "case_to_json", "case_from_json"]

log = logging.getLogger(__name__)

STAGES = ("audio", "transcription")


@dataclass(frozen=True)
class CacheKey:
    namespace: str
    text_index: int
    stage: str

    def path(self, output_dir: Path) -> Path:
        ext = "wav" if self.stage == "audio" else "txt"
        return (Path(output_dir) / "cache" / self.namespace / self.stage
                / f"{self.text_index}.{ext}")


class ArtifactStore:
    """Cache plus run-directory bookkeeping rooted at one output directory.

    Artifacts already seen by this process are additionally held in memory,
    so back-to-back runs over the same store (sweeps) skip the disk reads.
    """

    def __init__(self, output_dir: str | Path, recompute: bool = False):
        self.output_dir = Path(output_dir)
        self.recompute = recompute
        self._audio_memo: dict[Path, AudioRef] = {}
        self._text_memo: dict[Path, str] = {}

    # -- cache --------------------------------------------------------------

    def cache_root(self) -> Path:
        return self.output_dir / "cache"

    def get_or_compute_audio(self, key: CacheKey, producer) -> AudioRef:
        """Return the cached AudioRef or invoke `producer(path)` to make it.

        A disk hit requires the WAV to exist with a readable sidecar or
        parseable header; anything unreadable is treated as a miss with a
        warning. The producer returns the AudioRef it wrote.
        """
        path = key.path(self.output_dir)
        if not self.recompute:
            memo = self._audio_memo.get(path)
            if memo is not None:
                return memo
            if path.exists():
                ref = load_audio_ref(key.namespace, key.text_index, path)
                if audio_io.read_sidecar(path) is not None or ref.duration_s > 0:
                    self._audio_memo[path] = ref
                    return ref
                log.warning("cache artifact %s unreadable, recomputing", path)
        ref = producer(path)
        self._audio_memo[path] = ref
        return ref

    def get_or_compute_text(self, key: CacheKey, producer) -> str:
        """Return the cached transcription text or produce and persist it."""
        path = key.path(self.output_dir)
        if not self.recompute:
            memo = self._text_memo.get(path)
            if memo is not None:
                return memo
            if path.exists():
                try:
                    text = path.read_text(encoding="utf-8")
                    self._text_memo[path] = text
                    return text
                except (OSError, UnicodeDecodeError):
                    log.warning("cache artifact %s unreadable, recomputing", path)
        text = producer()
        audio_io.atomic_write_text(path, text)
        self._text_memo[path] = text
        return text

    # -- run directories ----------------------------------------------------

    def new_run_dir(self) -> Path:
        base = self.output_dir / "runs"
        base.mkdir(parents=True, exist_ok=True)
        stamp = time.strftime("%Y%m%d-%H%M%S")
        candidate = base / stamp
        n = 1
        while True:
            try:
                candidate.mkdir()
                return candidate
            except FileExistsError:
                candidate = base / f"{stamp}-{n}"
                n += 1


# -- case record serialization -----------------------------------------------


def case_to_json(record: CaseRecord) -> str:
    payload = {
        "index": record.entry.index,
        "text": record.entry.raw_text,
        "audio": {
            "engine": record.audio.engine_name,
            "path": str(record.audio.path),
            "valid": record.audio.valid,
            "duration": record.audio.duration_s,
        },
        "transcriptions": {name: t.raw for name, t in record.transcriptions.items()},
        "outcomes": {name: o.value for name, o in record.outcomes.items()},
        "iteration": record.iteration,
        "clock": record.clock_time,
    }
    return json.dumps(payload, sort_keys=True)


def case_from_json(line: str, lineno: int = 0) -> CaseRecord:
    where = f"cases line {lineno}"
    try:
        payload = json.loads(line)
    except ValueError as exc:
        raise CaseValidationError(f"{where}: malformed JSON ({exc})")
    try:
        entry = CorpusEntry(index=payload["index"], raw_text=payload["text"],
                            norm_text=normalize_text(payload["text"]))
        audio = AudioRef(engine_name=payload["audio"]["engine"],
                         text_index=payload["index"],
                         path=Path(payload["audio"]["path"]),
                         duration_s=payload["audio"]["duration"],
                         valid=payload["audio"]["valid"])
        transcriptions = {
            name: Transcription(asr_name=name, text_index=entry.index, raw=raw)
            for name, raw in payload["transcriptions"].items()
        }
        outcomes = {name: Outcome(value)
                    for name, value in payload["outcomes"].items()}
        record = CaseRecord(entry=entry, audio=audio, transcriptions=transcriptions,
                            outcomes=outcomes, iteration=payload["iteration"],
                            clock_time=payload["clock"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CaseValidationError(f"{where}: bad record shape ({exc})")
    if set(record.outcomes) != set(record.transcriptions):
        raise CaseValidationError(
            f"{where}: outcomes cover {sorted(record.outcomes)} but "
            f"transcriptions cover {sorted(record.transcriptions)}")
    expected = judge_all(entry, transcriptions)
    if expected != record.outcomes:
        raise CaseValidationError(
            f"{where}: stored outcomes disagree with recomputed classification")
    return record


def append_case(run_dir: Path, record: CaseRecord) -> None:
    with open(Path(run_dir) / "cases.jsonl", "a", encoding="utf-8") as fh:
        fh.write(case_to_json(record) + "\n")


class CaseWriter:
    """Append-only cases.jsonl writer holding the handle for a whole run."""

    def __init__(self, run_dir: Path):
        self._fh = open(Path(run_dir) / "cases.jsonl", "a", encoding="utf-8")

    def append(self, record: CaseRecord) -> None:
        self._fh.write(case_to_json(record) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def load_cases(run_dir: Path) -> list[CaseRecord]:
    path = Path(run_dir) / "cases.jsonl"
    if not path.exists():
        return []
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                records.append(case_from_json(line, lineno))
    return records
