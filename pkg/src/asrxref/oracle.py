"""The differential-testing oracle.

A case is judged for a target recognizer by comparing every recognizer's
transcription against the reference text, on normalized forms:

  * the target matches            -> Success
  * another recognizer matches    -> Failed (for the target)
  * nobody matches                -> Indeterminate (audio may be invalid)

Matching is exact equality of normalized strings. Word error rate is a
diagnostic only, never part of the verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .corpus import CorpusEntry
from .engines import AudioRef, Transcription
from .errors import ConfigurationError

__all__ = ["Outcome", "CaseRecord", "matches", "classify_case", "word_error_rate"]


class Outcome(enum.Enum):
    SUCCESS = "success"
    FAILED = "failed"
    INDETERMINATE = "indeterminate"


@dataclass
class CaseRecord:
    """A fully judged test case.

    `outcomes` holds one verdict per recognizer, each computed as if that
    recognizer were the target, so a single run can report failure counts
    for every recognizer without re-running anything.
    """

    entry: CorpusEntry
    audio: AudioRef
    transcriptions: dict[str, Transcription]
    outcomes: dict[str, Outcome]
    iteration: int
    clock_time: float


def matches(reference: CorpusEntry, t: Transcription) -> bool:
    """True iff the transcription equals the reference in normalized form."""
    return reference.norm_text == t.norm


def classify_case(reference: CorpusEntry, transcriptions: dict[str, Transcription],
                  target: str) -> Outcome:
    if target not in transcriptions:
        raise ConfigurationError(
            f"target recognizer '{target}' has no transcription for this case"
        )
    if matches(reference, transcriptions[target]):
        return Outcome.SUCCESS
    for name, t in transcriptions.items():
        if name != target and matches(reference, t):
            return Outcome.FAILED
    return Outcome.INDETERMINATE


def judge_all(reference: CorpusEntry,
              transcriptions: dict[str, Transcription]) -> dict[str, Outcome]:
    """Verdict for every recognizer treated as the target."""
    return {name: classify_case(reference, transcriptions, name)
            for name in transcriptions}


def word_error_rate(reference: list[str], hypothesis: list[str]) -> float:
    """Word-level Levenshtein distance divided by reference length.

    Substitutions, insertions, and deletions all cost one edit. The
    reference must be non-empty.
    """
    if not reference:
        raise ValueError("word_error_rate requires a non-empty reference")
    n, m = len(reference), len(hypothesis)
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        for j in range(1, m + 1):
            sub = prev[j - 1] + (reference[i - 1] != hypothesis[j - 1])
            cur[j] = min(sub, prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[m] / n
