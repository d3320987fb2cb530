"""Corpus loading, normalization, and indexing.

The corpus is a UTF-8 text file with one candidate text per line (LF or
CRLF). Lines are normalized, empty lines dropped, and duplicates removed by
normalized form; the survivors get contiguous indices in file order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError

__all__ = ["CorpusEntry", "normalize_text", "clean_lines", "load_corpus"]


@dataclass(frozen=True)
class CorpusEntry:
    """One candidate text: stable index, original line, normalized form."""

    index: int
    raw_text: str
    norm_text: str


def normalize_text(raw: str) -> str:
    """Canonicalize a text for matching.

    Lowercases, replaces every character that is not a letter, digit,
    apostrophe, or whitespace with a space, collapses whitespace runs, and
    strips the ends. Idempotent and total.
    """
    kept = []
    for ch in raw.lower():
        if ch.isalnum() or ch == "'":
            kept.append(ch)
        else:
            # whitespace and punctuation both become separators
            kept.append(" ")
    return " ".join("".join(kept).split())


def clean_lines(lines: list[str]) -> list[CorpusEntry]:
    """Normalize, drop empties, dedupe by normalized form (first wins)."""
    entries: list[CorpusEntry] = []
    seen: set[str] = set()
    for raw in lines:
        raw = raw.rstrip("\r\n")
        norm = normalize_text(raw)
        if not norm or norm in seen:
            continue
        seen.add(norm)
        entries.append(CorpusEntry(index=len(entries), raw_text=raw, norm_text=norm))
    return entries


def load_corpus(path: str | Path, sample_size: int | None = None,
                seed: int = 0) -> list[CorpusEntry]:
    """Load and clean a corpus file, optionally down-sampling it.

    Sampling draws `sample_size` entries uniformly with a generator seeded by
    `seed`, then re-indexes the selection in original file order, so the
    result is a deterministic function of (file bytes, sample_size, seed).

    Raises OSError if the file is unreadable and ConfigurationError if
    sample_size exceeds the cleaned corpus size.
    """
    with open(path, encoding="utf-8") as fh:
        entries = clean_lines(fh.readlines())
    if sample_size is None:
        return entries
    if sample_size > len(entries):
        raise ConfigurationError(
            f"sample_size {sample_size} exceeds cleaned corpus size {len(entries)}"
        )
    rng = random.Random(seed)
    chosen = rng.sample(range(len(entries)), sample_size)
    chosen.sort()
    return [
        CorpusEntry(index=i, raw_text=entries[j].raw_text, norm_text=entries[j].norm_text)
        for i, j in enumerate(chosen)
    ]
