"""Failure-probability estimation and prioritized text selection.

The built-in estimator is a two-class multinomial model over hashed
character n-grams (n = 1..3, 2^18 buckets) with add-one smoothing: cheap,
dependency-free, and a pure function of its training set, which keeps whole
runs replayable. Positive class = cases that failed for the configured
target; successes and indeterminates together form the negative class.
External estimators plug in over the adapter protocol (fit/predict ops).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .corpus import CorpusEntry
from .errors import TrainingError

if TYPE_CHECKING:
    from .oracle import CaseRecord

__all__ = ["N_BUCKETS", "extract_features", "EstimatorModel",
           "fit", "fit_labeled", "predict", "decision_scores", "rank"]

N_BUCKETS = 1 << 18
NGRAM_SIZES = (1, 2, 3)


def extract_features(text: str) -> dict[int, int]:
    """Hashed character n-gram counts; empty text gives an empty vector."""
    counts: dict[int, int] = {}
    for n in NGRAM_SIZES:
        for i in range(len(text) - n + 1):
            gram = text[i:i + n]
            bucket = zlib.crc32(gram.encode("utf-8")) & (N_BUCKETS - 1)
            counts[bucket] = counts.get(bucket, 0) + 1
    return counts


@dataclass(frozen=True)
class EstimatorModel:
    """Smoothed per-class priors and feature counts for the failed class (1)
    and everything else (0)."""

    log_prior: tuple[float, float]
    feature_counts: tuple[dict[int, int], dict[int, int]]
    total_counts: tuple[int, int]
    training_size: int


def fit_labeled(texts: Sequence[str], labels: Sequence[int]) -> EstimatorModel:
    """Train on (text, label) pairs; label 1 marks a failure."""
    if len(texts) != len(labels):
        raise ValueError("texts and labels must have equal length")
    if not texts:
        raise TrainingError("cannot train the failure estimator on an empty set")
    n_by_class = [0, 0]
    feature_counts: tuple[dict[int, int], dict[int, int]] = ({}, {})
    total_counts = [0, 0]
    for text, label in zip(texts, labels):
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        n_by_class[label] += 1
        bag = feature_counts[label]
        for bucket, count in extract_features(text).items():
            bag[bucket] = bag.get(bucket, 0) + count
            total_counts[label] += count
    total = n_by_class[0] + n_by_class[1]
    log_prior = (math.log((n_by_class[0] + 1) / (total + 2)),
                 math.log((n_by_class[1] + 1) / (total + 2)))
    return EstimatorModel(log_prior=log_prior, feature_counts=feature_counts,
                          total_counts=(total_counts[0], total_counts[1]),
                          training_size=total)


def fit(failed: Sequence["CaseRecord"], others: Sequence["CaseRecord"]) -> EstimatorModel:
    """Train from scratch on all accumulated cases of a run."""
    texts = [c.entry.norm_text for c in failed] + [c.entry.norm_text for c in others]
    labels = [1] * len(failed) + [0] * len(others)
    return fit_labeled(texts, labels)


def _log_odds(model: EstimatorModel, text: str) -> float:
    log_odds = model.log_prior[1] - model.log_prior[0]
    denom = (math.log(model.total_counts[0] + N_BUCKETS),
             math.log(model.total_counts[1] + N_BUCKETS))
    for bucket, count in extract_features(text).items():
        like1 = math.log(model.feature_counts[1].get(bucket, 0) + 1) - denom[1]
        like0 = math.log(model.feature_counts[0].get(bucket, 0) + 1) - denom[0]
        log_odds += count * (like1 - like0)
    return log_odds


def _logistic(log_odds: float) -> float:
    if log_odds >= 0:
        return 1.0 / (1.0 + math.exp(-log_odds))
    e = math.exp(log_odds)
    return e / (1.0 + e)


def decision_scores(model: EstimatorModel, texts: Sequence[CorpusEntry]) -> list[float]:
    """Posterior log-odds per entry; orders identically to `predict` but
    without the logistic's float saturation at extreme scores."""
    return [_log_odds(model, entry.norm_text) for entry in texts]


def predict(model: EstimatorModel, texts: Sequence[CorpusEntry]) -> list[float]:
    """Posterior failure probability per entry, in input order."""
    return [_logistic(_log_odds(model, entry.norm_text)) for entry in texts]


def rank(texts: Sequence[CorpusEntry], probs: Sequence[float]) -> list[CorpusEntry]:
    """Sort by probability descending, ties broken by ascending index."""
    if len(texts) != len(probs):
        raise ValueError(
            f"rank got {len(texts)} texts but {len(probs)} probabilities")
    order = sorted(range(len(texts)), key=lambda i: (-probs[i], texts[i].index))
    return [texts[i] for i in order]


class BuiltinEstimator:
    """In-process wrapper giving the scheduler a uniform fit/rank surface."""

    def __init__(self):
        self._model: EstimatorModel | None = None

    def fit_cases(self, failed, others) -> None:
        self._model = fit(failed, others)

    def rank_entries(self, entries: Sequence[CorpusEntry]) -> list[CorpusEntry]:
        # rank on log-odds: the same ordering as probabilities, minus the
        # ties the logistic manufactures when it saturates at 1.0
        return rank(entries, decision_scores(self._model, entries))


class ExternalEstimator:
    """Adapter-backed estimator speaking the fit/predict wire ops."""

    def __init__(self, client):
        self._client = client

    def fit_cases(self, failed, others) -> None:
        if not failed and not others:
            raise TrainingError("cannot train the failure estimator on an empty set")
        data = [{"text": c.entry.norm_text, "label": 1} for c in failed]
        data += [{"text": c.entry.norm_text, "label": 0} for c in others]
        self._client.fit(data)

    def rank_entries(self, entries: Sequence[CorpusEntry]) -> list[CorpusEntry]:
        probs = self._client.predict([e.norm_text for e in entries])
        return rank(entries, probs)
