"""Failure estimator adapter backed by scikit-learn.

Hashed character n-grams into a logistic regression, retrained from
scratch on every fit request. Runs offline, so it doubles as the working
example of the estimator side of the protocol.
"""

from __future__ import annotations

from .protocol import serve


class SkEstimator:
    def __init__(self):
        self._model = None
        self._constant = 0.5

    def fit(self, data: list[dict]) -> None:
        from sklearn.feature_extraction.text import HashingVectorizer
        from sklearn.linear_model import LogisticRegression
        from sklearn.pipeline import make_pipeline

        texts = [str(item["text"]) for item in data]
        labels = [int(item["label"]) for item in data]
        if not texts:
            raise ValueError("empty training set")
        if len(set(labels)) < 2:
            # degenerate but legal: fall back to the observed base rate
            self._model = None
            self._constant = float(sum(labels)) / len(labels)
            return
        self._model = make_pipeline(
            HashingVectorizer(analyzer="char_wb", ngram_range=(1, 3),
                              n_features=1 << 18, alternate_sign=False),
            LogisticRegression(max_iter=1000),
        )
        self._model.fit(texts, labels)

    def predict(self, texts: list[str]) -> list[float]:
        if self._model is None:
            return [self._constant] * len(texts)
        return [float(p) for p in self._model.predict_proba(texts)[:, 1]]


def serve_sk_estimator() -> None:
    serve(SkEstimator(), "estimator")
