"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigurationError exits 2, everything
else that aborts a run exits 1.
"""

from __future__ import annotations


class XrefError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(XrefError):
    """Invalid configuration: bad keys, unresolved names, out-of-range values."""


class EngineError(XrefError):
    """An engine call failed (adapter crash, timeout, malformed reply, ...)."""

    def __init__(self, engine: str, message: str, request_id: str | None = None,
                 stderr: str = ""):
        self.engine = engine
        self.request_id = request_id
        self.stderr = stderr
        detail = f"engine '{engine}'"
        if request_id is not None:
            detail += f" (request {request_id})"
        detail += f": {message}"
        if stderr:
            detail += f"\n--- captured stderr ---\n{stderr}"
        super().__init__(detail)


class TrainingError(XrefError):
    """Failure estimator could not be trained (e.g. empty training set)."""


class CaseValidationError(XrefError):
    """A persisted case record violates its invariants or cannot be parsed."""
