"""Reference adapters speaking the asrxref engine wire protocol."""

from .conformance import CheckResult, ConformanceReport, conformance_check
from .protocol import serve

__version__ = "0.1.0"

__all__ = ["CheckResult", "ConformanceReport", "conformance_check", "serve"]
