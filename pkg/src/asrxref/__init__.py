"""Differential testing for speech recognizers.

Synthesizes audio test inputs from a text corpus, cross-references several
recognizers against the reference text to classify cases as success /
failed / indeterminate for a chosen target, and hunts failures under
per-iteration time budgets with a trainable prioritizer.
"""

from .config import RunConfig, parse_config
from .corpus import CorpusEntry, load_corpus, normalize_text
from .engines import (AudioRef, EngineDescriptor, EngineRegistry, SimModel,
                      Transcription, asr_recognize, sim_corrupt, tts_generate)
from .errors import (CaseValidationError, ConfigurationError, EngineError,
                     TrainingError, XrefError)
from .estimator import EstimatorModel, extract_features, fit, predict, rank
from .oracle import CaseRecord, Outcome, classify_case, matches, word_error_rate
from .report import RunReport, report_render
from .scheduler import run
from .store import append_case, load_cases
from .sweep import sweep

__version__ = "0.1.0"

__all__ = [
    "RunConfig", "parse_config", "CorpusEntry", "load_corpus", "normalize_text",
    "AudioRef", "EngineDescriptor", "EngineRegistry", "SimModel", "Transcription",
    "asr_recognize", "sim_corrupt", "tts_generate",
    "CaseValidationError", "ConfigurationError", "EngineError", "TrainingError",
    "XrefError", "EstimatorModel", "extract_features", "fit", "predict", "rank",
    "CaseRecord", "Outcome", "classify_case", "matches", "word_error_rate",
    "RunReport", "report_render", "run", "append_case", "load_cases", "sweep",
]
