"""The run driver: budgeted iterations over a prioritized text pool.

Each iteration draws a visibility-sized candidate pool, optionally ranks it
with the failure estimator (trained from scratch on everything judged so
far), and processes texts one at a time: synthesize audio, transcribe with
every recognizer, classify. Cases are atomic: when the budget runs out
mid-case, the case finishes and the overrun stays charged to that
iteration. Chunking controls what happens to unprocessed pool texts:
dynamic carries them into the next iteration's pool, static discards them.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .clock import make_clock
from .config import RunConfig
from .corpus import CorpusEntry, load_corpus
from .engines import (BUILTIN_ESTIMATOR, AudioRef, EngineDescriptor,
                      EngineRegistry, Transcription, asr_recognize, tts_generate)
from .errors import ConfigurationError, EngineError, TrainingError
from .estimator import BuiltinEstimator, ExternalEstimator
from .oracle import CaseRecord, Outcome, judge_all
from .report import IterationRow, RunReport
from .store import ArtifactStore, CacheKey, CaseWriter

__all__ = ["RunState", "run", "next_pool", "build_registry"]

log = logging.getLogger(__name__)


@dataclass
class RunState:
    """Mutable progress of one run."""

    pending: list[CorpusEntry]
    batches: list[list[CorpusEntry]] | None  # static chunking only
    failed: list[CaseRecord] = field(default_factory=list)
    others: list[CaseRecord] = field(default_factory=list)
    processed: set[int] = field(default_factory=set)
    errored: int = 0
    iteration: int = 0


def next_pool(state: RunState, config: RunConfig) -> list[CorpusEntry]:
    """Candidate texts for the current iteration (state.iteration, 1-based)."""
    if config.chunking == "static":
        i = state.iteration - 1
        return list(state.batches[i]) if i < len(state.batches) else []
    return state.pending[:config.text_batch_size]


def build_registry(config: RunConfig) -> EngineRegistry:
    registry = EngineRegistry()
    registry.adapter_timeout = config.adapter_timeout
    for desc in config.engines:
        registry.register(desc)
    return registry


class _Runner:
    def __init__(self, config: RunConfig, registry: EngineRegistry,
                 store: ArtifactStore | None = None):
        self.config = config
        self.registry = registry
        self.notes: list[str] = []
        self.tts = registry.require(config.tts, "tts")
        self.asrs = [registry.require(name, "asr") for name in config.asrs]
        self.clock = make_clock(config.clock)
        self.store = store if store is not None else ArtifactStore(
            config.output_dir, recompute=config.recompute)
        self.workers = config.workers
        if self.workers > 1 and config.clock == "virtual":
            self.workers = 1
            self.notes.append("virtual clock forces sequential engine calls; "
                              "workers clamped to 1")
        self.estimator = self._make_estimator()

    def _make_estimator(self):
        name = self.config.estimator
        if name == "none":
            return None
        desc = self.registry.require(name, "estimator")
        if desc.backend == "external":
            return ExternalEstimator(self.registry.adapter_for(desc))
        return BuiltinEstimator()

    # -- per-case engine pipeline -------------------------------------------

    def _synthesize(self, entry: CorpusEntry) -> AudioRef:
        self.clock.charge(self.tts.virtual_cost)
        key = CacheKey(self.tts.name, entry.index, "audio")

        def produce(_path):
            adapter = (self.registry.adapter_for(self.tts)
                       if self.tts.backend == "external" else None)
            return tts_generate(self.tts, entry, self.store.cache_root(),
                                adapter=adapter)

        return self.store.get_or_compute_audio(key, produce)

    def _transcribe_one(self, asr: EngineDescriptor, audio: AudioRef) -> Transcription:
        if not audio.valid:
            return Transcription(asr_name=asr.name, text_index=audio.text_index, raw="")

        def produce() -> str:
            adapter = (self.registry.adapter_for(asr)
                       if asr.backend == "external" else None)
            return asr_recognize(asr, audio, adapter=adapter).raw

        if not self.config.cache_transcriptions:
            raw = produce()
        else:
            key = CacheKey(asr.name, audio.text_index, "transcription")
            raw = self.store.get_or_compute_text(key, produce)
        return Transcription(asr_name=asr.name, text_index=audio.text_index, raw=raw)

    def _transcribe_all(self, audio: AudioRef) -> dict[str, Transcription]:
        # costs are charged up front in recognizer order so accounting does
        # not depend on completion order under the worker pool
        for asr in self.asrs:
            self.clock.charge(asr.virtual_cost)
        if self.workers > 1 and len(self.asrs) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(self._transcribe_one, asr, audio)
                           for asr in self.asrs]
            results = [f.result() for f in futures]
        else:
            results = [self._transcribe_one(asr, audio) for asr in self.asrs]
        return {t.asr_name: t for t in results}

    def _process_case(self, entry: CorpusEntry, iteration: int,
                      iter_start: float) -> CaseRecord:
        audio = self._synthesize(entry)
        transcriptions = self._transcribe_all(audio)
        outcomes = judge_all(entry, transcriptions)
        return CaseRecord(entry=entry, audio=audio, transcriptions=transcriptions,
                          outcomes=outcomes, iteration=iteration,
                          clock_time=self.clock.now() - iter_start)

    # -- iteration loop -------------------------------------------------------

    def _ranked_pool(self, pool: list[CorpusEntry],
                     iteration: int) -> list[CorpusEntry]:
        if self.estimator is None or iteration < 2:
            return pool
        try:
            self.estimator.fit_cases(self.failed_cases, self.other_cases)
            self.clock.charge(self.config.estimator_train_cost)
            return self.estimator.rank_entries(pool)
        except (TrainingError, EngineError) as exc:
            self.notes.append(f"iteration {iteration}: estimator unavailable, "
                              f"falling back to pool order ({exc})")
            return pool

    def run(self) -> RunReport:
        config = self.config
        entries = load_corpus(config.corpus, sample_size=config.sample_size,
                              seed=config.seed)
        visibility = config.text_batch_size
        if visibility > len(entries) and entries:
            self.notes.append(f"text_batch_size {visibility} exceeds corpus size "
                              f"{len(entries)}; clamped")
            visibility = len(entries)
        config = config.replace(text_batch_size=max(visibility, 1))

        batches = None
        if config.chunking == "static":
            batches = [entries[i:i + config.text_batch_size]
                       for i in range(0, len(entries), config.text_batch_size)]
        state = RunState(pending=list(entries), batches=batches)
        self.failed_cases = state.failed
        self.other_cases = state.others

        run_dir = self.store.new_run_dir()
        rows: list[IterationRow] = []

        with CaseWriter(run_dir) as case_writer:
            for iteration in range(1, config.num_iteration + 1):
                state.iteration = iteration
                iter_start = self.clock.start_iteration()
                pool = next_pool(state, config)
                if not pool:
                    self.notes.append(f"corpus exhausted; run ended after iteration "
                                      f"{iteration - 1} of {config.num_iteration}")
                    break
                pool = self._ranked_pool(pool, iteration)

                counts = {Outcome.SUCCESS: 0, Outcome.FAILED: 0,
                          Outcome.INDETERMINATE: 0}
                errors = 0
                done = 0
                for entry in pool:
                    if self.clock.now() - iter_start >= config.time_budget:
                        break
                    try:
                        record = self._process_case(entry, iteration, iter_start)
                    except EngineError as exc:
                        errors += 1
                        self.notes.append(f"iteration {iteration}: engine error on "
                                          f"text {entry.index}: {exc}")
                        log.warning("engine error on text %d: %s", entry.index, exc)
                    else:
                        counts[record.outcomes[config.target_asr]] += 1
                        target = state.failed if (record.outcomes[config.target_asr]
                                                  is Outcome.FAILED) else state.others
                        target.append(record)
                        case_writer.append(record)
                    state.processed.add(entry.index)
                    done += 1

                if config.chunking == "dynamic":
                    state.pending = pool[done:] + state.pending[len(pool):]
                rows.append(IterationRow(
                    iteration=iteration,
                    cases_processed=done,
                    failed=counts[Outcome.FAILED],
                    success=counts[Outcome.SUCCESS],
                    indeterminate=counts[Outcome.INDETERMINATE],
                    engine_errors=errors,
                    clock_used=self.clock.now() - iter_start,
                ))
                state.errored += errors

        per_asr_failed = {name: 0 for name in config.asrs}
        for record in state.failed + state.others:
            for name, outcome in record.outcomes.items():
                if outcome is Outcome.FAILED:
                    per_asr_failed[name] += 1

        return RunReport(rows=rows, per_asr_failed=per_asr_failed,
                         config=self.config.echo(), seed=config.seed,
                         notes=self.notes, run_dir=run_dir)


def run(config: RunConfig, registry: EngineRegistry | None = None,
        store: ArtifactStore | None = None) -> RunReport:
    """Execute a full run; builds (and closes) a registry unless given one."""
    if config.target_asr not in config.asrs:
        raise ConfigurationError(
            f"target_asr {config.target_asr!r} is not in asrs {list(config.asrs)}")
    owned = registry is None
    if owned:
        registry = build_registry(config)
    try:
        return _Runner(config, registry, store=store).run()
    finally:
        if owned:
            registry.close()
