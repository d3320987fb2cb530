import sys
from pathlib import Path

import pytest

import synth
from asrxref.config import config_from_dict
from asrxref.corpus import CorpusEntry
from asrxref.errors import ConfigurationError
from asrxref.scheduler import RunState, next_pool, run
from asrxref.store import load_cases

FAKE = str(Path(__file__).parent / "fake_adapter.py")


def write_lines(path, texts):
    path.write_text("\n".join(texts) + "\n", encoding="utf-8")


def six_text_config(tmp_path, **overrides):
    corpus = tmp_path / "corpus.txt"
    write_lines(corpus, [f"sample text number {i}" for i in range(6)])
    engines = [synth.sim_tts(cost=1.0),
               synth.sim_asr("target", cost=1.0),
               synth.sim_asr("ref1", cost=1.0)]
    kwargs = dict(num_iteration=2, text_batch_size=6, time_budget=7)
    kwargs.update(overrides)
    return synth.make_config(tmp_path, corpus, engines,
                             asrs=["target", "ref1"], **kwargs)


# -- hand-simulated budget scenarios ------------------------------------------------

def test_dynamic_budget_seven_three_cases_per_iteration(tmp_path):
    # 3 cost units per case, budget 7: cases end at clock 3, 6, 9; the third
    # case starts at 6 < 7 and completes atomically, then 9 >= 7 stops the
    # iteration; the remaining 3 texts carry over
    report = run(six_text_config(tmp_path))
    assert [r.cases_processed for r in report.rows] == [3, 3]
    assert [r.clock_used for r in report.rows] == [9.0, 9.0]
    assert report.totals()["cases_processed"] == 6


def test_static_two_batches_of_three_same_counts(tmp_path):
    report = run(six_text_config(tmp_path, chunking="static", text_batch_size=3))
    assert [r.cases_processed for r in report.rows] == [3, 3]


def test_budget_one_means_one_case_per_iteration(tmp_path):
    report = run(six_text_config(tmp_path, time_budget=1, num_iteration=4))
    assert [r.cases_processed for r in report.rows] == [1, 1, 1, 1]


def test_budget_bound_never_exceeds_budget_plus_one_case(tmp_path):
    case_cost = 3.0
    for budget in (1, 2, 3, 4, 5, 6, 7):
        report = run(six_text_config(tmp_path, time_budget=budget,
                                     output_dir=str(tmp_path / f"out{budget}")))
        for row in report.rows:
            assert row.clock_used <= budget + case_cost


# -- pool selection ------------------------------------------------------------------

def entries(n, start=0):
    return [CorpusEntry(index=i, raw_text=f"t{i}", norm_text=f"t{i}")
            for i in range(start, start + n)]


def pool_config(tmp_path, **overrides):
    return six_text_config(tmp_path, **overrides)


def test_next_pool_dynamic_takes_visibility_prefix(tmp_path):
    config = pool_config(tmp_path, text_batch_size=4)
    state = RunState(pending=entries(7), batches=None)
    state.iteration = 1
    pool = next_pool(state, config)
    assert [e.index for e in pool] == [0, 1, 2, 3]


def test_next_pool_dynamic_smaller_than_visibility(tmp_path):
    config = pool_config(tmp_path, text_batch_size=40)
    state = RunState(pending=entries(3), batches=None)
    state.iteration = 1
    assert len(next_pool(state, config)) == 3


def test_next_pool_static_uses_preassigned_batches(tmp_path):
    config = pool_config(tmp_path, chunking="static", text_batch_size=3)
    batches = [entries(3), entries(3, start=3)]
    state = RunState(pending=[], batches=batches)
    state.iteration = 2
    assert [e.index for e in next_pool(state, config)] == [3, 4, 5]
    state.iteration = 3
    assert next_pool(state, config) == []


def test_dynamic_carry_over_keeps_ranked_order_ahead_of_fresh(tmp_path):
    # visibility 2, budget lets exactly 1 case through per iteration; with no
    # estimator the carried text must lead the next pool
    corpus = tmp_path / "corpus.txt"
    write_lines(corpus, [f"unique text {i}" for i in range(4)])
    engines = [synth.sim_tts(cost=1.0), synth.sim_asr("target", cost=1.0),
               synth.sim_asr("ref1", cost=1.0)]
    config = synth.make_config(tmp_path, corpus, engines,
                               asrs=["target", "ref1"], num_iteration=4,
                               text_batch_size=2, time_budget=1)
    report = run(config)
    cases = load_cases(report.run_dir)
    assert [c.entry.index for c in cases] == [0, 1, 2, 3]


# -- bookkeeping invariants ------------------------------------------------------------

def test_no_duplicate_processing_and_conservation(tmp_path):
    corpus = tmp_path / "corpus.txt"
    synth.write_corpus(corpus, 30, trigger_rate=0.3, seed=9)
    config = synth.make_config(tmp_path, corpus,
                               synth.trigger_target_engines(),
                               asrs=["target", "ref1"], num_iteration=8,
                               text_batch_size=10, time_budget=9)
    report = run(config)
    cases = load_cases(report.run_dir)
    indices = [c.entry.index for c in cases]
    assert len(indices) == len(set(indices))
    assert report.totals()["cases_processed"] == len(cases)
    # dynamic conservation: processed after all iterations + never-offered = corpus
    assert report.totals()["cases_processed"] <= 30


def test_report_invariants_and_per_asr_counts(tmp_path):
    corpus = tmp_path / "corpus.txt"
    trigger_slots = synth.write_corpus(corpus, 20, trigger_rate=0.3, seed=4)
    config = synth.make_config(tmp_path, corpus,
                               synth.trigger_target_engines(),
                               asrs=["target", "ref1"], num_iteration=2,
                               text_batch_size=20, time_budget=1e9)
    report = run(config)
    for row in report.rows:
        assert (row.failed + row.success + row.indeterminate + row.engine_errors
                == row.cases_processed)
    totals = report.totals()
    assert totals["failed"] == report.per_asr_failed["target"]
    assert report.per_asr_failed["ref1"] == 0
    assert totals["failed"] == len(trigger_slots)
    assert totals["cases_processed"] == 20


def test_run_ends_early_when_corpus_exhausted(tmp_path):
    corpus = tmp_path / "corpus.txt"
    write_lines(corpus, [f"short list {i}" for i in range(4)])
    engines = [synth.sim_tts(), synth.sim_asr("target"), synth.sim_asr("ref1")]
    config = synth.make_config(tmp_path, corpus, engines,
                               asrs=["target", "ref1"], num_iteration=3,
                               text_batch_size=4, time_budget=1e9)
    report = run(config)
    assert len(report.rows) == 1
    assert any("exhausted" in n for n in report.notes)


def test_static_discards_unprocessed_batch_texts(tmp_path):
    config = six_text_config(tmp_path, chunking="static", text_batch_size=6,
                             time_budget=3, num_iteration=3)
    report = run(config)
    # one batch of six; the budget admits one case, the rest are discarded
    assert [r.cases_processed for r in report.rows] == [1]
    assert any("exhausted" in n for n in report.notes)


def test_visibility_clamped_with_note(tmp_path):
    config = six_text_config(tmp_path, text_batch_size=500)
    report = run(config)
    assert any("clamped" in n for n in report.notes)


def test_virtual_clock_forces_single_worker(tmp_path):
    config = six_text_config(tmp_path, workers=4)
    report = run(config)
    assert any("workers clamped" in n for n in report.notes)


def test_wall_clock_with_worker_pool(tmp_path):
    config = six_text_config(tmp_path, clock="wall", workers=3, time_budget=60)
    report = run(config)
    assert report.totals()["cases_processed"] == 6
    assert report.totals()["failed"] == 0


def test_deterministic_repeat_gives_identical_rows(tmp_path):
    first = run(six_text_config(tmp_path))
    second = run(six_text_config(tmp_path))
    assert first.rows == second.rows
    assert first.per_asr_failed == second.per_asr_failed


# -- failure handling -----------------------------------------------------------------

def broken_asr_config(tmp_path, **overrides):
    corpus = tmp_path / "corpus.txt"
    write_lines(corpus, [f"breakable text {i}" for i in range(4)])
    engines = [synth.sim_tts(),
               synth.sim_asr("ref1"),
               {"name": "target", "kind": "asr", "backend": "external",
                "exec": [sys.executable, FAKE, "--kind", "asr", "--mode", "error"]}]
    kwargs = dict(num_iteration=2, text_batch_size=4, time_budget=1e9)
    kwargs.update(overrides)
    return synth.make_config(tmp_path, corpus, engines,
                             asrs=["target", "ref1"], **kwargs)


def test_engine_errors_consume_texts_and_are_counted(tmp_path):
    report = run(broken_asr_config(tmp_path))
    assert report.rows[0].engine_errors == 4
    assert report.rows[0].cases_processed == 4
    assert report.rows[0].failed == 0
    assert report.run_dir is not None and load_cases(report.run_dir) == []


def test_estimator_falls_back_when_nothing_trainable(tmp_path):
    # every case engine-errors, so iteration 2 has no training data
    report = run(broken_asr_config(tmp_path, estimator="builtin-nb",
                                   num_iteration=2, text_batch_size=2))
    assert any("falling back" in n for n in report.notes)


def test_external_estimator_orders_the_pool(tmp_path):
    # the fake estimator scores by text length, so iteration 2 must process
    # the surviving texts longest-first
    corpus = tmp_path / "corpus.txt"
    texts = ["aa", "bbbb", "cccccc", "dd ee ff gg", "h", "iii"]
    write_lines(corpus, texts)
    engines = [synth.sim_tts(), synth.sim_asr("target"), synth.sim_asr("ref1"),
               {"name": "len-est", "kind": "estimator", "backend": "external",
                "exec": [sys.executable, FAKE, "--kind", "estimator"]}]
    config = synth.make_config(tmp_path, corpus, engines,
                               asrs=["target", "ref1"], num_iteration=2,
                               text_batch_size=6, time_budget=7,
                               estimator="len-est")
    report = run(config)
    cases = load_cases(report.run_dir)
    second_iter = [c.entry.raw_text for c in cases if c.iteration == 2]
    lengths = [len(t) for t in second_iter]
    assert lengths == sorted(lengths, reverse=True)
    assert report.totals()["cases_processed"] == 6


def test_unknown_engine_name_rejected(tmp_path):
    config = six_text_config(tmp_path).replace(tts="nonexistent")
    with pytest.raises(ConfigurationError, match="nonexistent"):
        run(config)


def test_estimator_train_cost_counts_toward_budget(tmp_path):
    corpus = tmp_path / "corpus.txt"
    synth.write_corpus(corpus, 12, trigger_rate=0.5, seed=2)
    base = dict(asrs=["target", "ref1"], num_iteration=2, text_batch_size=12,
                time_budget=9, estimator="builtin-nb")
    cheap = synth.make_config(tmp_path, corpus, synth.trigger_target_engines(),
                              output_dir=str(tmp_path / "a"), **base)
    costly = synth.make_config(tmp_path, corpus, synth.trigger_target_engines(),
                               output_dir=str(tmp_path / "b"),
                               estimator_train_cost=6.0, **base)
    r_cheap, r_costly = run(cheap), run(costly)
    # budget 9, 3 per case: clock 3,6,9 admits 3 cases when training is free,
    # but a 6-unit training charge leaves room for a single case (6 -> 9)
    assert r_cheap.rows[1].cases_processed == 3
    assert r_cheap.rows[1].clock_used == 9.0
    assert r_costly.rows[1].cases_processed == 1
    assert r_costly.rows[1].clock_used == 9.0
