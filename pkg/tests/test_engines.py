import hashlib
import random

import pytest
from hypothesis import given, strategies as st

from asrxref.clock import VirtualClock
from asrxref.corpus import CorpusEntry
from asrxref.engines import (EngineDescriptor, EngineRegistry, SimModel,
                             asr_recognize, call_rng, distractor_token,
                             sim_corrupt, tts_generate)
from asrxref.errors import ConfigurationError


def sim_tts_desc(name="sim-tts", invalid=0.0, seed=0, cost=1.0):
    return EngineDescriptor(name=name, kind="tts", backend="simulated",
                            sim=SimModel(invalid_audio_rate=invalid, rng_seed=seed),
                            virtual_cost=cost)


def sim_asr_desc(name="sim-asr", p_sub=0.0, p_del=0.0, triggers=(), seed=0, cost=1.0):
    return EngineDescriptor(name=name, kind="asr", backend="simulated",
                            sim=SimModel(p_sub=p_sub, p_del=p_del,
                                         trigger_tokens=frozenset(triggers),
                                         rng_seed=seed),
                            virtual_cost=cost)


def entry(text, index=0):
    return CorpusEntry(index=index, raw_text=text, norm_text=text)


# -- sim_corrupt -----------------------------------------------------------------

def reference_corrupt(words, p_sub, p_del, triggers, rng):
    """Independent re-statement of the documented draw order."""
    def ref_distractor(w):
        d = "w" + hashlib.blake2b(w.encode(), digest_size=4).hexdigest()
        return d if d != w else d + "x"

    out = []
    for w in words:
        if w in triggers:
            out.append(ref_distractor(w))
            continue
        if rng.random() < p_del:
            continue
        if rng.random() < p_sub:
            out.append(ref_distractor(w))
        else:
            out.append(w)
    return out


def test_corrupt_zero_noise_is_identity():
    model = SimModel()
    words = "keep every single word".split()
    assert sim_corrupt(words, model, random.Random(1)) == words


def test_corrupt_certain_deletion_empties():
    model = SimModel(p_del=1.0)
    assert sim_corrupt("a b c".split(), model, random.Random(1)) == []


def test_corrupt_golden_draw_order():
    # recorded from the reference draw-order procedure with seed 7
    model = SimModel(p_sub=0.3)
    got = sim_corrupt("a b c d".split(), model, random.Random(7))
    assert got == ["wca234c55", "wfd9d3f51", "c", "d"]
    assert got == reference_corrupt("a b c d".split(), 0.3, 0.0, set(),
                                    random.Random(7))


@given(st.lists(st.sampled_from("the cat sat on mat zebra".split()), max_size=10),
       st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**32))
def test_corrupt_matches_reference(words, p_sub, p_del, seed):
    model = SimModel(p_sub=p_sub, p_del=p_del, trigger_tokens=frozenset({"zebra"}))
    got = sim_corrupt(words, model, random.Random(seed))
    want = reference_corrupt(words, p_sub, p_del, {"zebra"}, random.Random(seed))
    assert got == want


@given(st.text(min_size=1, max_size=20))
def test_distractor_never_equals_original(token):
    assert distractor_token(token) != token


# -- tts_generate ------------------------------------------------------------------

def test_tts_writes_wav_under_engine_namespace(tmp_path):
    ref = tts_generate(sim_tts_desc(), entry("go home", 3), tmp_path)
    assert ref.valid
    assert ref.path == tmp_path / "sim-tts" / "audio" / "3.wav"
    assert ref.path.exists()
    assert ref.duration_s > 0
    assert ref.text_index == 3


def test_tts_certain_invalidity(tmp_path):
    ref = tts_generate(sim_tts_desc(invalid=1.0), entry("go home", 0), tmp_path)
    assert not ref.valid


def test_tts_deterministic_bytes_and_flags(tmp_path):
    desc = sim_tts_desc(invalid=0.5, seed=11)
    flags, contents = [], []
    for sub in ("one", "two"):
        out = tmp_path / sub
        refs = [tts_generate(desc, entry(f"text {i}", i), out) for i in range(8)]
        flags.append([r.valid for r in refs])
        contents.append([r.path.read_bytes() for r in refs])
    assert flags[0] == flags[1]
    assert contents[0] == contents[1]
    assert True in flags[0] and False in flags[0]


def test_tts_charges_virtual_cost(tmp_path):
    clock = VirtualClock()
    tts_generate(sim_tts_desc(cost=2.5), entry("go", 0), tmp_path, clock=clock)
    assert clock.now() == 2.5


def test_tts_rejects_non_tts_engine(tmp_path):
    with pytest.raises(ConfigurationError):
        tts_generate(sim_asr_desc(), entry("go", 0), tmp_path)


# -- asr_recognize ----------------------------------------------------------------

def test_asr_noiseless_channel_is_identity(tmp_path):
    audio = tts_generate(sim_tts_desc(), entry("good morning", 0), tmp_path)
    t = asr_recognize(sim_asr_desc(), audio)
    assert t.raw == "good morning"
    assert t.norm == "good morning"


def test_asr_invalid_audio_gives_empty(tmp_path):
    audio = tts_generate(sim_tts_desc(invalid=1.0), entry("good morning", 0),
                         tmp_path)
    clock = VirtualClock()
    t = asr_recognize(sim_asr_desc(cost=3.0), audio, clock=clock)
    assert t.raw == ""
    assert clock.now() == 3.0  # the attempt still costs time


def test_asr_trigger_substitution(tmp_path):
    audio = tts_generate(sim_tts_desc(), entry("the zebra ran", 5), tmp_path)
    t = asr_recognize(sim_asr_desc(triggers=("zebra",)), audio)
    words = t.raw.split()
    assert words[0] == "the" and words[2] == "ran"
    expected = "w" + hashlib.blake2b(b"zebra", digest_size=4).hexdigest()
    assert words[1] == expected != "zebra"


def test_asr_normalizes_raw_tts_text(tmp_path):
    audio = tts_generate(sim_tts_desc(), entry("Hello, World!", 0), tmp_path)
    t = asr_recognize(sim_asr_desc(), audio)
    assert t.norm == "hello world"


def test_asr_deterministic_per_engine_and_text(tmp_path):
    audio = tts_generate(sim_tts_desc(), entry("one two three four five", 9),
                         tmp_path)
    noisy = sim_asr_desc(name="noisy", p_sub=0.5, seed=3)
    assert asr_recognize(noisy, audio).raw == asr_recognize(noisy, audio).raw
    other = sim_asr_desc(name="other", p_sub=0.5, seed=3)
    # same params, different name: independent stream
    assert call_rng(3, "noisy", 9).random() != call_rng(3, "other", 9).random()


# -- descriptors and registry -----------------------------------------------------

def test_descriptor_validation():
    with pytest.raises(ConfigurationError):
        EngineDescriptor(name="", kind="tts", backend="simulated", sim=SimModel())
    with pytest.raises(ConfigurationError):
        EngineDescriptor(name="x", kind="tts", backend="simulated")  # sim missing
    with pytest.raises(ConfigurationError):
        EngineDescriptor(name="x", kind="asr", backend="external")  # exec missing
    with pytest.raises(ConfigurationError):
        EngineDescriptor(name="x", kind="tts", backend="simulated",
                         sim=SimModel(), exec_=("cmd",))
    with pytest.raises(ConfigurationError):
        SimModel(p_sub=1.5)


def test_registry_enforces_unique_names():
    reg = EngineRegistry()
    reg.register(sim_tts_desc("a-tts"))
    with pytest.raises(ConfigurationError):
        reg.register(sim_asr_desc("a-tts"))
    with pytest.raises(ConfigurationError):
        reg.require("missing", "tts")
    with pytest.raises(ConfigurationError):
        reg.require("a-tts", "asr")
    assert reg.require("a-tts", "tts").name == "a-tts"


def test_two_engines_never_share_paths(tmp_path):
    a = tts_generate(sim_tts_desc("tts-a"), entry("go", 4), tmp_path)
    b = tts_generate(sim_tts_desc("tts-b"), entry("go", 4), tmp_path)
    assert a.path != b.path
