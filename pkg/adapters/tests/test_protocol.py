import io
import json

from asrxref_adapters.echo import EchoAsr, EchoTts
from asrxref_adapters.protocol import serve


def run_serve(engine, kind, requests):
    stdin = io.StringIO("\n".join(requests) + "\n")
    stdout = io.StringIO()
    serve(engine, kind, stdin=stdin, stdout=stdout)
    return [json.loads(line) for line in stdout.getvalue().splitlines()]


def test_hello_reports_kind():
    replies = run_serve(EchoTts(), "tts", [json.dumps({"id": "0", "op": "hello"})])
    assert replies == [{"id": "0", "ok": True, "kind": "tts"}]


def test_unknown_op_is_refused_not_fatal():
    replies = run_serve(EchoTts(), "tts", [
        json.dumps({"id": "1", "op": "frobnicate"}),
        json.dumps({"id": "2", "op": "hello"}),
    ])
    assert replies[0]["ok"] is False and "unknown op" in replies[0]["error"]
    assert replies[1]["ok"] is True


def test_malformed_line_is_reported_and_loop_continues():
    replies = run_serve(EchoTts(), "tts", [
        "this is not json",
        json.dumps({"id": "2", "op": "hello"}),
    ])
    assert replies[0]["ok"] is False and "malformed" in replies[0]["error"]
    assert replies[1] == {"id": "2", "ok": True, "kind": "tts"}


def test_engine_exception_becomes_ok_false():
    replies = run_serve(EchoAsr(), "asr", [
        json.dumps({"id": "1", "op": "asr", "audio": "/nonexistent/file.wav"}),
        json.dumps({"id": "2", "op": "hello"}),
    ])
    assert replies[0]["ok"] is False
    assert replies[1]["ok"] is True


def test_blank_lines_are_skipped():
    stdin = io.StringIO("\n\n" + json.dumps({"id": "9", "op": "hello"}) + "\n")
    stdout = io.StringIO()
    serve(EchoTts(), "tts", stdin=stdin, stdout=stdout)
    assert len(stdout.getvalue().splitlines()) == 1


def test_echo_tts_then_asr_round_trip(tmp_path):
    out = str(tmp_path / "0.wav")
    tts_replies = run_serve(EchoTts(), "tts", [
        json.dumps({"id": "1", "op": "tts", "text": "Go home now.", "out": out})])
    assert tts_replies[0]["ok"] and tts_replies[0]["audio"] == out
    assert (tmp_path / "0.wav").exists()
    assert (tmp_path / "0.wav.meta.json").exists()
    asr_replies = run_serve(EchoAsr(), "asr", [
        json.dumps({"id": "1", "op": "asr", "audio": out})])
    assert asr_replies[0]["text"] == "Go home now."
