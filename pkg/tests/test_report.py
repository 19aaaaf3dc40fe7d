import csv
import io

from conftest import drive, stepped_clock
from parley.config import Config
from parley.engine import Conversation
from parley.report import replay_counters, write_report
from parley.store import ProgramStore
from parley.telemetry import TranscriptLog, export_csv, read_transcript

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

SESSION_LINES = [
    "what is the weather",        # not understood
    "help",
    "create a program",
    "pets",
    "get user input and save it as animal",
    "if animal is dog, play the dog sound",
    "no",
    "done",
    "play pets",
    "!dog",
]


def logged_session(path, session_id="s1"):
    conv = Conversation(config=Config(), store=ProgramStore(),
                        clock=stepped_clock(), session_id=session_id,
                        transcript=TranscriptLog(path))
    drive(conv, SESSION_LINES)
    conv.transcript.close()
    return conv


def test_replayed_counters_match_the_live_session(tmp_path):
    log = tmp_path / "s1.jsonl"
    live = logged_session(log)
    session_id, started_at, counters = replay_counters(read_transcript(log))
    assert session_id == "s1"
    assert started_at == live.started_at_ms
    assert counters == live.counters


def test_write_report_produces_csv_and_figures(tmp_path):
    log = tmp_path / "s1.jsonl"
    live = logged_session(log)
    outdir = tmp_path / "report"
    written = write_report(outdir, [log])
    names = [p.name for p in written]
    assert names == ["telemetry.csv", "counters.png", "utterance_lengths.png"]
    for p in written:
        assert p.exists() and p.stat().st_size > 0
    assert written[1].read_bytes()[:8] == PNG_MAGIC
    assert written[2].read_bytes()[:8] == PNG_MAGIC
    expected_csv = export_csv(
        [(live.session_id, live.started_at_ms, live.counters)])
    assert written[0].read_bytes() == expected_csv


def test_report_merges_multiple_sessions(tmp_path):
    log_a = tmp_path / "a.jsonl"
    log_b = tmp_path / "b.jsonl"
    logged_session(log_a, "alpha")
    logged_session(log_b, "beta")
    written = write_report(tmp_path / "out", [log_a, log_b])
    rows = list(csv.reader(io.StringIO(written[0].read_text(encoding="utf-8"))))
    assert [r[0] for r in rows] == ["session_id", "alpha", "beta"]
    not_understood = rows[0].index("not_understood")
    assert rows[1][not_understood] == "1"
    assert rows[2][not_understood] == "1"
