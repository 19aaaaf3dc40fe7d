"""Per-session usage counters and the session transcript log.

Counters mirror what a dialog study would collect: utterance counts per
modality, misunderstandings, resets, help requests, time spent building,
and utterance lengths.  The transcript is an append-only JSON-lines file
(or an in-memory list) holding every turn verbatim.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean

from .grammar import normalize


@dataclass
class TelemetryCounters:
    utterances_voice: int = 0
    utterances_text: int = 0
    not_understood: int = 0
    resets: int = 0
    help_requests: int = 0
    goal_elapsed_ms: int = 0
    char_lengths: list = field(default_factory=list)
    word_lengths: list = field(default_factory=list)

    @property
    def utterances_total(self) -> int:
        return self.utterances_voice + self.utterances_text

    @property
    def chars_mean(self) -> float:
        return fmean(self.char_lengths) if self.char_lengths else 0.0

    @property
    def words_mean(self) -> float:
        return fmean(self.word_lengths) if self.word_lengths else 0.0


def record(counters: TelemetryCounters, event: str, **payload) -> TelemetryCounters:
    """Apply one countable event; mutates and returns the counters."""
    if event == "utterance":
        if payload["modality"] == "voice":
            counters.utterances_voice += 1
        else:
            counters.utterances_text += 1
        normalized = normalize(payload["text"])
        counters.char_lengths.append(len(normalized))
        counters.word_lengths.append(len(normalized.split()))
    elif event == "not_understood":
        counters.not_understood += 1
    elif event == "reset":
        counters.resets += 1
    elif event == "help_request":
        counters.help_requests += 1
    elif event == "goal_elapsed":
        counters.goal_elapsed_ms += payload["ms"]
    else:
        raise ValueError(f"unknown telemetry event: {event}")
    return counters


CSV_COLUMNS = (
    "session_id", "started_at_ms", "utterances_total", "utterances_voice",
    "utterances_text", "not_understood", "resets", "help_requests",
    "goal_elapsed_ms", "chars_mean", "words_mean",
)


def _row(session_id: str, started_at_ms: int, counters: TelemetryCounters) -> list:
    return [
        session_id, started_at_ms, counters.utterances_total,
        counters.utterances_voice, counters.utterances_text,
        counters.not_understood, counters.resets, counters.help_requests,
        counters.goal_elapsed_ms,
        f"{counters.chars_mean:.2f}", f"{counters.words_mean:.2f}",
    ]


def export_csv(sessions) -> bytes:
    """One header row plus one row per (session_id, started_at_ms, counters)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for session_id, started_at_ms, counters in sessions:
        writer.writerow(_row(session_id, started_at_ms, counters))
    return buffer.getvalue().encode("utf-8")


class TranscriptLog:
    """Append-only JSON-lines sink; falls back to memory with no path."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self._records: list[dict] = []
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = self.path.open("a", encoding="utf-8")
        else:
            self._handle = None

    def append(self, record: dict) -> None:
        self._records.append(record)
        if self._handle is not None:
            self._handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._handle.flush()

    def records(self) -> list:
        return list(self._records)

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None


def read_transcript(path: str | Path) -> list:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(json.loads(line))
    return records
