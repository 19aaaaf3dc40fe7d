"""Study-style reporting over recorded transcript logs.

Each JSON-lines transcript is re-driven through a fresh conversation with
its original timestamps, which recomputes the session's counters without
trusting anything but the raw utterances.  The output is one CSV row per
session plus two figures rendered to files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import telemetry
from .config import Config
from .engine import Conversation, NoActiveRun
from .grammar import normalize


def replay_counters(records: list, config: Config | None = None):
    """(session_id, started_at_ms, counters) recomputed from one log."""
    session_id = "unknown"
    timestamps = []
    for record in records:
        if record["type"] == "session_start":
            session_id = record.get("session_id", session_id)
            timestamps.append(record["ts_ms"])
        elif record["type"] in ("utterance", "exec_input"):
            timestamps.append(record["ts_ms"])
    clock_values = iter(timestamps)
    conv = Conversation(config=config or Config(),
                        clock=lambda: next(clock_values, 0),
                        session_id=session_id)
    for record in records:
        if record["type"] == "utterance":
            conv.submit_utterance(record["text"], record.get("modality", "text"))
        elif record["type"] == "exec_input":
            try:
                conv.submit_exec_input(record["text"])
            except NoActiveRun:
                # the original run's program is not in this fresh store;
                # exec inputs carry no counter weight, so skip quietly
                pass
    return session_id, conv.started_at_ms, conv.counters


def _utterance_word_counts(records: list) -> dict:
    counts: dict[str, list] = {"voice": [], "text": []}
    for record in records:
        if record["type"] == "utterance":
            modality = record.get("modality", "text")
            counts.setdefault(modality, []).append(
                len(normalize(record["text"]).split()))
    return counts


def _counters_figure(rows, path: Path) -> None:
    labels = [session_id[:8] for session_id, _, _ in rows]
    families = [
        ("not understood", [c.not_understood for _, _, c in rows]),
        ("resets", [c.resets for _, _, c in rows]),
        ("help requests", [c.help_requests for _, _, c in rows]),
    ]
    positions = range(len(rows))
    width = 0.25
    fig, ax = plt.subplots(figsize=(max(6, 1.5 * len(rows)), 4))
    for offset, (label, values) in enumerate(families):
        xs = [p + (offset - 1) * width for p in positions]
        ax.bar(xs, values, width=width, label=label)
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("count")
    ax.set_title("conversation trouble per session")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _lengths_figure(word_counts: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    upper = max((max(v) for v in word_counts.values() if v), default=1)
    bins = range(1, upper + 2)
    for modality in ("text", "voice"):
        values = word_counts.get(modality, [])
        if values:
            ax.hist(values, bins=bins, alpha=0.6, label=modality)
    ax.set_xlabel("words per utterance")
    ax.set_ylabel("utterances")
    ax.set_title("utterance length by input modality")
    if any(word_counts.values()):
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_report(outdir: str | Path, log_paths: list,
                 config: Config | None = None) -> list:
    """Returns the paths written: telemetry.csv plus two PNG figures."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    merged_counts: dict[str, list] = {"voice": [], "text": []}
    for log_path in log_paths:
        records = telemetry.read_transcript(log_path)
        rows.append(replay_counters(records, config))
        for modality, values in _utterance_word_counts(records).items():
            merged_counts.setdefault(modality, []).extend(values)
    written = []
    csv_path = outdir / "telemetry.csv"
    csv_path.write_bytes(telemetry.export_csv(rows))
    written.append(csv_path)
    counters_path = outdir / "counters.png"
    _counters_figure(rows, counters_path)
    written.append(counters_path)
    lengths_path = outdir / "utterance_lengths.png"
    _lengths_figure(merged_counts, lengths_path)
    written.append(lengths_path)
    return written
