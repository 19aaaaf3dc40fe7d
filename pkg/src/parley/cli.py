"""Command-line entry point: interactive REPL, scripted replay, server,
and report rendering.

Script files drive replay mode: one turn per line, `>` for an utterance,
`!` for input to a running program, `#` for comments.  Replay produces a
deterministic artifact (fixed fake clock, one second per turn) that can be
recorded once and asserted against forever.

Exit codes: 0 success, 1 assertion mismatch, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import difflib
import json
import sys
from pathlib import Path

from . import interpreter as interp
from . import program as prog
from . import telemetry
from .config import Config, ConfigError, load_config
from .engine import Conversation, NoActiveRun, TurnResult

ARTIFACT_VERSION = 1


class ScriptError(Exception):
    pass


def read_script(path: str | Path) -> list:
    """[(kind, text), ...] where kind is 'utterance' or 'exec_input'."""
    turns = []
    for lineno, raw in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith(">"):
            turns.append(("utterance", line[1:].strip()))
        elif line.startswith("!"):
            turns.append(("exec_input", line[1:].strip()))
        else:
            raise ScriptError(f"{path}:{lineno}: lines start with '>', '!', or '#'")
    return turns


def stepped_clock(step_ms: int = 1000):
    state = {"now": -step_ms}

    def now_ms() -> int:
        state["now"] += step_ms
        return state["now"]

    return now_ms


def replay_script(conv: Conversation, turns: list) -> dict:
    """Drive every scripted turn; returns the deterministic artifact."""
    artifact = {
        "format_version": ARTIFACT_VERSION,
        "turns": [],
        "final_program": None,
        "events": [],
    }
    for kind, text in turns:
        if kind == "utterance":
            result = conv.submit_utterance(text)
        else:
            result = conv.submit_exec_input(text)
        events = [interp.event_to_dict(e) for e in result.events()]
        artifact["turns"].append({
            "input": text,
            "kind": kind,
            "responses": [r.text for r in result.responses()],
            "state": conv.state.kind.value,
            "events": events,
        })
        artifact["events"].extend(events)
        for response in result.responses():
            if (response.program_snapshot is not None
                    and response.state_after.value == "home"):
                artifact["final_program"] = json.loads(response.program_snapshot)
    return artifact


def artifact_bytes(artifact: dict) -> bytes:
    return (json.dumps(artifact, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def run_replay(config: Config, script_path: str, assert_path: str | None,
               record_path: str | None, telemetry_path: str | None) -> int:
    try:
        turns = read_script(script_path)
    except FileNotFoundError:
        print(f"script not found: {script_path}", file=sys.stderr)
        return 2
    except ScriptError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    conv = Conversation(config=config, clock=stepped_clock(), session_id="replay")
    try:
        artifact = replay_script(conv, turns)
    except NoActiveRun:
        print("script sent '!' input while no program was running",
              file=sys.stderr)
        return 2
    produced = artifact_bytes(artifact)
    if record_path:
        Path(record_path).write_bytes(produced)
        print(f"recorded {record_path}")
    if telemetry_path:
        rows = [(conv.session_id, conv.started_at_ms, conv.counters)]
        Path(telemetry_path).write_bytes(telemetry.export_csv(rows))
        print(f"wrote {telemetry_path}")
    if assert_path:
        try:
            expected = Path(assert_path).read_bytes()
        except FileNotFoundError:
            print(f"golden not found: {assert_path}", file=sys.stderr)
            return 2
        if produced != expected:
            diff = difflib.unified_diff(
                expected.decode("utf-8").splitlines(keepends=True),
                produced.decode("utf-8").splitlines(keepends=True),
                fromfile=assert_path,
                tofile=f"replay({script_path})",
            )
            sys.stderr.writelines(diff)
            return 1
        print(f"replay matches {assert_path}")
    return 0


def _print_events(result: TurnResult) -> None:
    for event in result.events():
        if isinstance(event, interp.SpeechOut):
            print(f'  parley says: "{event.text}"')
        elif isinstance(event, interp.SoundOut):
            print(f"  parley plays the {event.sound_id} sound")
        elif isinstance(event, interp.InputRequest):
            print("  (the program is listening; type your answer)")


def run_repl(config: Config, telemetry_path: str | None) -> int:
    conv = Conversation(config=config, session_id="repl")
    last_export: bytes | None = None
    print("parley is listening. Say 'create a program' to begin.")
    print("REPL commands: /reset /help /export <path> /quit")
    while True:
        try:
            line = input("you> ").strip()
        except EOFError:
            print()
            break
        except KeyboardInterrupt:
            print()
            break
        if not line:
            continue
        if line == "/quit":
            break
        if line == "/reset":
            result = conv.submit_utterance("reset")
        elif line == "/help":
            result = conv.submit_utterance("help")
        elif line.startswith("/export"):
            parts = line.split(maxsplit=1)
            if len(parts) != 2:
                print("usage: /export <path>")
                continue
            if last_export is None:
                print("no finished program to export yet")
                continue
            Path(parts[1]).write_bytes(last_export)
            print(f"wrote {parts[1]}")
            continue
        elif line.startswith("/"):
            print("REPL commands: /reset /help /export <path> /quit")
            continue
        elif conv.awaiting_exec_input():
            result = conv.submit_exec_input(line)
        else:
            result = conv.submit_utterance(line)
        for response in result.responses():
            print(f"parley> {response.text}")
            if response.program_snapshot is not None:
                listing = prog.export_pseudocode(
                    prog.import_json(response.program_snapshot))
                for listing_line in listing.rstrip("\n").splitlines():
                    print(f"    | {listing_line}")
                if response.state_after.value == "home":
                    last_export = response.program_snapshot
        _print_events(result)
    if telemetry_path:
        rows = [(conv.session_id, conv.started_at_ms, conv.counters)]
        Path(telemetry_path).write_bytes(telemetry.export_csv(rows))
        print(f"wrote {telemetry_path}")
    return 0


def run_report(config: Config, outdir: str, logs: list) -> int:
    from . import report

    if not logs:
        print("--report needs at least one transcript log", file=sys.stderr)
        return 2
    missing = [p for p in logs if not Path(p).is_file()]
    if missing:
        print(f"transcript logs not found: {missing}", file=sys.stderr)
        return 2
    for path in report.write_report(outdir, logs, config):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parley",
        description="Build and run small programs by talking.",
    )
    parser.add_argument("--config", metavar="PATH",
                        help="JSON config file (PARLEY_* env vars override)")
    parser.add_argument("--replay", metavar="SCRIPT",
                        help="replay a script file instead of starting the REPL")
    parser.add_argument("--assert", dest="assert_path", metavar="GOLDEN",
                        help="with --replay: compare the artifact to this file")
    parser.add_argument("--record", metavar="OUT",
                        help="with --replay: write the artifact here")
    parser.add_argument("--export-telemetry", dest="telemetry_path",
                        metavar="CSV", help="write session counters as CSV")
    parser.add_argument("--serve", action="store_true",
                        help="run the WebSocket service")
    parser.add_argument("--static-dir", metavar="DIR",
                        help="with --serve: also serve this directory at /")
    parser.add_argument("--report", metavar="OUTDIR",
                        help="render telemetry CSV and figures from transcript logs")
    parser.add_argument("logs", nargs="*", metavar="TRANSCRIPT",
                        help="JSON-lines transcript logs for --report")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    modes = [bool(args.replay), args.serve, bool(args.report)]
    if sum(modes) > 1:
        parser.error("--replay, --serve, and --report are mutually exclusive")
    if (args.assert_path or args.record) and not args.replay:
        parser.error("--assert/--record require --replay")
    if args.logs and not args.report:
        parser.error("transcript arguments are only used with --report")
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.replay:
        return run_replay(config, args.replay, args.assert_path, args.record,
                          args.telemetry_path)
    if args.serve:
        from . import service

        service.serve(config, static_dir=args.static_dir)
        return 0
    if args.report:
        return run_report(config, args.report, args.logs)
    return run_repl(config, args.telemetry_path)


if __name__ == "__main__":
    sys.exit(main())
