"""One conversation, end to end.

Conversation wires the parser, dialog manager, interpreter, program store,
and telemetry into a single turn-taking surface.  The terminal REPL and the
WebSocket service both drive this class and nothing else, which is what
keeps their behavior identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import interpreter as interp
from . import program as prog
from . import telemetry
from .config import Config
from .dialog import AgentResponse, AgentState, DialogManager
from .grammar import Grammar, IntentKind, Modality, StateKind, Utterance
from .store import ProgramStore


class NoActiveRun(Exception):
    pass


@dataclass
class TurnResult:
    """What one client message produced, in reply order."""

    items: list = field(default_factory=list)  # ("response", r) | ("event", e)

    def add_response(self, response: AgentResponse) -> None:
        self.items.append(("response", response))

    def add_event(self, event) -> None:
        self.items.append(("event", event))

    def responses(self) -> list:
        return [item for kind, item in self.items if kind == "response"]

    def events(self) -> list:
        return [item for kind, item in self.items if kind == "event"]


def _monotonic_ms_clock():
    origin = time.monotonic()

    def now_ms() -> int:
        return int((time.monotonic() - origin) * 1000)

    return now_ms


class Conversation:
    def __init__(
        self,
        config: Config | None = None,
        store: ProgramStore | None = None,
        grammar: Grammar | None = None,
        dm: DialogManager | None = None,
        clock=None,
        transcript: telemetry.TranscriptLog | None = None,
        session_id: str = "local",
    ):
        self.config = config or Config()
        self.store = store if store is not None else ProgramStore(
            self.config.program_dir)
        self.grammar = grammar or Grammar.load(self.config.grammar_path)
        self.dm = dm or DialogManager(self.grammar, self.store)
        self.clock = clock or _monotonic_ms_clock()
        self.transcript = transcript or telemetry.TranscriptLog()
        self.session_id = session_id
        self.state = AgentState()
        self.counters = telemetry.TelemetryCounters()
        self.run: interp.RunState | None = None
        self.run_name: str | None = None
        self.started_at_ms = self.clock()
        self._goal_started_ms: int | None = None
        self.transcript.append({
            "type": "session_start", "ts_ms": self.started_at_ms,
            "session_id": self.session_id,
        })

    # -- turn surfaces ---------------------------------------------------

    def submit_utterance(self, text: str, modality: str = "text") -> TurnResult:
        ts = self.clock()
        self.transcript.append({
            "type": "utterance", "ts_ms": ts, "modality": modality,
            "text": text,
        })
        telemetry.record(self.counters, "utterance", modality=modality,
                         text=text)
        frame = self.grammar.parse(
            Utterance(text, Modality(modality), ts),
            self.dm.expectation_of(self.state),
        )
        if frame.kind is IntentKind.NOT_UNDERSTOOD:
            telemetry.record(self.counters, "not_understood")
        elif frame.kind is IntentKind.RESET:
            telemetry.record(self.counters, "reset")
        elif frame.kind is IntentKind.ASK_HELP:
            telemetry.record(self.counters, "help_request")

        self.state.now_ms = ts
        had_draft = self.state.draft is not None
        self.state, response, commands = self.dm.handle_turn(self.state, frame)

        if frame.kind is IntentKind.RESET:
            self.run = None
            self.run_name = None
            self._goal_started_ms = None
        if not had_draft and self.state.draft is not None:
            self._goal_started_ms = ts
        if any(isinstance(c, prog.FinalizeProgram) for c in commands):
            if self._goal_started_ms is not None:
                telemetry.record(self.counters, "goal_elapsed",
                                 ms=ts - self._goal_started_ms)
                self._goal_started_ms = None

        result = TurnResult()
        self._log_response(ts, response)
        result.add_response(response)
        if self.state.kind is StateKind.EXECUTING and self.run is None:
            self._start_run(ts, result)
        return result

    def submit_exec_input(self, text: str) -> TurnResult:
        ts = self.clock()
        self.transcript.append({"type": "exec_input", "ts_ms": ts, "text": text})
        if self.run is None:
            raise NoActiveRun("no program is waiting for input")
        result = TurnResult()
        events = interp.resume(self.run, text)
        self._emit_events(ts, events, result)
        self._settle_run(ts, result)
        return result

    # -- internals ----------------------------------------------------------

    def _start_run(self, ts: int, result: TurnResult) -> None:
        program = self.state.run_program
        self.state.run_program = None
        self.run_name = program.name
        self.run, events = interp.start(program, self.config.fuel)
        self._emit_events(ts, events, result)
        self._settle_run(ts, result)

    def _emit_events(self, ts: int, events, result: TurnResult) -> None:
        for event in events:
            self.transcript.append({
                "type": "exec_event", "ts_ms": ts,
                "event": interp.event_to_dict(event),
            })
            result.add_event(event)

    def _settle_run(self, ts: int, result: TurnResult) -> None:
        if self.run is None or self.run.status == "paused":
            return
        name = self.run_name
        status = self.run.status
        failure = None
        if status == "error":
            for kind, item in reversed(result.items):
                if kind == "event" and isinstance(item, interp.ExecError):
                    failure = item.message
                    break
        self.run = None
        self.run_name = None
        self.state.kind = StateKind.HOME
        if status == "error":
            text = self.dm.t("run_failed", name=name,
                             problem=failure or "unknown problem")
        else:
            text = self.dm.t("run_finished", name=name)
        response = AgentResponse(text=text, state_after=self.state.kind)
        self._log_response(ts, response)
        result.add_response(response)

    def _log_response(self, ts: int, response: AgentResponse) -> None:
        self.transcript.append({
            "type": "agent_response", "ts_ms": ts, "text": response.text,
            "state": response.state_after.value,
        })

    # -- conveniences used by both frontends ------------------------------------

    def example_phrases(self) -> list:
        return self.grammar.list_example_phrases(self.state.kind)

    def awaiting_exec_input(self) -> bool:
        return self.run is not None and self.run.status == "paused"
