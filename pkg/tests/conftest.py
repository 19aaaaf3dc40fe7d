import pytest

from parley import interpreter as interp
from parley.config import Config
from parley.engine import Conversation
from parley.grammar import Grammar
from parley.store import ProgramStore


@pytest.fixture(scope="session")
def grammar():
    return Grammar.load()


def stepped_clock(step_ms: int = 1000):
    state = {"now": -step_ms}

    def now_ms():
        state["now"] += step_ms
        return state["now"]

    return now_ms


@pytest.fixture
def make_conversation(grammar):
    def factory(config: Config | None = None, store: ProgramStore | None = None,
                session_id: str = "test"):
        return Conversation(
            config=config or Config(),
            store=store if store is not None else ProgramStore(),
            grammar=grammar,
            clock=stepped_clock(),
            session_id=session_id,
        )
    return factory


def event_tuples(events) -> list:
    """Interpreter events in the reference evaluator's tuple shape."""
    out = []
    for event in events:
        if isinstance(event, interp.SpeechOut):
            out.append(("speech", event.text))
        elif isinstance(event, interp.SoundOut):
            out.append(("sound", event.sound_id))
        elif isinstance(event, interp.InputRequest):
            out.append(("input_request",))
        elif isinstance(event, interp.Finished):
            out.append(("finished",))
        elif isinstance(event, interp.ExecError):
            out.append(("error", event.message))
        else:
            raise TypeError(event)
    return out


def run_to_end(program, inputs, fuel=10**9) -> list:
    """Drive the stepping interpreter over a finite input list; appends the
    same ('stalled',) sentinel the reference evaluator uses."""
    state, events = interp.start(program, fuel)
    out = event_tuples(events)
    queue = list(inputs)
    while state.status == "paused" and queue:
        out.extend(event_tuples(interp.resume(state, queue.pop(0))))
    if state.status == "paused":
        out.append(("stalled",))
    return out


def drive(conv: Conversation, lines) -> list:
    """Submit scripted turns; '!' prefix marks execution input."""
    results = []
    for line in lines:
        if line.startswith("!"):
            results.append(conv.submit_exec_input(line[1:].strip()))
        else:
            results.append(conv.submit_utterance(line))
    return results
