"""Resumable tree-walking interpreter for action-list programs.

Execution never blocks: a run advances until it needs user input, then
parks itself as paused and returns the events produced so far.  resume()
binds the reply and keeps going.  Every condition check, block epilogue,
and atomic action costs one unit of fuel, so any run terminates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .conditions import Condition, CountReached, UntilUserSays, VarEquals
from .program import (Action, CreateVariable, GetUserInput, If, Literal,
                      LoopUntil, PlaySound, Program, RepeatTimes, Say,
                      SetVariable, UserInput, ValueExpr, VariableRef)

DEFAULT_FUEL = 10_000


# -- events -------------------------------------------------------------------

@dataclass(frozen=True)
class SpeechOut:
    text: str


@dataclass(frozen=True)
class SoundOut:
    sound_id: str


@dataclass(frozen=True)
class InputRequest:
    save_as: str | None = None


@dataclass(frozen=True)
class Finished:
    pass


@dataclass(frozen=True)
class ExecError:
    message: str
    path: tuple = ()


ExecutionEvent = Union[SpeechOut, SoundOut, InputRequest, Finished, ExecError]


def event_to_dict(event: ExecutionEvent) -> dict:
    if isinstance(event, SpeechOut):
        return {"kind": "speech_out", "text": event.text}
    if isinstance(event, SoundOut):
        return {"kind": "sound_out", "sound": event.sound_id}
    if isinstance(event, InputRequest):
        return {"kind": "input_request", "save_as": event.save_as}
    if isinstance(event, Finished):
        return {"kind": "finished"}
    if isinstance(event, ExecError):
        return {"kind": "runtime_error", "message": event.message,
                "path": list(event.path)}
    raise TypeError(f"not an event: {event!r}")


class ResumeWhenNotPaused(Exception):
    pass


class _Halt(Exception):
    """Internal unwind for runtime faults; carries the error event."""

    def __init__(self, event: ExecError):
        super().__init__(event.message)
        self.event = event


# -- run state ----------------------------------------------------------------

@dataclass
class _Frame:
    actions: list
    index: int
    path: tuple           # path of the owning block ((), for the program body)
    block: Action | None  # the LoopUntil / RepeatTimes being iterated, if any
    at_top: bool          # True while this iteration's condition check is due


@dataclass
class RunState:
    program: Program
    fuel: int = DEFAULT_FUEL
    variables: dict = field(default_factory=dict)
    last_input: str | None = None
    status: str = "running"  # running | paused | finished | error
    frames: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)  # block path -> done iterations
    pending_save_as: str | None = None

    def cursor_path(self) -> tuple:
        if not self.frames:
            return ()
        return _child_path(self.frames[-1], self.frames[-1].index)


def normalize_input(text: str) -> str:
    return text.strip().lower()


def _child_path(frame: "_Frame", index: int) -> tuple:
    # loop frames key their own path; their children sit under "body"
    if frame.block is not None:
        return frame.path + ("body", index)
    return frame.path + (index,)


def eval_condition(cond: Condition, state: RunState, block_path: tuple = ()) -> bool:
    if isinstance(cond, UntilUserSays):
        said = state.last_input if state.last_input is not None else ""
        return said == normalize_input(cond.word)
    if isinstance(cond, VarEquals):
        if cond.variable not in state.variables:
            raise _Halt(ExecError(
                f"variable '{cond.variable}' has no value", block_path))
        actual = normalize_input(state.variables[cond.variable])
        return actual == normalize_input(cond.literal)
    if isinstance(cond, CountReached):
        return state.counters.get(block_path, 0) >= cond.times
    raise TypeError(f"not a condition: {cond!r}")


def _resolve(expr: ValueExpr, state: RunState, path: tuple) -> str:
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, VariableRef):
        if expr.name not in state.variables:
            raise _Halt(ExecError(f"variable '{expr.name}' has no value", path))
        return state.variables[expr.name]
    if isinstance(expr, UserInput):
        return state.last_input if state.last_input is not None else ""
    raise TypeError(f"not a value expression: {expr!r}")


def _loop_cond(block: Action) -> Condition:
    if isinstance(block, LoopUntil):
        return block.cond
    if isinstance(block, RepeatTimes):
        return CountReached(block.times)
    raise TypeError(f"not a loop block: {block!r}")


def _push_block(state: RunState, action: Action, path: tuple) -> None:
    if isinstance(action, (LoopUntil, RepeatTimes)):
        state.counters[path] = 0  # a re-entered loop starts counting afresh
        state.frames.append(_Frame(action.body, 0, path, action, True))
    else:
        raise TypeError(f"not a block: {action!r}")


def start(program: Program, fuel: int = DEFAULT_FUEL):
    """Begin a run; returns (state, events up to the first pause or end)."""
    state = RunState(program=program, fuel=fuel)
    state.frames.append(_Frame(program.actions, 0, (), None, False))
    return state, _advance(state)


def resume(state: RunState, text: str):
    """Feed the reply a paused run asked for; returns further events."""
    if state.status != "paused":
        raise ResumeWhenNotPaused(f"run is {state.status}, not paused")
    bound = normalize_input(text)
    state.last_input = bound
    if state.pending_save_as:
        state.variables[state.pending_save_as] = bound
    state.pending_save_as = None
    state.status = "running"
    return _advance(state)


def _advance(state: RunState) -> list:
    events: list[ExecutionEvent] = []
    try:
        while True:
            if not state.frames:
                events.append(Finished())
                state.status = "finished"
                return events
            if state.fuel <= 0:
                raise _Halt(ExecError("step budget exhausted", state.cursor_path()))
            state.fuel -= 1
            frame = state.frames[-1]
            if frame.block is not None and frame.at_top:
                # loop condition is checked before every iteration
                if eval_condition(_loop_cond(frame.block), state, frame.path):
                    state.frames.pop()
                else:
                    frame.at_top = False
                    frame.index = 0
                continue
            if frame.index >= len(frame.actions):
                if frame.block is not None:
                    state.counters[frame.path] = state.counters.get(frame.path, 0) + 1
                    frame.at_top = True
                else:
                    state.frames.pop()
                continue
            action = frame.actions[frame.index]
            path = _child_path(frame, frame.index)
            frame.index += 1
            paused = _execute(action, state, path, events)
            if paused:
                return events
    except _Halt as halt:
        events.append(halt.event)
        state.status = "error"
        return events


def _execute(action: Action, state: RunState, path: tuple, events: list) -> bool:
    """Run one atomic action; True means the run paused for input."""
    if isinstance(action, Say):
        events.append(SpeechOut(_resolve(action.text, state, path)))
    elif isinstance(action, PlaySound):
        events.append(SoundOut(action.sound_id))
    elif isinstance(action, GetUserInput):
        events.append(InputRequest(action.save_as))
        state.status = "paused"
        state.pending_save_as = action.save_as
        return True
    elif isinstance(action, CreateVariable):
        state.variables[action.name] = _resolve(action.initial, state, path)
    elif isinstance(action, SetVariable):
        if action.name not in state.variables:
            raise _Halt(ExecError(f"variable '{action.name}' has no value", path))
        state.variables[action.name] = _resolve(action.value, state, path)
    elif isinstance(action, If):
        if eval_condition(action.cond, state, path):
            state.frames.append(_Frame(action.then, 0, path + ("then",), None, False))
        elif action.orelse is not None:
            state.frames.append(_Frame(action.orelse, 0, path + ("else",), None, False))
    elif isinstance(action, (LoopUntil, RepeatTimes)):
        _push_block(state, action, path)
    else:
        raise _Halt(ExecError(f"unrunnable action {type(action).__name__}", path))
    return False
