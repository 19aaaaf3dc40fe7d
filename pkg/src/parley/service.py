"""JSON-over-WebSocket front door.

One WebSocket connection is one conversation session.  The protocol is
four client message types in, three server message types out:

    client -> server
        {"type": "utterance", "text": str, "modality": "voice" | "text"}
        {"type": "exec_input", "text": str}
        {"type": "reset"}
        {"type": "help"}
    server -> client
        {"type": "agent_response", "text": str, "state": str,
         "program": object (present when the turn changed the program),
         "examples": [str, ...]}
        {"type": "exec_event", "event": {"kind": ..., ...}}
        {"type": "error", "code": str, "message": str}

Every client message gets at least one reply, in causal order.  The
"examples" field carries the sidebar phrases for the state the agent is in
after the reply.  Error codes: bad_json, unknown_type, no_active_run,
capacity.
"""

from __future__ import annotations

import json
import uuid
from importlib import resources as importlib_resources
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from . import interpreter as interp
from .config import Config
from .engine import Conversation, NoActiveRun, TurnResult
from .grammar import Grammar, Modality
from .store import ProgramStore

PROTOCOL_VERSION = 1


def error_message(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def _serialize_turn(conv: Conversation, result: TurnResult) -> list:
    replies = []
    for kind, item in result.items:
        if kind == "response":
            reply = {
                "type": "agent_response",
                "text": item.text,
                "state": item.state_after.value,
                "examples": conv.grammar.list_example_phrases(item.state_after),
            }
            if item.program_snapshot is not None:
                reply["program"] = json.loads(item.program_snapshot)
            replies.append(reply)
        else:
            replies.append({"type": "exec_event",
                            "event": interp.event_to_dict(item)})
    return replies


def dispatch(conv: Conversation, msg: dict) -> list:
    """Route one decoded client message; returns the ordered replies."""
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        return [error_message("bad_json", "message must be an object with a 'type'")]
    msg_type = msg["type"]
    if msg_type == "utterance":
        text = msg.get("text")
        modality = msg.get("modality", "text")
        if not isinstance(text, str) or not text.strip():
            return [error_message("bad_json", "utterance needs non-empty 'text'")]
        if modality not in (Modality.VOICE.value, Modality.TEXT.value):
            return [error_message("bad_json", "modality must be 'voice' or 'text'")]
        return _serialize_turn(conv, conv.submit_utterance(text, modality))
    if msg_type == "exec_input":
        text = msg.get("text")
        if not isinstance(text, str):
            return [error_message("bad_json", "exec_input needs 'text'")]
        try:
            return _serialize_turn(conv, conv.submit_exec_input(text))
        except NoActiveRun:
            return [error_message("no_active_run",
                                  "no program is waiting for input")]
    if msg_type == "reset":
        return _serialize_turn(conv, conv.submit_utterance("reset"))
    if msg_type == "help":
        return _serialize_turn(conv, conv.submit_utterance("help"))
    return [error_message("unknown_type", f"unknown message type {msg_type!r}")]


def create_app(config: Config | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="parley", version="0.1.0")
    app.state.config = config
    app.state.store = ProgramStore(config.program_dir)
    app.state.grammar = Grammar.load(config.grammar_path)
    app.state.session_count = 0
    app.state.sessions_ever = 0

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket):
        await ws.accept()
        if app.state.session_count >= config.max_sessions:
            await ws.send_text(json.dumps(error_message(
                "capacity", "server is at its session limit")))
            await ws.close(code=1013)
            return
        app.state.session_count += 1
        app.state.sessions_ever += 1
        conv = Conversation(
            config=config,
            store=app.state.store,
            grammar=app.state.grammar,
            session_id=uuid.uuid4().hex,
        )
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    replies = [error_message("bad_json", "frame is not valid JSON")]
                else:
                    replies = dispatch(conv, msg)
                for reply in replies:
                    await ws.send_text(json.dumps(reply, ensure_ascii=False))
        except WebSocketDisconnect:
            pass
        finally:
            app.state.session_count -= 1
            # a vanished session must not squat on its program name
            if conv.state.draft is not None:
                app.state.store.release(conv.state.draft.program.name)

    sounds_dir = importlib_resources.files("parley.resources") / "sounds"
    app.mount("/sounds", StaticFiles(directory=str(sounds_dir)), name="sounds")
    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="ui")
    return app


def serve(config: Config, static_dir: str | Path | None = None) -> None:
    import uvicorn

    app = create_app(config, static_dir=static_dir)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
