"""The action-list program representation and its editor.

A program is an ordered list of actions; loops and conditionals hold nested
action lists.  Programs under construction live in a Draft, which carries a
cursor (a stack of open blocks) that editor commands manipulate.  Finalized
programs are validated, serialized to a versioned JSON format, and rendered
to an indented pseudocode listing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Iterable, Union

from .conditions import Condition, CountReached, UntilUserSays, VarEquals

MAX_DEPTH = 32
FORMAT_VERSION = 1

Path_ = tuple  # cursor paths: alternating child indexes and branch names


# -- value expressions ----------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: str


@dataclass(frozen=True)
class VariableRef:
    name: str


@dataclass(frozen=True)
class UserInput:
    pass


ValueExpr = Union[Literal, VariableRef, UserInput]


# -- actions ---------------------------------------------------------------

@dataclass(frozen=True)
class Say:
    text: ValueExpr


@dataclass(frozen=True)
class PlaySound:
    sound_id: str


@dataclass(frozen=True)
class GetUserInput:
    save_as: str | None = None


@dataclass(frozen=True)
class CreateVariable:
    name: str
    initial: ValueExpr


@dataclass(frozen=True)
class SetVariable:
    name: str
    value: ValueExpr


@dataclass
class If:
    cond: Condition
    then: list = field(default_factory=list)
    orelse: list | None = None


@dataclass
class LoopUntil:
    cond: UntilUserSays
    body: list = field(default_factory=list)


@dataclass
class RepeatTimes:
    times: int
    body: list = field(default_factory=list)


Action = Union[Say, PlaySound, GetUserInput, CreateVariable, SetVariable,
               If, LoopUntil, RepeatTimes]

BLOCK_ACTIONS = (If, LoopUntil, RepeatTimes)


@dataclass
class Program:
    name: str
    actions: list = field(default_factory=list)
    created_at: int = field(default=0, compare=False)  # ms since session start


# -- sound catalog ----------------------------------------------------------

def load_sound_catalog(path: str | Path | None = None) -> dict[str, str]:
    """id -> relative audio file path.  Default is the packaged catalog."""
    if path is None:
        text = (
            importlib_resources.files("parley.resources.sounds")
            .joinpath("index.json")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    catalog = json.loads(text)
    if not isinstance(catalog, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in catalog.items()
    ):
        raise ValueError("sound catalog must map sound ids to file paths")
    return catalog


# -- editor commands ---------------------------------------------------------

@dataclass(frozen=True)
class AppendAction:
    action: Action


@dataclass(frozen=True)
class OpenBlock:
    """Open a block action (an If / LoopUntil / RepeatTimes with an empty
    body); subsequent appends land inside it until CloseBlock."""
    action: Action


@dataclass(frozen=True)
class CloseBlock:
    pass


@dataclass(frozen=True)
class OpenElseBlock:
    """Descend into the false branch of the most recently completed
    conditional at the cursor."""
    pass


@dataclass(frozen=True)
class FinalizeProgram:
    pass


@dataclass(frozen=True)
class DiscardDraft:
    pass


EditorCommand = Union[AppendAction, OpenBlock, CloseBlock, OpenElseBlock,
                      FinalizeProgram, DiscardDraft]


class EditError(Exception):
    pass


class NoOpenBlock(EditError):
    pass


class WrongBlockKind(EditError):
    pass


class DepthExceeded(EditError):
    pass


class NameCollision(EditError):
    def __init__(self, name: str):
        super().__init__(f"name already used: {name}")
        self.name = name


class NoElseTarget(EditError):
    pass


class InvalidProgram(EditError):
    def __init__(self, diagnostics: list["Diagnostic"]):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class _OpenFrame:
    action: Action   # the block action being filled
    branch: str      # "body" | "then" | "else"
    path: Path_      # path of the block action


@dataclass
class Draft:
    """A program under construction plus its editing cursor."""

    program: Program
    stack: list = field(default_factory=list)
    variables: set = field(default_factory=set)
    finalized: bool = False

    @property
    def depth(self) -> int:
        return len(self.stack)

    def cursor_list(self) -> list:
        if not self.stack:
            return self.program.actions
        top = self.stack[-1]
        if top.branch == "body":
            return top.action.body
        return top.action.then if top.branch == "then" else top.action.orelse

    def cursor_path(self) -> Path_:
        if not self.stack:
            return ()
        top = self.stack[-1]
        return top.path + (top.branch,)

    def open_block_kind(self) -> str | None:
        """'loop' | 'conditional' | None, for the innermost open block."""
        if not self.stack:
            return None
        action = self.stack[-1].action
        return "conditional" if isinstance(action, If) else "loop"


def new_draft(name: str, created_at: int = 0) -> Draft:
    return Draft(program=Program(name=name, created_at=created_at))


def _subtree_depth(action: Action) -> int:
    if isinstance(action, If):
        branches = [action.then] + ([action.orelse] if action.orelse else [])
        inner = max((_subtree_depth(a) for b in branches for a in b), default=0)
        return 1 + inner
    if isinstance(action, (LoopUntil, RepeatTimes)):
        return 1 + max((_subtree_depth(a) for a in action.body), default=0)
    return 0


def _collect_introductions(action: Action, into: set) -> None:
    if isinstance(action, CreateVariable):
        into.add(action.name)
    elif isinstance(action, GetUserInput) and action.save_as:
        into.add(action.save_as)
    elif isinstance(action, If):
        for branch in (action.then, action.orelse or []):
            for a in branch:
                _collect_introductions(a, into)
    elif isinstance(action, (LoopUntil, RepeatTimes)):
        for a in action.body:
            _collect_introductions(a, into)


def apply(draft: Draft, cmd: EditorCommand) -> Draft:
    """Apply one editor command at the cursor; mutates and returns draft."""
    if isinstance(cmd, AppendAction):
        action = cmd.action
        if draft.depth + _subtree_depth(action) > MAX_DEPTH:
            raise DepthExceeded(f"nesting deeper than {MAX_DEPTH}")
        if isinstance(action, CreateVariable) and action.name in draft.variables:
            raise NameCollision(action.name)
        draft.cursor_list().append(action)
        _collect_introductions(action, draft.variables)
        return draft
    if isinstance(cmd, OpenBlock):
        action = cmd.action
        if not isinstance(action, BLOCK_ACTIONS):
            raise EditError(f"not a block action: {type(action).__name__}")
        if draft.depth + 1 > MAX_DEPTH:
            raise DepthExceeded(f"nesting deeper than {MAX_DEPTH}")
        target = draft.cursor_list()
        path = draft.cursor_path() + (len(target),)
        target.append(action)
        branch = "then" if isinstance(action, If) else "body"
        draft.stack.append(_OpenFrame(action, branch, path))
        return draft
    if isinstance(cmd, CloseBlock):
        if not draft.stack:
            raise NoOpenBlock("no open block to close")
        draft.stack.pop()
        return draft
    if isinstance(cmd, OpenElseBlock):
        target = draft.cursor_list()
        if not target or not isinstance(target[-1], If) or target[-1].orelse is not None:
            raise NoElseTarget("no conditional here to add a false branch to")
        conditional = target[-1]
        conditional.orelse = []
        path = draft.cursor_path() + (len(target) - 1,)
        draft.stack.append(_OpenFrame(conditional, "else", path))
        return draft
    if isinstance(cmd, FinalizeProgram):
        diags = validate(draft)
        if diags:
            raise InvalidProgram(diags)
        draft.finalized = True
        return draft
    if isinstance(cmd, DiscardDraft):
        draft.program.actions.clear()
        draft.stack.clear()
        draft.variables.clear()
        return draft
    raise EditError(f"unknown editor command: {cmd!r}")


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str
    path: Path_
    message: str


def _check_expr(expr: ValueExpr, defined: set, path: Path_, diags: list) -> None:
    if isinstance(expr, VariableRef) and expr.name not in defined:
        diags.append(Diagnostic(
            "undefined_variable", path,
            f"variable '{expr.name}' is used before it is introduced",
        ))


def _check_condition(cond: Condition, defined: set, path: Path_, diags: list) -> None:
    if isinstance(cond, VarEquals):
        if cond.variable not in defined:
            diags.append(Diagnostic(
                "undefined_variable", path,
                f"variable '{cond.variable}' is used before it is introduced",
            ))
        if not cond.variable or not cond.literal:
            diags.append(Diagnostic("empty_value", path, "empty comparison"))
    elif isinstance(cond, UntilUserSays):
        if not cond.word:
            diags.append(Diagnostic("empty_value", path, "empty halting word"))
    elif isinstance(cond, CountReached):
        if cond.times < 1:
            diags.append(Diagnostic("bad_count", path, "count must be at least one"))


def _check_actions(
    actions: Iterable[Action],
    defined: set,
    introduced: set,
    catalog: dict,
    base: Path_,
    depth: int,
    diags: list,
) -> set:
    """Walk one action list; returns the guaranteed-defined set at its end."""
    for i, action in enumerate(actions):
        path = base + (i,)
        if isinstance(action, Say):
            _check_expr(action.text, defined, path, diags)
        elif isinstance(action, PlaySound):
            if action.sound_id not in catalog:
                diags.append(Diagnostic(
                    "unknown_sound", path,
                    f"sound '{action.sound_id}' is not in the catalog",
                ))
        elif isinstance(action, GetUserInput):
            if action.save_as:
                defined.add(action.save_as)
                introduced.add(action.save_as)
        elif isinstance(action, CreateVariable):
            _check_expr(action.initial, defined, path, diags)
            if action.name in introduced:
                diags.append(Diagnostic(
                    "duplicate_variable", path,
                    f"variable '{action.name}' already exists",
                ))
            if not action.name:
                diags.append(Diagnostic("empty_name", path, "variable without a name"))
            defined.add(action.name)
            introduced.add(action.name)
        elif isinstance(action, SetVariable):
            if action.name not in defined:
                diags.append(Diagnostic(
                    "undefined_variable", path,
                    f"variable '{action.name}' is used before it is introduced",
                ))
            _check_expr(action.value, defined, path, diags)
        elif isinstance(action, If):
            if depth + 1 > MAX_DEPTH:
                diags.append(Diagnostic("depth_exceeded", path, "nesting too deep"))
                continue
            _check_condition(action.cond, defined, path, diags)
            then_out = _check_actions(
                action.then, set(defined), set(introduced), catalog,
                path + ("then",), depth + 1, diags,
            )
            if action.orelse is not None:
                else_out = _check_actions(
                    action.orelse, set(defined), set(introduced), catalog,
                    path + ("else",), depth + 1, diags,
                )
                # only names defined on both branches are guaranteed after
                defined |= (then_out & else_out)
        elif isinstance(action, LoopUntil):
            if depth + 1 > MAX_DEPTH:
                diags.append(Diagnostic("depth_exceeded", path, "nesting too deep"))
                continue
            _check_condition(action.cond, defined, path, diags)
            # the body may run zero times, so its introductions don't escape
            _check_actions(
                action.body, set(defined), set(introduced), catalog,
                path + ("body",), depth + 1, diags,
            )
        elif isinstance(action, RepeatTimes):
            if depth + 1 > MAX_DEPTH:
                diags.append(Diagnostic("depth_exceeded", path, "nesting too deep"))
                continue
            if action.times < 1:
                diags.append(Diagnostic("bad_count", path, "count must be at least one"))
            # times >= 1: the first full iteration is guaranteed to run
            body_out = _check_actions(
                action.body, set(defined), set(introduced), catalog,
                path + ("body",), depth + 1, diags,
            )
            defined |= body_out
        else:
            diags.append(Diagnostic("unknown_action", path, f"{action!r}"))
    return defined


def validate(target: Program | Draft, catalog: dict | None = None) -> list:
    """All structural diagnostics for a program (or a draft, which also
    reports its still-open blocks).  Empty list means clean."""
    if catalog is None:
        catalog = load_sound_catalog()
    diags: list[Diagnostic] = []
    open_paths: list[Path_] = []
    if isinstance(target, Draft):
        open_paths = [frame.path for frame in target.stack]
        program = target.program
    else:
        program = target
    for path in open_paths:
        diags.append(Diagnostic(
            "unclosed_block", path, "block was never closed",
        ))
    if not program.name.strip():
        diags.append(Diagnostic("empty_name", (), "program has no name"))
    _check_actions(program.actions, set(), set(), catalog, (), 0, diags)
    return diags


# -- JSON serialization -------------------------------------------------------

class SchemaViolation(Exception):
    def __init__(self, message: str, path: str = "$", offset: int | None = None):
        location = f" at {path}" if path else ""
        suffix = f" (byte offset {offset})" if offset is not None else ""
        super().__init__(f"{message}{location}{suffix}")
        self.path = path
        self.offset = offset


def _expr_to_dict(expr: ValueExpr) -> dict:
    if isinstance(expr, Literal):
        return {"kind": "literal", "value": expr.value}
    if isinstance(expr, VariableRef):
        return {"kind": "variable", "name": expr.name}
    return {"kind": "user_input"}


def _condition_to_dict(cond: Condition) -> dict:
    if isinstance(cond, UntilUserSays):
        return {"kind": "until_user_says", "word": cond.word}
    if isinstance(cond, VarEquals):
        return {"kind": "variable_equals", "variable": cond.variable,
                "literal": cond.literal}
    return {"kind": "count_reached", "times": cond.times}


def _action_to_dict(action: Action) -> dict:
    if isinstance(action, Say):
        return {"kind": "say", "text": _expr_to_dict(action.text)}
    if isinstance(action, PlaySound):
        return {"kind": "play_sound", "sound": action.sound_id}
    if isinstance(action, GetUserInput):
        return {"kind": "get_user_input", "save_as": action.save_as}
    if isinstance(action, CreateVariable):
        return {"kind": "create_variable", "name": action.name,
                "initial": _expr_to_dict(action.initial)}
    if isinstance(action, SetVariable):
        return {"kind": "set_variable", "name": action.name,
                "value": _expr_to_dict(action.value)}
    if isinstance(action, If):
        return {
            "kind": "if",
            "condition": _condition_to_dict(action.cond),
            "then": [_action_to_dict(a) for a in action.then],
            "else": None if action.orelse is None
                    else [_action_to_dict(a) for a in action.orelse],
        }
    if isinstance(action, LoopUntil):
        return {"kind": "loop_until", "condition": _condition_to_dict(action.cond),
                "body": [_action_to_dict(a) for a in action.body]}
    if isinstance(action, RepeatTimes):
        return {"kind": "repeat_times", "times": action.times,
                "body": [_action_to_dict(a) for a in action.body]}
    raise TypeError(f"not an action: {action!r}")


def program_to_dict(program: Program) -> dict:
    """The JSON document form (snapshots use this without validating)."""
    return {
        "format_version": FORMAT_VERSION,
        "name": program.name,
        "actions": [_action_to_dict(a) for a in program.actions],
    }


def snapshot_json(program: Program) -> bytes:
    """The export byte format without the validation gate; drafts use this
    so the client can render half-built programs."""
    doc = program_to_dict(program)
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def export_json(program: Program, catalog: dict | None = None) -> bytes:
    """Serialize a clean program to the documented JSON format."""
    diags = validate(program, catalog)
    if diags:
        raise InvalidProgram(diags)
    return snapshot_json(program)


def _need(obj: dict, key: str, types, path: str):
    if key not in obj:
        raise SchemaViolation(f"missing field '{key}'", path)
    value = obj[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaViolation(f"field '{key}' has the wrong type", f"{path}.{key}")
    return value


_EXPR_KEYS = {
    "literal": {"kind", "value"},
    "variable": {"kind", "name"},
    "user_input": {"kind"},
}


def _expr_from_dict(obj, path: str) -> ValueExpr:
    if not isinstance(obj, dict):
        raise SchemaViolation("expected a value expression object", path)
    kind = _need(obj, "kind", str, path)
    if kind not in _EXPR_KEYS:
        raise SchemaViolation(f"unknown value kind '{kind}'", f"{path}.kind")
    extra = set(obj) - _EXPR_KEYS[kind]
    if extra:
        raise SchemaViolation(f"unexpected fields {sorted(extra)}", path)
    if kind == "literal":
        return Literal(_need(obj, "value", str, path))
    if kind == "variable":
        return VariableRef(_need(obj, "name", str, path))
    return UserInput()


def _condition_from_dict(obj, path: str) -> Condition:
    if not isinstance(obj, dict):
        raise SchemaViolation("expected a condition object", path)
    kind = _need(obj, "kind", str, path)
    if kind == "until_user_says":
        return UntilUserSays(_need(obj, "word", str, path))
    if kind == "variable_equals":
        return VarEquals(_need(obj, "variable", str, path),
                         _need(obj, "literal", str, path))
    if kind == "count_reached":
        times = _need(obj, "times", int, path)
        if times < 1:
            raise SchemaViolation("times must be at least 1", f"{path}.times")
        return CountReached(times)
    raise SchemaViolation(f"unknown condition kind '{kind}'", f"{path}.kind")


def _action_from_dict(obj, path: str) -> Action:
    if not isinstance(obj, dict):
        raise SchemaViolation("expected an action object", path)
    kind = _need(obj, "kind", str, path)
    if kind == "say":
        return Say(_expr_from_dict(_need(obj, "text", dict, path), f"{path}.text"))
    if kind == "play_sound":
        return PlaySound(_need(obj, "sound", str, path))
    if kind == "get_user_input":
        save_as = obj.get("save_as")
        if save_as is not None and not isinstance(save_as, str):
            raise SchemaViolation("field 'save_as' has the wrong type", f"{path}.save_as")
        return GetUserInput(save_as)
    if kind == "create_variable":
        return CreateVariable(
            _need(obj, "name", str, path),
            _expr_from_dict(_need(obj, "initial", dict, path), f"{path}.initial"),
        )
    if kind == "set_variable":
        return SetVariable(
            _need(obj, "name", str, path),
            _expr_from_dict(_need(obj, "value", dict, path), f"{path}.value"),
        )
    if kind == "if":
        cond = _condition_from_dict(_need(obj, "condition", dict, path),
                                    f"{path}.condition")
        then = _actions_from_list(_need(obj, "then", list, path), f"{path}.then")
        orelse_raw = obj.get("else")
        orelse = None
        if orelse_raw is not None:
            if not isinstance(orelse_raw, list):
                raise SchemaViolation("field 'else' has the wrong type", f"{path}.else")
            orelse = _actions_from_list(orelse_raw, f"{path}.else")
        return If(cond, then, orelse)
    if kind == "loop_until":
        cond = _condition_from_dict(_need(obj, "condition", dict, path),
                                    f"{path}.condition")
        if not isinstance(cond, UntilUserSays):
            raise SchemaViolation("loops halt on an until_user_says condition",
                                  f"{path}.condition")
        return LoopUntil(cond, _actions_from_list(_need(obj, "body", list, path),
                                                  f"{path}.body"))
    if kind == "repeat_times":
        times = _need(obj, "times", int, path)
        if times < 1:
            raise SchemaViolation("times must be at least 1", f"{path}.times")
        return RepeatTimes(times, _actions_from_list(_need(obj, "body", list, path),
                                                     f"{path}.body"))
    raise SchemaViolation(f"unknown action kind '{kind}'", f"{path}.kind")


def _actions_from_list(items: list, path: str) -> list:
    return [_action_from_dict(item, f"{path}[{i}]") for i, item in enumerate(items)]


def import_json(data: bytes | str) -> Program:
    """Parse the documented JSON format back into a Program.
    import_json(export_json(p)) is structurally equal to p."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"not valid JSON: {exc.msg}", "$", exc.pos) from None
    if not isinstance(doc, dict):
        raise SchemaViolation("top level must be an object")
    version = _need(doc, "format_version", int, "$")
    if version != FORMAT_VERSION:
        raise SchemaViolation(f"unsupported format_version {version}", "$.format_version")
    name = _need(doc, "name", str, "$")
    actions = _actions_from_list(_need(doc, "actions", list, "$"), "$.actions")
    return Program(name=name, actions=actions)


# -- pseudocode ---------------------------------------------------------------

def _expr_text(expr: ValueExpr) -> str:
    if isinstance(expr, Literal):
        return json.dumps(expr.value, ensure_ascii=False)
    if isinstance(expr, VariableRef):
        return f"the value of {expr.name}"
    return "the user input"


def _action_lines(action: Action, indent: int, out: list) -> None:
    pad = "  " * indent
    if isinstance(action, Say):
        out.append(f"{pad}say {_expr_text(action.text)}")
    elif isinstance(action, PlaySound):
        out.append(f"{pad}play the {action.sound_id} sound")
    elif isinstance(action, GetUserInput):
        suffix = f" and save it as {action.save_as}" if action.save_as else ""
        out.append(f"{pad}get user input{suffix}")
    elif isinstance(action, CreateVariable):
        out.append(f"{pad}create variable {action.name} = {_expr_text(action.initial)}")
    elif isinstance(action, SetVariable):
        out.append(f"{pad}set {action.name} to {_expr_text(action.value)}")
    elif isinstance(action, If):
        out.append(f"{pad}if {_cond_text(action.cond)}")
        for a in action.then:
            _action_lines(a, indent + 1, out)
        if action.orelse is not None:
            out.append(f"{pad}otherwise")
            for a in action.orelse:
                _action_lines(a, indent + 1, out)
    elif isinstance(action, LoopUntil):
        out.append(f"{pad}loop until you say {json.dumps(action.cond.word, ensure_ascii=False)}")
        for a in action.body:
            _action_lines(a, indent + 1, out)
    elif isinstance(action, RepeatTimes):
        out.append(f"{pad}repeat {action.times} times")
        for a in action.body:
            _action_lines(a, indent + 1, out)


def _cond_text(cond: Condition) -> str:
    if isinstance(cond, VarEquals):
        return f"{cond.variable} is {json.dumps(cond.literal, ensure_ascii=False)}"
    if isinstance(cond, UntilUserSays):
        return f"you said {json.dumps(cond.word, ensure_ascii=False)}"
    return f"the count reached {cond.times}"


def export_pseudocode(program: Program) -> str:
    """Deterministic indented listing; one line per atomic action."""
    lines = [f"program {program.name}"]
    for action in program.actions:
        _action_lines(action, 1, lines)
    return "\n".join(lines) + "\n"


def clone_program(program: Program) -> Program:
    """Deep, structurally equal copy (drafts mutate lists in place)."""
    return import_json_doc(program_to_dict(program))


def import_json_doc(doc: dict) -> Program:
    name = _need(doc, "name", str, "$")
    actions = _actions_from_list(_need(doc, "actions", list, "$"), "$.actions")
    return Program(name=name, actions=actions)
