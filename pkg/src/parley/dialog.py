"""Finite-state dialog manager.

Turns are a pure-ish function of (agent state, intent frame): every turn
yields exactly one response, possibly some editor commands (already applied
to the session's draft), and the successor state.  Missing required slots
put the manager into a slot-filling goal; answers fill one slot per turn.
The response wording all lives in resources/responses.txt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path

from . import program as prog
from .conditions import (BadConditionSlot, CountReached, UntilUserSays,
                         VarEquals, condition_from_slot, describe)
from .grammar import (Expectation, Grammar, IntentFrame, IntentKind,
                      StateKind, normalize, parse_count)
from .store import ProgramStore


# -- response templates -------------------------------------------------------

REQUIRED_TEMPLATES = frozenset({
    "not_understood_home", "not_understood_building", "not_understood_slot",
    "ask_program_name", "ask_variable_name", "ask_variable_value",
    "ask_set_value", "ask_condition", "ask_count", "ask_else", "ask_run_name",
    "name_collision", "program_created", "action_added", "loop_opened",
    "repeat_opened", "conditional_opened", "conditional_added", "else_opened",
    "else_declined", "loop_closed", "conditional_closed", "program_finished",
    "cannot_finish", "cannot_finish_empty", "no_open_loop", "no_open_conditional",
    "wrong_close_use_conditional", "wrong_close_use_loop", "done_open_loop",
    "done_open_conditional", "nothing_to_finish", "need_program_first",
    "already_building", "run_while_building", "unexpected_answer",
    "goal_in_progress", "please_yes_no", "condition_not_understood",
    "loop_condition_rejected", "bad_count", "unknown_variable",
    "unknown_sound", "program_not_found", "run_started", "run_finished",
    "run_failed", "run_already_active", "busy_executing", "reset_ack",
    "help_intro", "help_awaiting", "help_executing", "transparency_how",
    "transparency_why", "transparency_generic",
})


class TemplateError(Exception):
    pass


def load_templates(path: str | Path | None = None) -> dict[str, str]:
    if path is None:
        text = (
            importlib_resources.files("parley.resources")
            .joinpath("responses.txt")
            .read_text(encoding="utf-8")
        )
        origin = "responses.txt"
    else:
        text = Path(path).read_text(encoding="utf-8")
        origin = str(path)
    templates: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise TemplateError(f"{origin}:{lineno}: expected `key = template`")
        if key.strip() in templates:
            raise TemplateError(f"{origin}:{lineno}: duplicate key {key.strip()!r}")
        templates[key.strip()] = value.strip()
    missing = REQUIRED_TEMPLATES - templates.keys()
    if missing:
        raise TemplateError(f"{origin}: missing templates: {sorted(missing)}")
    return templates


# -- state ---------------------------------------------------------------------

@dataclass
class UserGoal:
    intent: IntentKind
    required: tuple
    filled: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)  # context that is not a slot

    def next_slot(self) -> str | None:
        for slot in self.required:
            if slot not in self.filled:
                return slot
        return None


@dataclass
class AgentState:
    kind: StateKind = StateKind.HOME
    draft: prog.Draft | None = None
    pending_goal: UserGoal | None = None
    run_program: prog.Program | None = None  # set on the turn a run starts
    last_misheard: str | None = None         # feeds the why-not-understood answer
    now_ms: int = 0                          # engine-updated session clock


@dataclass(frozen=True)
class AgentResponse:
    text: str
    state_after: StateKind
    program_snapshot: bytes | None = None


REQUIRED_SLOTS = {
    IntentKind.CREATE_PROCEDURE: ("name",),
    IntentKind.RUN_PROGRAM: ("name",),
    IntentKind.CREATE_VARIABLE: ("name", "value"),
    IntentKind.SET_VARIABLE: ("name", "value"),
    IntentKind.CREATE_LOOP: ("condition",),
    IntentKind.REPEAT_TIMES: ("n",),
    IntentKind.SAY_PHRASE: (),   # text or variable, validated on arrival
    IntentKind.PLAY_SOUND: ("sound",),
    IntentKind.GET_USER_INPUT: (),
    IntentKind.OPEN_CONDITIONAL: ("variable", "literal"),
}

SLOT_EXPECTATIONS = {
    "name": Expectation.NAME,
    "value": Expectation.VALUE,
    "n": Expectation.VALUE,
    "condition": Expectation.CONDITION,
    "confirm_else": Expectation.YES_NO,
}

BUILDING_ONLY = frozenset({
    IntentKind.CREATE_LOOP, IntentKind.REPEAT_TIMES, IntentKind.CLOSE_LOOP,
    IntentKind.OPEN_CONDITIONAL, IntentKind.CLOSE_CONDITIONAL,
    IntentKind.SAY_PHRASE, IntentKind.PLAY_SOUND, IntentKind.GET_USER_INPUT,
    IntentKind.CREATE_VARIABLE, IntentKind.SET_VARIABLE,
})

ANSWER_KINDS = frozenset({
    IntentKind.LITERAL_ANSWER, IntentKind.CONDITION_ANSWER,
    IntentKind.AFFIRM, IntentKind.DENY,
})


def levenshtein(a: str, b: str) -> int:
    """Plain dynamic-programming edit distance (insert/delete/substitute)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            cost = 0 if ch_a == ch_b else 1
            current.append(min(previous[j] + 1,
                               current[j - 1] + 1,
                               previous[j - 1] + cost))
        previous = current
    return previous[-1]


def _expr_summary(expr: prog.ValueExpr) -> str:
    if isinstance(expr, prog.Literal):
        return f"'{expr.value}'"
    if isinstance(expr, prog.VariableRef):
        return f"the value of {expr.name}"
    return "the user input"


def action_summary(action: prog.Action) -> str:
    """How the agent reads an action back in conversation."""
    if isinstance(action, prog.Say):
        if isinstance(action.text, prog.Literal):
            return f"say '{action.text.value}'"
        return f"say {_expr_summary(action.text)}"
    if isinstance(action, prog.PlaySound):
        return f"play the {action.sound_id} sound"
    if isinstance(action, prog.GetUserInput):
        if action.save_as:
            return f"get user input and save it as {action.save_as}"
        return "get user input"
    if isinstance(action, prog.CreateVariable):
        return (f"create a variable called {action.name} "
                f"with value {_expr_summary(action.initial)}")
    if isinstance(action, prog.SetVariable):
        return f"set {action.name} to {_expr_summary(action.value)}"
    raise TypeError(f"no conversational summary for {type(action).__name__}")


class DialogManager:
    def __init__(
        self,
        grammar: Grammar,
        store: ProgramStore,
        templates: dict[str, str] | None = None,
        catalog: dict[str, str] | None = None,
    ):
        self.grammar = grammar
        self.store = store
        self.templates = templates if templates is not None else load_templates()
        self.catalog = catalog if catalog is not None else prog.load_sound_catalog()

    # -- helpers ---------------------------------------------------------

    def t(self, key: str, **fields) -> str:
        return self.templates[key].format(**fields)

    def _examples(self, state_kind: StateKind) -> str:
        phrases = self.grammar.list_example_phrases(state_kind)
        return "; ".join(f"'{p}'" for p in phrases)

    def _respond(self, state: AgentState, text: str,
                 snapshot: bool = False) -> AgentResponse:
        blob = None
        if snapshot and state.draft is not None:
            blob = prog.snapshot_json(state.draft.program)
        return AgentResponse(text=text, state_after=state.kind,
                             program_snapshot=blob)

    def slot_prompt(self, goal: UserGoal, slot: str) -> str:
        if goal.intent is IntentKind.CREATE_PROCEDURE:
            return self.t("ask_program_name")
        if goal.intent is IntentKind.RUN_PROGRAM:
            return self.t("ask_run_name")
        if goal.intent is IntentKind.CREATE_VARIABLE:
            if slot == "name":
                return self.t("ask_variable_name")
            return self.t("ask_variable_value", name=goal.filled["name"])
        if goal.intent is IntentKind.SET_VARIABLE:
            return self.t("ask_set_value", name=goal.filled["name"])
        if goal.intent is IntentKind.CREATE_LOOP:
            return self.t("ask_condition")
        if goal.intent is IntentKind.REPEAT_TIMES:
            return self.t("ask_count")
        if slot == "confirm_else":
            return self.t("ask_else")
        raise KeyError(f"no prompt for {goal.intent}/{slot}")

    def expectation_of(self, state: AgentState) -> Expectation:
        if state.kind is StateKind.AWAITING_SLOT and state.pending_goal:
            slot = state.pending_goal.next_slot()
            if slot is not None:
                return SLOT_EXPECTATIONS.get(slot, Expectation.NONE)
        return Expectation.NONE

    # -- the turn function --------------------------------------------------

    def handle_turn(self, state: AgentState, frame: IntentFrame):
        """Returns (state, response, applied editor commands)."""
        kind = frame.kind
        if kind is IntentKind.NOT_UNDERSTOOD:
            state.last_misheard = normalize(frame.raw.text)
            return self._not_understood(state)
        if kind is IntentKind.RESET:
            return self._reset(state)
        if kind is IntentKind.ASK_HELP:
            return self._help(state)
        if kind is IntentKind.ASK_TRANSPARENCY:
            text = self.respond_transparency(
                frame.slots.get("question_kind", ""), state)
            return state, self._respond(state, text), []

        if state.kind is StateKind.HOME:
            return self._turn_home(state, frame)
        if state.kind is StateKind.BUILDING:
            return self._turn_building(state, frame)
        if state.kind is StateKind.AWAITING_SLOT:
            return self._turn_awaiting(state, frame)
        return self._turn_executing(state, frame)

    # -- escapes and meta ------------------------------------------------------

    def _not_understood(self, state: AgentState):
        if state.kind is StateKind.HOME:
            text = self.t("not_understood_home")
        elif state.kind is StateKind.BUILDING:
            text = self.t("not_understood_building")
        elif state.kind is StateKind.AWAITING_SLOT:
            goal = state.pending_goal
            prompt = self.slot_prompt(goal, goal.next_slot())
            text = self.t("not_understood_slot", prompt=prompt)
        else:
            text = self.t("busy_executing")
        return state, self._respond(state, text), []

    def _reset(self, state: AgentState):
        commands = []
        if state.draft is not None:
            self.store.release(state.draft.program.name)
            commands.append(prog.DiscardDraft())
        state.draft = None
        state.pending_goal = None
        state.run_program = None
        state.kind = StateKind.HOME
        return state, self._respond(state, self.t("reset_ack")), commands

    def _help(self, state: AgentState):
        if state.kind is StateKind.AWAITING_SLOT:
            goal = state.pending_goal
            prompt = self.slot_prompt(goal, goal.next_slot())
            text = self.t("help_awaiting", prompt=prompt)
        elif state.kind is StateKind.EXECUTING:
            text = self.t("help_executing")
        else:
            text = self.t("help_intro", examples=self._examples(state.kind))
        return state, self._respond(state, text), []

    def respond_transparency(self, question_kind: str, state: AgentState) -> str:
        if question_kind == "how_understand":
            return self.t("transparency_how")
        if question_kind == "why_not_understood" and state.last_misheard:
            phrases = self.grammar.all_example_phrases()
            nearest = min(
                phrases, key=lambda p: (levenshtein(state.last_misheard, p), p))
            return self.t("transparency_why", phrase=f"'{nearest}'")
        return self.t("transparency_generic",
                      examples=self._examples(state.kind))

    # -- home -------------------------------------------------------------------

    def _turn_home(self, state: AgentState, frame: IntentFrame):
        kind = frame.kind
        if kind is IntentKind.CREATE_PROCEDURE:
            goal = UserGoal(kind, REQUIRED_SLOTS[kind], dict(frame.slots))
            return self._advance_goal(state, goal)
        if kind is IntentKind.RUN_PROGRAM:
            goal = UserGoal(kind, REQUIRED_SLOTS[kind], dict(frame.slots))
            return self._advance_goal(state, goal)
        if kind is IntentKind.DONE:
            return state, self._respond(state, self.t("nothing_to_finish")), []
        if kind in BUILDING_ONLY:
            return state, self._respond(state, self.t("need_program_first")), []
        if kind in ANSWER_KINDS:
            return state, self._respond(state, self.t("unexpected_answer")), []
        return self._not_understood(state)

    # -- building ------------------------------------------------------------------

    def _turn_building(self, state: AgentState, frame: IntentFrame):
        kind = frame.kind
        draft = state.draft
        if kind is IntentKind.CREATE_PROCEDURE:
            text = self.t("already_building", name=draft.program.name)
            return state, self._respond(state, text), []
        if kind is IntentKind.RUN_PROGRAM:
            text = self.t("run_while_building", name=draft.program.name)
            return state, self._respond(state, text), []
        if kind in (IntentKind.SAY_PHRASE, IntentKind.PLAY_SOUND,
                    IntentKind.GET_USER_INPUT, IntentKind.CREATE_VARIABLE,
                    IntentKind.SET_VARIABLE, IntentKind.CREATE_LOOP,
                    IntentKind.REPEAT_TIMES, IntentKind.OPEN_CONDITIONAL):
            goal = UserGoal(kind, REQUIRED_SLOTS[kind], dict(frame.slots))
            return self._advance_goal(state, goal)
        if kind is IntentKind.CLOSE_LOOP:
            return self._close_block(state, want="loop")
        if kind is IntentKind.CLOSE_CONDITIONAL:
            return self._close_block(state, want="conditional")
        if kind is IntentKind.DONE:
            return self._finish(state)
        if kind in ANSWER_KINDS:
            return state, self._respond(state, self.t("unexpected_answer")), []
        return self._not_understood(state)

    def _close_block(self, state: AgentState, want: str):
        draft = state.draft
        open_kind = draft.open_block_kind()
        if open_kind is None:
            key = "no_open_loop" if want == "loop" else "no_open_conditional"
            return state, self._respond(state, self.t(key)), []
        if open_kind != want:
            key = ("wrong_close_use_conditional" if open_kind == "conditional"
                   else "wrong_close_use_loop")
            return state, self._respond(state, self.t(key)), []
        closing = draft.stack[-1]
        prog.apply(draft, prog.CloseBlock())
        commands = [prog.CloseBlock()]
        if want == "loop":
            text = self.t("loop_closed")
            return state, self._respond(state, text, snapshot=True), commands
        # a conditional that closed its true branch may still want a false one
        if closing.branch == "then" and closing.action.orelse is None:
            return self._ask_else(state, closing.action, commands)
        return state, self._respond(state, self.t("conditional_closed"),
                                    snapshot=True), commands

    def _finish(self, state: AgentState):
        draft = state.draft
        open_kind = draft.open_block_kind()
        if open_kind == "loop":
            return state, self._respond(state, self.t("done_open_loop")), []
        if open_kind == "conditional":
            return state, self._respond(state, self.t("done_open_conditional")), []
        if not draft.program.actions:
            return state, self._respond(state, self.t("cannot_finish_empty")), []
        diags = prog.validate(draft, self.catalog)
        if diags:
            text = self.t("cannot_finish", problem=diags[0].message)
            return state, self._respond(state, text), []
        prog.apply(draft, prog.FinalizeProgram())
        finished = draft.program
        self.store.put(finished)
        state.draft = None
        state.kind = StateKind.HOME
        text = self.t("program_finished", name=finished.name)
        blob = prog.export_json(finished, self.catalog)
        response = AgentResponse(text=text, state_after=state.kind,
                                 program_snapshot=blob)
        return state, response, [prog.FinalizeProgram()]

    def _ask_else(self, state: AgentState, conditional: prog.If, commands: list):
        cond = conditional.cond
        goal = UserGoal(IntentKind.OPEN_CONDITIONAL, ("confirm_else",))
        goal.data["conditional"] = conditional
        state.pending_goal = goal
        state.kind = StateKind.AWAITING_SLOT
        summary = goal.data.get("summary")
        if summary:
            lead = self.t("conditional_added", variable=cond.variable,
                          literal=cond.literal, summary=summary)
        else:
            lead = self.t("conditional_closed")
        text = f"{lead} {self.t('ask_else')}"
        return state, self._respond(state, text, snapshot=True), commands

    # -- slot filling ---------------------------------------------------------------

    def _turn_awaiting(self, state: AgentState, frame: IntentFrame):
        goal = state.pending_goal
        slot = goal.next_slot()
        kind = frame.kind
        if kind is IntentKind.LITERAL_ANSWER:
            return self._fill_literal(state, goal, slot, frame.slots["value"])
        if kind is IntentKind.CONDITION_ANSWER:
            if slot != "condition":
                return self._reprompt(state, goal, slot, "goal_in_progress")
            return self._fill_condition(state, goal, frame)
        if kind in (IntentKind.AFFIRM, IntentKind.DENY):
            if slot != "confirm_else":
                return self._reprompt(state, goal, slot, "goal_in_progress")
            return self._answer_else(state, kind is IntentKind.AFFIRM)
        # a fresh command while a question is pending is politely refused
        return self._reprompt(state, goal, slot, "goal_in_progress")

    def _reprompt(self, state: AgentState, goal: UserGoal, slot: str, key: str):
        prompt = self.slot_prompt(goal, slot)
        return state, self._respond(state, self.t(key, prompt=prompt)), []

    def _fill_literal(self, state: AgentState, goal: UserGoal, slot: str,
                      value: str):
        if slot == "confirm_else":
            return self._reprompt(state, goal, slot, "please_yes_no")
        if slot == "condition":
            prompt = self.slot_prompt(goal, slot)
            text = f"{self.t('condition_not_understood')} {prompt}"
            return state, self._respond(state, text), []
        if slot == "n":
            count = parse_count(value)
            if count is None or count < 1:
                return self._reprompt(state, goal, slot, "bad_count")
        goal.filled[slot] = value
        return self._advance_goal(state, goal)

    def _fill_condition(self, state: AgentState, goal: UserGoal,
                        frame: IntentFrame):
        cond = frame.condition()
        if isinstance(cond, VarEquals):
            prompt = self.slot_prompt(goal, "condition")
            text = self.t("loop_condition_rejected", prompt=prompt)
            return state, self._respond(state, text), []
        goal.filled["condition"] = frame.slots["condition"]
        return self._advance_goal(state, goal)

    def _answer_else(self, state: AgentState, wanted: bool):
        state.pending_goal = None
        state.kind = StateKind.BUILDING
        if not wanted:
            return state, self._respond(state, self.t("else_declined")), []
        command = prog.OpenElseBlock()
        prog.apply(state.draft, command)
        text = self.t("else_opened")
        return state, self._respond(state, text, snapshot=True), [command]

    # -- goal completion ---------------------------------------------------------------

    def _advance_goal(self, state: AgentState, goal: UserGoal):
        """Ask for the next missing slot, or apply the completed goal."""
        slot = goal.next_slot()
        if slot is not None:
            collision = self._name_collision(state, goal)
            if collision:
                return collision
            state.pending_goal = goal
            state.kind = StateKind.AWAITING_SLOT
            prompt = self.slot_prompt(goal, slot)
            return state, self._respond(state, prompt), []
        collision = self._name_collision(state, goal)
        if collision:
            return collision
        state.pending_goal = None
        if state.draft is not None:
            state.kind = StateKind.BUILDING
        return self._apply_goal(state, goal)

    def _name_collision(self, state: AgentState, goal: UserGoal):
        """Re-ask for a name that is already taken; the slot stays unfilled."""
        name = goal.filled.get("name")
        if name is None:
            return None
        if goal.intent is IntentKind.CREATE_PROCEDURE:
            # claiming here makes check-then-create atomic across sessions
            taken = not self.store.claim(name)
        elif goal.intent in (IntentKind.CREATE_VARIABLE,):
            taken = name in state.draft.variables
        else:
            return None
        if not taken:
            return None
        del goal.filled["name"]
        state.pending_goal = goal
        state.kind = StateKind.AWAITING_SLOT
        prompt = self.slot_prompt(goal, "name")
        text = f"{self.t('name_collision', name=name)} {prompt}"
        return state, self._respond(state, text), []

    def _apply_goal(self, state: AgentState, goal: UserGoal):
        intent = goal.intent
        filled = goal.filled
        if intent is IntentKind.CREATE_PROCEDURE:
            name = filled["name"]  # already claimed by the collision check
            state.draft = prog.new_draft(name, created_at=state.now_ms)
            state.kind = StateKind.BUILDING
            text = self.t("program_created", name=name)
            return state, self._respond(state, text, snapshot=True), []
        if intent is IntentKind.RUN_PROGRAM:
            name = filled["name"]
            try:
                target = self.store.get(name)
            except KeyError:
                state.kind = StateKind.HOME
                text = self.t("program_not_found", name=name)
                return state, self._respond(state, text), []
            state.kind = StateKind.EXECUTING
            state.run_program = target
            text = self.t("run_started", name=name)
            return state, self._respond(state, text), []
        if intent is IntentKind.SAY_PHRASE:
            return self._append_say(state, filled)
        if intent is IntentKind.PLAY_SOUND:
            sound = filled["sound"]
            if sound not in self.catalog:
                sounds = ", ".join(sorted(self.catalog))
                text = self.t("unknown_sound", name=sound, sounds=sounds)
                return state, self._respond(state, text), []
            return self._append(state, prog.PlaySound(sound))
        if intent is IntentKind.GET_USER_INPUT:
            return self._append(state, prog.GetUserInput(filled.get("save_as")))
        if intent is IntentKind.CREATE_VARIABLE:
            action = prog.CreateVariable(filled["name"], prog.Literal(filled["value"]))
            return self._append(state, action)
        if intent is IntentKind.SET_VARIABLE:
            if filled["name"] not in state.draft.variables:
                text = self.t("unknown_variable", name=filled["name"])
                return state, self._respond(state, text), []
            action = prog.SetVariable(filled["name"], prog.Literal(filled["value"]))
            return self._append(state, action)
        if intent is IntentKind.CREATE_LOOP:
            return self._open_loop(state, filled["condition"])
        if intent is IntentKind.REPEAT_TIMES:
            count = parse_count(filled["n"])
            if count is None or count < 1:
                del goal.filled["n"]
                state.pending_goal = goal
                state.kind = StateKind.AWAITING_SLOT
                return self._reprompt(state, goal, "n", "bad_count")
            return self._open_loop(state, f"count:{count}")
        if intent is IntentKind.OPEN_CONDITIONAL:
            return self._open_conditional(state, filled)
        raise AssertionError(f"goal fell through: {intent}")

    def _append_say(self, state: AgentState, filled: dict):
        if "variable" in filled:
            name = filled["variable"]
            if name not in state.draft.variables:
                text = self.t("unknown_variable", name=name)
                return state, self._respond(state, text), []
            return self._append(state, prog.Say(prog.VariableRef(name)))
        return self._append(state, prog.Say(prog.Literal(filled["text"])))

    def _append(self, state: AgentState, action: prog.Action):
        command = prog.AppendAction(action)
        try:
            prog.apply(state.draft, command)
        except prog.NameCollision as exc:
            prompt = self.t("ask_variable_name")
            text = f"{self.t('name_collision', name=exc.name)} {prompt}"
            return state, self._respond(state, text), []
        except prog.DepthExceeded:
            return state, self._respond(state, self.t("not_understood_building")), []
        text = self.t("action_added", summary=action_summary(action))
        return state, self._respond(state, text, snapshot=True), [command]

    def _open_loop(self, state: AgentState, encoded: str):
        try:
            goal_cond = condition_from_slot(encoded)
        except BadConditionSlot:
            prompt = self.t("ask_condition")
            text = self.t("loop_condition_rejected", prompt=prompt)
            return state, self._respond(state, text), []
        if isinstance(goal_cond, UntilUserSays):
            block = prog.LoopUntil(goal_cond, [])
            text = self.t("loop_opened", condition=describe(goal_cond))
        elif isinstance(goal_cond, CountReached):
            block = prog.RepeatTimes(goal_cond.times, [])
            text = self.t("repeat_opened", times=goal_cond.times)
        else:
            prompt = self.t("ask_condition")
            text = self.t("loop_condition_rejected", prompt=prompt)
            return state, self._respond(state, text), []
        command = prog.OpenBlock(block)
        try:
            prog.apply(state.draft, command)
        except prog.DepthExceeded:
            return state, self._respond(state, self.t("not_understood_building")), []
        return state, self._respond(state, text, snapshot=True), [command]

    def _open_conditional(self, state: AgentState, filled: dict):
        variable = filled["variable"]
        if variable not in state.draft.variables:
            text = self.t("unknown_variable", name=variable)
            return state, self._respond(state, text), []
        cond = VarEquals(variable, filled["literal"])
        inline_kind = filled.get("inline_action_kind")
        if inline_kind is None:
            command = prog.OpenBlock(prog.If(cond, [], None))
            try:
                prog.apply(state.draft, command)
            except prog.DepthExceeded:
                return state, self._respond(
                    state, self.t("not_understood_building")), []
            text = self.t("conditional_opened", variable=variable,
                          literal=filled["literal"])
            return state, self._respond(state, text, snapshot=True), [command]
        inner = self._inline_action(state, inline_kind, filled["inline_action_arg"])
        if isinstance(inner, AgentResponse):
            return state, inner, []
        conditional = prog.If(cond, [inner], None)
        command = prog.AppendAction(conditional)
        try:
            prog.apply(state.draft, command)
        except prog.DepthExceeded:
            return state, self._respond(state, self.t("not_understood_building")), []
        state_, response, _ = self._ask_else_inline(state, conditional,
                                                    action_summary(inner))
        return state_, response, [command]

    def _ask_else_inline(self, state: AgentState, conditional: prog.If,
                         summary: str):
        goal = UserGoal(IntentKind.OPEN_CONDITIONAL, ("confirm_else",))
        goal.data["conditional"] = conditional
        goal.data["summary"] = summary
        state.pending_goal = goal
        state.kind = StateKind.AWAITING_SLOT
        cond = conditional.cond
        lead = self.t("conditional_added", variable=cond.variable,
                      literal=cond.literal, summary=summary)
        text = f"{lead} {self.t('ask_else')}"
        return state, self._respond(state, text, snapshot=True), []

    def _inline_action(self, state: AgentState, kind: str, arg: str):
        """The single action carried inside an inline conditional; returns
        an AgentResponse instead when the argument does not resolve."""
        if kind == "PlaySound":
            if arg not in self.catalog:
                sounds = ", ".join(sorted(self.catalog))
                return self._respond(
                    state, self.t("unknown_sound", name=arg, sounds=sounds))
            return prog.PlaySound(arg)
        if kind == "SayPhrase":
            return prog.Say(prog.Literal(arg))
        raise AssertionError(f"unknown inline action kind {kind!r}")

    # -- executing -------------------------------------------------------------

    def _turn_executing(self, state: AgentState, frame: IntentFrame):
        if frame.kind is IntentKind.RUN_PROGRAM:
            return state, self._respond(state, self.t("run_already_active")), []
        return state, self._respond(state, self.t("busy_executing")), []
