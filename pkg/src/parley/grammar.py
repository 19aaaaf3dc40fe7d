"""Constrained semantic parser: one utterance in, one intent frame out.

The accepted phrase set lives in ``resources/grammar.txt`` (see the header
there for the line format).  Parsing is a pure function of the normalized
utterance text and the dialog's current expectation, so the parser can be
shared freely between sessions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources as importlib_resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .conditions import BadConditionSlot, condition_from_slot


class Modality(str, Enum):
    VOICE = "voice"
    TEXT = "text"


class IntentKind(str, Enum):
    CREATE_PROCEDURE = "CreateProcedure"
    RUN_PROGRAM = "RunProgram"
    CREATE_VARIABLE = "CreateVariable"
    SET_VARIABLE = "SetVariable"
    CREATE_LOOP = "CreateLoop"
    REPEAT_TIMES = "RepeatTimes"
    CLOSE_LOOP = "CloseLoop"
    OPEN_CONDITIONAL = "OpenConditional"
    CLOSE_CONDITIONAL = "CloseConditional"
    SAY_PHRASE = "SayPhrase"
    PLAY_SOUND = "PlaySound"
    GET_USER_INPUT = "GetUserInput"
    DONE = "Done"
    RESET = "Reset"
    ASK_HELP = "AskHelp"
    ASK_TRANSPARENCY = "AskTransparency"
    LITERAL_ANSWER = "LiteralAnswer"
    CONDITION_ANSWER = "ConditionAnswer"
    AFFIRM = "Affirm"
    DENY = "Deny"
    NOT_UNDERSTOOD = "NotUnderstood"


class Expectation(Enum):
    """What the dialog manager is waiting for when it asks for a parse."""

    NONE = "none"
    NAME = "name"
    VALUE = "value"
    CONDITION = "condition"
    YES_NO = "yes_no"


class StateKind(str, Enum):
    """Dialog states, shared vocabulary with the dialog manager."""

    HOME = "home"
    BUILDING = "building"
    AWAITING_SLOT = "awaiting_slot"
    EXECUTING = "executing"


# Slots each intent kind may legally carry.  Kinds not listed carry none.
LEGAL_SLOTS: Mapping[IntentKind, frozenset[str]] = MappingProxyType({
    IntentKind.CREATE_PROCEDURE: frozenset({"name"}),
    IntentKind.RUN_PROGRAM: frozenset({"name"}),
    IntentKind.CREATE_VARIABLE: frozenset({"name", "value"}),
    IntentKind.SET_VARIABLE: frozenset({"name", "value"}),
    IntentKind.CREATE_LOOP: frozenset({"condition"}),
    IntentKind.REPEAT_TIMES: frozenset({"n"}),
    IntentKind.OPEN_CONDITIONAL: frozenset(
        {"variable", "literal", "inline_action_kind", "inline_action_arg"}
    ),
    IntentKind.SAY_PHRASE: frozenset({"text", "variable"}),
    IntentKind.PLAY_SOUND: frozenset({"sound"}),
    IntentKind.GET_USER_INPUT: frozenset({"save_as"}),
    IntentKind.ASK_TRANSPARENCY: frozenset({"question_kind"}),
    IntentKind.LITERAL_ANSWER: frozenset({"value"}),
    IntentKind.CONDITION_ANSWER: frozenset({"condition"}),
})

NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}


def parse_count(value: str) -> int | None:
    """Digits or the words one..ten -> int; anything else -> None."""
    value = value.strip()
    if value.isdigit():
        return int(value)
    return NUMBER_WORDS.get(value)


@dataclass(frozen=True)
class Utterance:
    text: str
    modality: Modality = Modality.TEXT
    timestamp_ms: int = 0


@dataclass(frozen=True)
class IntentFrame:
    kind: IntentKind
    slots: Mapping[str, str] = field(default_factory=dict)
    raw: Utterance | None = None

    def __post_init__(self):
        object.__setattr__(self, "slots", MappingProxyType(dict(self.slots)))
        legal = LEGAL_SLOTS.get(self.kind, frozenset())
        extra = set(self.slots) - legal
        if extra:
            raise ValueError(f"illegal slots for {self.kind.value}: {sorted(extra)}")

    def condition(self):
        """Decode the condition slot; None when absent."""
        raw = self.slots.get("condition")
        return None if raw is None else condition_from_slot(raw)


_QUOTE_CHARS = "'\"`‘’“”"
_PREFIX_RE = re.compile(r"^(?:hey parley|hi parley|parley|okay|ok|please)[,.!]?\s+")
_WS_RE = re.compile(r"\s+")
_TERMINAL_PUNCT_RE = re.compile(r"[.!?,;:]+$")


def normalize(text: str) -> str:
    """Canonical matching form: lowercase, quote-free, single-spaced,
    no terminal punctuation, politeness prefixes dropped."""
    s = text.lower().translate({ord(c): None for c in _QUOTE_CHARS})
    s = _WS_RE.sub(" ", s).strip()
    s = _TERMINAL_PUNCT_RE.sub("", s).strip()
    while True:
        m = _PREFIX_RE.match(s)
        if m is None or not s[m.end():].strip():
            break
        s = s[m.end():].strip()
    return s


class GrammarError(Exception):
    """Malformed grammar file; message carries file:line."""


_SECTION_RE = re.compile(r"^\[(escapes|commands|conditions|yesno|examples)\]$")
_ARG_RE = re.compile(r"(?P<slot>\w+)\s*=\s*(?:\"(?P<template>[^\"]*)\"|(?P<group>[A-Za-z_]\w*))")
_RHS_RE = re.compile(r"^(?P<intent>[A-Za-z]+)\((?P<args>.*)\)$")
_EXAMPLE_RE = re.compile(r"^(?P<state>[a-z_]+):\s*(?P<phrase>.+)$")
_TEMPLATE_GROUP_RE = re.compile(r"\{(\w+)\}")


@dataclass(frozen=True)
class Rule:
    pattern: re.Pattern
    intent: IntentKind
    # slot -> either ("group", name) or ("template", text)
    assignments: tuple[tuple[str, str, str], ...]
    origin: str

    def match(self, text: str) -> IntentFrame | None:
        m = self.pattern.fullmatch(text)
        if m is None:
            return None
        groups = {k: (v or "").strip() for k, v in m.groupdict().items()}
        if "n" in groups and groups["n"]:
            count = parse_count(groups["n"])
            groups["n"] = str(count) if count is not None else groups["n"]
        slots: dict[str, str] = {}
        for slot, source_kind, source in self.assignments:
            if source_kind == "group":
                value = groups.get(source, "")
            else:
                value = _TEMPLATE_GROUP_RE.sub(lambda g: groups.get(g.group(1), ""), source)
            slots[slot] = value
        return IntentFrame(self.intent, slots)


def _parse_rule(line: str, origin: str) -> Rule:
    pattern_text, sep, rhs = line.rpartition("->")
    if not sep:
        raise GrammarError(f"{origin}: expected 'pattern -> Intent(...)'")
    pattern_text = pattern_text.strip()
    rhs = rhs.strip()
    m = _RHS_RE.match(rhs)
    if m is None:
        raise GrammarError(f"{origin}: right-hand side must look like Intent(slot=...): {rhs!r}")
    try:
        intent = IntentKind(m.group("intent"))
    except ValueError:
        raise GrammarError(f"{origin}: unknown intent {m.group('intent')!r}") from None
    try:
        pattern = re.compile(pattern_text, re.IGNORECASE)
    except re.error as exc:
        raise GrammarError(f"{origin}: bad pattern: {exc}") from None

    assignments: list[tuple[str, str, str]] = []
    args_text = m.group("args").strip()
    if args_text:
        consumed = 0
        for arg in _ARG_RE.finditer(args_text):
            consumed += 1
            slot = arg.group("slot")
            if arg.group("group") is not None:
                if arg.group("group") not in pattern.groupindex:
                    raise GrammarError(
                        f"{origin}: slot {slot!r} references unknown capture group "
                        f"{arg.group('group')!r}"
                    )
                assignments.append((slot, "group", arg.group("group")))
            else:
                template = arg.group("template")
                for ref in _TEMPLATE_GROUP_RE.findall(template):
                    if ref not in pattern.groupindex:
                        raise GrammarError(
                            f"{origin}: template for slot {slot!r} references unknown "
                            f"capture group {ref!r}"
                        )
                assignments.append((slot, "template", template))
        if consumed != len(re.split(r"\s*,\s*", args_text)):
            raise GrammarError(f"{origin}: malformed argument list: {args_text!r}")
    legal = LEGAL_SLOTS.get(intent, frozenset())
    for slot, _, _ in assignments:
        if slot not in legal:
            raise GrammarError(f"{origin}: slot {slot!r} is not legal for {intent.value}")
    return Rule(pattern, intent, tuple(assignments), origin)


class Grammar:
    """The loaded phrase table.  Stateless after construction."""

    def __init__(
        self,
        escapes: list[Rule],
        commands: list[Rule],
        conditions: list[Rule],
        yesno: list[Rule],
        examples: dict[StateKind, list[str]],
    ):
        self.escapes = escapes
        self.commands = commands
        self.conditions = conditions
        self.yesno = yesno
        self.examples = examples

    # -- loading ---------------------------------------------------------

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Grammar":
        """Load a grammar file; default is the packaged table."""
        if path is None:
            text = (
                importlib_resources.files("parley.resources")
                .joinpath("grammar.txt")
                .read_text(encoding="utf-8")
            )
            return cls.loads(text, origin="grammar.txt")
        p = Path(path)
        return cls.loads(p.read_text(encoding="utf-8"), origin=str(p))

    @classmethod
    def loads(cls, text: str, origin: str = "<grammar>") -> "Grammar":
        sections: dict[str, list[Rule]] = {
            "escapes": [], "commands": [], "conditions": [], "yesno": [],
        }
        examples: dict[StateKind, list[str]] = {k: [] for k in StateKind}
        current: str | None = None
        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            where = f"{origin}:{lineno}"
            m = _SECTION_RE.match(line)
            if m:
                current = m.group(1)
                continue
            if current is None:
                raise GrammarError(f"{where}: rule before any [section] header")
            if current == "examples":
                em = _EXAMPLE_RE.match(line)
                if em is None:
                    raise GrammarError(f"{where}: expected 'state: phrase'")
                try:
                    state = StateKind(em.group("state"))
                except ValueError:
                    raise GrammarError(
                        f"{where}: unknown state {em.group('state')!r}"
                    ) from None
                examples[state].append(em.group("phrase").strip())
                continue
            sections[current].append(_parse_rule(line, where))
        for state, phrases in examples.items():
            if not phrases:
                raise GrammarError(f"{origin}: no example phrases for state {state.value!r}")
        return cls(
            sections["escapes"], sections["commands"],
            sections["conditions"], sections["yesno"], examples,
        )

    # -- parsing ---------------------------------------------------------

    def parse(self, utterance: Utterance, expectation: Expectation = Expectation.NONE) -> IntentFrame:
        """Map one utterance to exactly one intent frame.  Total for
        non-empty input; unrecognized commands come back as NotUnderstood."""
        if not utterance.text.strip():
            raise ValueError("empty utterance; reject before parsing")
        norm = normalize(utterance.text)
        if not norm:
            # Punctuation-only input: nothing left to match against.
            norm = utterance.text.strip().lower()

        frame = self._match(self.escapes, norm)
        if frame is None and expectation is Expectation.NONE:
            frame = self._match(self.commands, norm)
            if frame is None:
                frame = IntentFrame(IntentKind.NOT_UNDERSTOOD)
        elif frame is None and expectation is Expectation.CONDITION:
            frame = self._match(self.conditions, norm)
            if frame is None:
                frame = IntentFrame(IntentKind.LITERAL_ANSWER, {"value": norm})
        elif frame is None and expectation is Expectation.YES_NO:
            frame = self._match(self.yesno, norm)
            if frame is None:
                frame = IntentFrame(IntentKind.LITERAL_ANSWER, {"value": norm})
        elif frame is None:
            frame = IntentFrame(IntentKind.LITERAL_ANSWER, {"value": norm})
        return IntentFrame(frame.kind, dict(frame.slots), raw=utterance)

    def _match(self, rules: list[Rule], norm: str) -> IntentFrame | None:
        for rule in rules:
            frame = rule.match(norm)
            if frame is None:
                continue
            if frame.kind is IntentKind.CONDITION_ANSWER:
                try:
                    condition_from_slot(frame.slots["condition"])
                except (KeyError, BadConditionSlot):
                    continue  # e.g. "0 times": let it fall through to a literal
            return frame
        return None

    # -- documentation helpers -------------------------------------------

    def list_example_phrases(self, state: StateKind) -> list[str]:
        """Canonical phrases appropriate to a dialog state; every one of
        them parses to a real intent."""
        return list(self.examples[state])

    def all_example_phrases(self) -> list[str]:
        seen: dict[str, None] = {}
        for state in StateKind:
            for phrase in self.examples[state]:
                seen.setdefault(phrase, None)
        return list(seen)
