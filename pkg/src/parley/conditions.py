"""Conditions shared by the grammar, the program IR, and the interpreter.

A condition is one of three things: "until I say <word>", "<variable> is
<literal>", or "repeat <n> times".  Intent frames carry only string slots,
so conditions also have a compact one-line slot encoding (``to_slot`` /
``from_slot``) that round-trips exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class UntilUserSays:
    word: str

    def to_slot(self) -> str:
        return f"until:{self.word}"


@dataclass(frozen=True)
class VarEquals:
    variable: str
    literal: str

    def to_slot(self) -> str:
        return f"equals:{self.variable}={self.literal}"


@dataclass(frozen=True)
class CountReached:
    times: int

    def to_slot(self) -> str:
        return f"count:{self.times}"


Condition = UntilUserSays | VarEquals | CountReached

_SLOT_RE = re.compile(r"^(until|equals|count):(.*)$", re.DOTALL)


class BadConditionSlot(ValueError):
    """A condition slot string does not follow the documented encoding."""


def condition_from_slot(value: str) -> Condition:
    """Invert ``to_slot``.  Raises BadConditionSlot on malformed input."""
    m = _SLOT_RE.match(value)
    if m is None:
        raise BadConditionSlot(f"not a condition slot: {value!r}")
    tag, rest = m.group(1), m.group(2)
    if tag == "until":
        if not rest:
            raise BadConditionSlot("empty word in until condition")
        return UntilUserSays(rest)
    if tag == "equals":
        variable, sep, literal = rest.partition("=")
        if not sep or not variable or not literal:
            raise BadConditionSlot(f"bad equals condition: {value!r}")
        return VarEquals(variable, literal)
    if not rest.isdigit() or int(rest) < 1:
        raise BadConditionSlot(f"count must be a positive integer: {value!r}")
    return CountReached(int(rest))


def describe(cond: Condition) -> str:
    """Human wording used in agent responses and pseudocode."""
    if isinstance(cond, UntilUserSays):
        return f"until you say '{cond.word}'"
    if isinstance(cond, VarEquals):
        return f"if {cond.variable} is {cond.literal}"
    return f"{cond.times} times"
