import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import ProgramGen
from parley import program as prog
from parley.conditions import CountReached, UntilUserSays, VarEquals


def walkthrough_program() -> prog.Program:
    return prog.Program(name="animal sounds", actions=[
        prog.LoopUntil(UntilUserSays("stop"), [
            prog.GetUserInput(save_as="animal"),
            prog.If(VarEquals("animal", "dog"), [prog.PlaySound("dog")]),
            prog.If(VarEquals("animal", "cat"), [prog.PlaySound("cat")]),
            prog.If(VarEquals("animal", "horse"), [prog.PlaySound("horse")]),
            prog.If(VarEquals("animal", "cow"), [prog.PlaySound("cow")]),
        ]),
    ])


# -- editor ------------------------------------------------------------------

def test_append_single_action():
    draft = prog.new_draft("demo")
    prog.apply(draft, prog.AppendAction(prog.Say(prog.Literal("hello world"))))
    assert draft.program.actions == [prog.Say(prog.Literal("hello world"))]


def test_close_without_open_block():
    draft = prog.new_draft("demo")
    with pytest.raises(prog.NoOpenBlock):
        prog.apply(draft, prog.CloseBlock())


def test_open_append_close_nests_into_body():
    draft = prog.new_draft("demo")
    prog.apply(draft, prog.OpenBlock(prog.LoopUntil(UntilUserSays("stop"), [])))
    prog.apply(draft, prog.AppendAction(prog.GetUserInput("animal")))
    prog.apply(draft, prog.CloseBlock())
    loop = draft.program.actions[0]
    assert isinstance(loop, prog.LoopUntil)
    assert loop.body == [prog.GetUserInput("animal")]
    assert draft.depth == 0


def test_editor_builds_walkthrough_program():
    draft = prog.new_draft("animal sounds")
    prog.apply(draft, prog.OpenBlock(prog.LoopUntil(UntilUserSays("stop"), [])))
    prog.apply(draft, prog.AppendAction(prog.GetUserInput("animal")))
    for animal in ("dog", "cat", "horse", "cow"):
        conditional = prog.If(VarEquals("animal", animal),
                              [prog.PlaySound(animal)])
        prog.apply(draft, prog.AppendAction(conditional))
    prog.apply(draft, prog.CloseBlock())
    prog.apply(draft, prog.FinalizeProgram())
    assert draft.program == walkthrough_program()


def test_variable_name_collision():
    draft = prog.new_draft("demo")
    prog.apply(draft, prog.AppendAction(
        prog.CreateVariable("pet", prog.Literal("dog"))))
    with pytest.raises(prog.NameCollision):
        prog.apply(draft, prog.AppendAction(
            prog.CreateVariable("pet", prog.Literal("cat"))))


def test_depth_guard():
    draft = prog.new_draft("deep")
    for _ in range(prog.MAX_DEPTH):
        prog.apply(draft, prog.OpenBlock(prog.RepeatTimes(1, [])))
    with pytest.raises(prog.DepthExceeded):
        prog.apply(draft, prog.OpenBlock(prog.RepeatTimes(1, [])))


def test_open_else_block():
    draft = prog.new_draft("demo")
    prog.apply(draft, prog.AppendAction(
        prog.CreateVariable("pet", prog.Literal("dog"))))
    conditional = prog.If(VarEquals("pet", "dog"), [prog.PlaySound("dog")])
    prog.apply(draft, prog.AppendAction(conditional))
    prog.apply(draft, prog.OpenElseBlock())
    prog.apply(draft, prog.AppendAction(prog.PlaySound("cat")))
    prog.apply(draft, prog.CloseBlock())
    assert conditional.orelse == [prog.PlaySound("cat")]


def test_open_else_needs_a_conditional():
    draft = prog.new_draft("demo")
    with pytest.raises(prog.NoElseTarget):
        prog.apply(draft, prog.OpenElseBlock())


def test_finalize_rejects_open_blocks():
    draft = prog.new_draft("demo")
    prog.apply(draft, prog.OpenBlock(prog.LoopUntil(UntilUserSays("x"), [])))
    with pytest.raises(prog.InvalidProgram):
        prog.apply(draft, prog.FinalizeProgram())


@given(st.lists(st.booleans(), max_size=40))
def test_cursor_depth_equals_opens_minus_closes(moves):
    draft = prog.new_draft("demo")
    opens = closes = 0
    for is_open in moves:
        if is_open:
            try:
                prog.apply(draft, prog.OpenBlock(prog.RepeatTimes(1, [])))
                opens += 1
            except prog.DepthExceeded:
                pass
        else:
            try:
                prog.apply(draft, prog.CloseBlock())
                closes += 1
            except prog.NoOpenBlock:
                pass
        assert draft.depth == opens - closes
        assert draft.depth >= 0


# -- validate -----------------------------------------------------------------

def test_walkthrough_program_is_clean():
    assert prog.validate(walkthrough_program()) == []


def test_undefined_variable_diagnostic():
    bad = prog.Program(name="bad", actions=[prog.Say(prog.VariableRef("pet"))])
    codes = [d.code for d in prog.validate(bad)]
    assert codes == ["undefined_variable"]


def test_unclosed_block_diagnostic():
    draft = prog.new_draft("bad")
    prog.apply(draft, prog.OpenBlock(prog.LoopUntil(UntilUserSays("x"), [])))
    codes = [d.code for d in prog.validate(draft)]
    assert "unclosed_block" in codes


def test_unknown_sound_diagnostic():
    bad = prog.Program(name="bad", actions=[prog.PlaySound("dragon")])
    codes = [d.code for d in prog.validate(bad)]
    assert codes == ["unknown_sound"]


def test_duplicate_variable_diagnostic():
    bad = prog.Program(name="bad", actions=[
        prog.CreateVariable("pet", prog.Literal("dog")),
        prog.CreateVariable("pet", prog.Literal("cat")),
    ])
    codes = [d.code for d in prog.validate(bad)]
    assert codes == ["duplicate_variable"]


def test_empty_program_name_diagnostic():
    codes = [d.code for d in prog.validate(prog.Program(name="  "))]
    assert codes == ["empty_name"]


def test_bad_count_diagnostic():
    bad = prog.Program(name="bad", actions=[prog.RepeatTimes(0, [])])
    codes = [d.code for d in prog.validate(bad)]
    assert "bad_count" in codes


def test_loop_introductions_do_not_escape():
    bad = prog.Program(name="bad", actions=[
        prog.LoopUntil(UntilUserSays("stop"), [prog.GetUserInput("x")]),
        prog.Say(prog.VariableRef("x")),
    ])
    codes = [d.code for d in prog.validate(bad)]
    assert codes == ["undefined_variable"]


def test_repeat_introductions_escape():
    ok = prog.Program(name="ok", actions=[
        prog.RepeatTimes(2, [prog.GetUserInput("x")]),
        prog.Say(prog.VariableRef("x")),
    ])
    assert prog.validate(ok) == []


def test_branch_definitions_need_both_sides():
    one_sided = prog.Program(name="bad", actions=[
        prog.CreateVariable("flag", prog.Literal("yes")),
        prog.If(VarEquals("flag", "yes"),
                [prog.CreateVariable("x", prog.Literal("1"))],
                [prog.Say(prog.Literal("hi"))]),
        prog.Say(prog.VariableRef("x")),
    ])
    codes = [d.code for d in prog.validate(one_sided)]
    assert codes == ["undefined_variable"]

    both_sides = prog.Program(name="ok", actions=[
        prog.CreateVariable("flag", prog.Literal("yes")),
        prog.If(VarEquals("flag", "yes"),
                [prog.CreateVariable("x", prog.Literal("1"))],
                [prog.CreateVariable("x", prog.Literal("2"))]),
        prog.Say(prog.VariableRef("x")),
    ])
    assert prog.validate(both_sides) == []


def test_generated_programs_validate_clean():
    rng = random.Random(20210)
    gen = ProgramGen(rng)
    for i in range(300):
        p = gen.program(f"gen {i}")
        assert prog.validate(p) == [], (i, prog.validate(p))


# -- serialization ---------------------------------------------------------------

def test_round_trip_identity_small():
    p = prog.Program(name="x", actions=[prog.Say(prog.Literal("hi"))])
    assert prog.import_json(prog.export_json(p)) == p


def test_round_trip_generated():
    rng = random.Random(7)
    gen = ProgramGen(rng, max_depth=5, max_actions=6)
    for i in range(200):
        p = gen.program(f"gen {i}")
        again = prog.import_json(prog.export_json(p))
        assert again == p


def test_export_matches_frozen_golden():
    golden = open("tests/goldens/animal_sounds.program.json", "rb").read()
    assert prog.export_json(walkthrough_program()) == golden


def test_export_refuses_invalid_program():
    bad = prog.Program(name="bad", actions=[prog.Say(prog.VariableRef("ghost"))])
    with pytest.raises(prog.InvalidProgram):
        prog.export_json(bad)


def test_import_rejects_truncated_file():
    blob = prog.export_json(walkthrough_program())[:40]
    with pytest.raises(prog.SchemaViolation):
        prog.import_json(blob)


def test_schema_violation_reports_path_and_offset():
    with pytest.raises(prog.SchemaViolation) as err:
        prog.import_json(b'{"format_version": 1, "name": "x", "actions": [{"kind": "warp"}]}')
    assert err.value.path == "$.actions[0].kind"
    with pytest.raises(prog.SchemaViolation) as err:
        prog.import_json(b"{nope")
    assert err.value.offset == 1


def test_import_rejects_wrong_version():
    with pytest.raises(prog.SchemaViolation):
        prog.import_json(b'{"format_version": 2, "name": "x", "actions": []}')


def test_import_rejects_zero_count():
    doc = {"format_version": 1, "name": "x", "actions": [
        {"kind": "repeat_times", "times": 0, "body": []}]}
    with pytest.raises(prog.SchemaViolation):
        prog.import_json(json.dumps(doc))


def test_import_rejects_non_string_literal():
    doc = {"format_version": 1, "name": "x", "actions": [
        {"kind": "say", "text": {"kind": "literal", "value": 5}}]}
    with pytest.raises(prog.SchemaViolation):
        prog.import_json(json.dumps(doc))


def test_created_at_is_not_part_of_equality():
    a = prog.Program(name="x", actions=[], created_at=1)
    b = prog.Program(name="x", actions=[], created_at=2)
    assert a == b
    assert prog.snapshot_json(a) == prog.snapshot_json(b)


# -- pseudocode --------------------------------------------------------------------

def test_pseudocode_single_say():
    p = prog.Program(name="x", actions=[prog.Say(prog.Literal("hi"))])
    assert prog.export_pseudocode(p) == 'program x\n  say "hi"\n'


def test_pseudocode_empty_program_is_header_only():
    assert prog.export_pseudocode(prog.Program(name="x")) == "program x\n"


def test_pseudocode_matches_frozen_golden():
    golden = open("tests/goldens/animal_sounds.pseudocode.txt", encoding="utf-8").read()
    assert prog.export_pseudocode(walkthrough_program()) == golden


def test_pseudocode_nested_indentation():
    p = prog.Program(name="x", actions=[
        prog.LoopUntil(UntilUserSays("stop"), [
            prog.GetUserInput("w"),
            prog.If(VarEquals("w", "hi"), [prog.Say(prog.Literal("hello"))]),
        ]),
    ])
    assert prog.export_pseudocode(p) == (
        "program x\n"
        '  loop until you say "stop"\n'
        "    get user input and save it as w\n"
        '    if w is "hi"\n'
        '      say "hello"\n'
    )


def test_pseudocode_distinguishes_literal_from_variable():
    by_value = prog.Program(name="x", actions=[prog.Say(prog.VariableRef("pet"))])
    by_words = prog.Program(name="x", actions=[
        prog.Say(prog.Literal("the value of pet"))])
    assert (prog.export_pseudocode(by_value)
            != prog.export_pseudocode(by_words))


@settings(max_examples=60)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_pseudocode_injective_on_generated_pairs(seed):
    rng = random.Random(seed)
    gen = ProgramGen(rng, max_depth=3, max_actions=4)
    a = gen.program("same name")
    b = gen.program("same name")
    if a == b:
        assert prog.export_pseudocode(a) == prog.export_pseudocode(b)
    else:
        assert prog.export_pseudocode(a) != prog.export_pseudocode(b)


def test_else_branch_renders_with_otherwise():
    p = prog.Program(name="x", actions=[
        prog.CreateVariable("pet", prog.Literal("dog")),
        prog.If(VarEquals("pet", "dog"),
                [prog.PlaySound("dog")],
                [prog.PlaySound("cat")]),
    ])
    listing = prog.export_pseudocode(p)
    assert "otherwise" in listing
    assert listing.index("dog sound") < listing.index("otherwise") < listing.index("cat sound")
