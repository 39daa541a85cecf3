import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ool.errors import CompileError
from ool.expander import (
    AssignStep,
    FrameStep,
    SpawnStep,
    WaitZeroStep,
    dump_expanded,
    expand,
    format_xexpr,
    flatten_inheritance,
    iter_steps,
    merge_definitions,
)
from ool.prelude import load_prelude
from ool.toolchain import compile_source, parse_source

from conftest import corpus_programs, read


def steps_of(unit, kind):
    return [s for s in iter_steps(unit.body) if isinstance(s, kind)]


def nested_under_parallel(k, statement="n := n;"):
    body = "\n".join(f"    {statement}" for _ in range(k))
    return f"program gen;\n  integer n;\n  begin parallel_execute;\n{body}\n  end parallel_execute;\nend program gen;\n"


@pytest.mark.parametrize("variant", ["parallel", "sequential"])
def test_prelude_expands_cleanly(variant):
    unit = expand(parse_source("program empty; end program empty;"), load_prelude(variant))
    assert unit.body.steps == ()


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda path: path.stem)
def test_corpus_expands(path):
    compile_source(path.read_text())


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=8))
def test_unroll_count(k):
    unit = compile_source(nested_under_parallel(k))
    assert len(steps_of(unit, SpawnStep)) == k
    sems = {s.sem for s in steps_of(unit, SpawnStep)} | {s.sem for s in steps_of(unit, WaitZeroStep)}
    assert len(sems) == 1
    (sem,) = sems
    folded = [s for s in steps_of(unit, AssignStep) if s.target == sem]
    assert len(folded) == 1 and folded[0].value.value == k
    assert f"ASSIGN {sem} := {k} @" in dump_expanded(unit)


def test_unroll_labels_and_order():
    unit = compile_source(read("fork_join.ool"))
    dump = dump_expanded(unit)
    labels = re.findall(r"SEQ by_nested_operators (\d)/8", dump)
    assert labels == [str(i) for i in range(1, 9)]
    values = [s.value.value for s in steps_of(unit, AssignStep) if s.target.name.startswith("c")]
    assert values == list(range(1, 9))


def test_num_nested_operators_is_folded_everywhere():
    for path in corpus_programs():
        assert "num_nested_operators" not in dump_expanded(compile_source(path.read_text()))


CONFORMANCE = """program bad;
  integer answer;
  begin dialog_window "T";
    answer := 1;
  end dialog_window;
end program bad;
"""


def test_conformance_error_names_method_and_position():
    with pytest.raises(CompileError) as info:
        compile_source(CONFORMANCE)
    err = info.value
    assert (err.line, err.column) == (4, 5)
    assert "get_min_size/2" in err.message
    assert "answer := 1" in err.message


def test_assignments_under_button_need_only_execute():
    compile_source('program ok; integer a; begin dialog_window "T"; begin dialog_button "B"; a := 1; end dialog_button; end dialog_window; end program ok;')


def test_missing_paint_method_is_reported():
    src = """program bad;
  operator half;
    method get_min_size(x, y); integer x, y; x := 1; y := 1; end method get_min_size;
    method execute; end method execute;
  end operator half;
  begin dialog_window "T"; half; end dialog_window;
end program bad;"""
    with pytest.raises(CompileError, match=r"paint_the_part/4"):
        compile_source(src)


def test_outer_similarity_without_inheritance():
    unit = compile_source(read("outer_similarity.ool"))
    labels = [s.frames[0].label for s in steps_of(unit, FrameStep) if s.kind == "method"]
    assert "dialog_separator.get_min_size" in labels
    assert "dialog_separator.paint_the_part" in labels
    assert "dialog_separator.handle_event" in labels


def test_conformance_soundness_over_corpus():
    prelude = load_prelude("parallel")
    for path in corpus_programs():
        program = parse_source(path.read_text())
        ops = flatten_inheritance(merge_definitions(program, prelude))
        unit = expand(program, prelude)
        for step in steps_of(unit, FrameStep):
            if step.kind != "method":
                continue
            op_name, method_name = step.frames[0].label.split(".")
            method = ops[op_name].methods[method_name]
            cells = [c.name for c in step.frames[0].cells]
            assert cells[: len(method.params)] == method.params


def test_inheritance_flattening():
    ops = flatten_inheritance(merge_definitions(parse_source("program e; end program e;"), load_prelude("parallel")))
    cancel = ops["dialog_cancel_button"]
    ok = ops["dialog_ok_button"]
    assert set(cancel.methods) == set(ok.methods)
    assert cancel.vars["label"].init.value == "Cancel"
    assert ok.vars["label"].init.value == "Ok"
    assert cancel.params == []


def test_inheritance_cycle():
    src = """program c;
  operator a inherits b; method execute; end method execute; end operator a;
  operator b inherits a; end operator b;
end program c;"""
    with pytest.raises(CompileError, match=r"inheritance cycle: a -> b -> a"):
        compile_source(src)


def test_unknown_parent():
    with pytest.raises(CompileError, match="unknown operator `nope`"):
        compile_source("program c; operator a inherits nope; end operator a; end program c;")


def test_expansion_cycle():
    src = """program c;
  operator loop;
    method execute; again; end method execute;
    method again; execute; end method again;
  end operator loop;
  loop;
end program c;"""
    with pytest.raises(CompileError, match=r"expansion cycle: loop.execute -> loop.again -> loop.execute"):
        compile_source(src)


def test_self_use_is_a_cycle():
    src = """program c;
  operator r;
    method execute; r; end method execute;
  end operator r;
  r;
end program c;"""
    with pytest.raises(CompileError, match=r"expansion cycle: r.execute -> r.execute"):
        compile_source(src)


def test_global_names_resolve_to_program_cells():
    dump = dump_expanded(compile_source(read("yesno.ool")))
    assert "ASSIGN answer#0 := 1 @8:11" in dump
    assert "ASSIGN answer#0 := 0 @12:11" in dump


def test_shared_request_close_binds_to_enclosing_dialog():
    unit = compile_source(read("nested_dialogs.ool"))
    (top,) = [s for s in steps_of(unit, FrameStep) if s.kind == "operator" and s.frames[0].label == "dialog_window"]
    outer_frame, inner_frame = [f.frame for f in top.frames if f.label == "dialog_window"]
    flat = [s for s in iter_steps(unit.body) if isinstance(s, AssignStep)]
    ten = next(i for i, s in enumerate(flat) if "+ 10" in format_xexpr(s.value))
    closes = [s for s in flat[ten:] if s.target.name == "closing"][:1]
    assert closes and all(s.target.frame == inner_frame for s in closes)
    assert outer_frame != inner_frame


def test_close_dialog_outside_a_dialog_points_at_user_code():
    with pytest.raises(CompileError) as info:
        compile_source("program c;\n  close_dialog;\nend program c;")
    assert (info.value.line, info.value.column) == (2, 3)
    assert "request_close" in info.value.message


def test_unresolved_name_lists_scopes():
    with pytest.raises(CompileError, match=r"unresolved name `ghost` \(searched: .*operators and builtins\)"):
        compile_source("program c; integer a; a := ghost; end program c;")


@pytest.mark.parametrize(
    "source, message",
    [
        ("program c; integer a; string b; a := b; end program c;", None),
        ("program c; print(1, 2); end program c;", "expects 1 argument"),
        ("program c; new_thread(1); end program c;", "must be used as"),
        ("program c; integer a; a := max(1); end program c;", "expects 2 argument"),
        ("program c; integer a; a := nope(1); end program c;", "unknown function"),
        ("program c; integer a; integer a; end program c;", "declared twice"),
        ('program c; begin dialog_window "T"; dialog_message; end dialog_window; end program c;', "expects 1 argument"),
    ],
)
def test_compile_errors(source, message):
    if message is None:
        compile_source(source)  # type mismatch of assignment is a runtime concern
        return
    with pytest.raises(CompileError, match=message):
        compile_source(source)


def test_user_definition_shadows_prelude():
    unit = compile_source(read("user_sequential.ool"))
    assert steps_of(unit, SpawnStep) == []


def test_literal_to_assigned_parameter_is_rejected():
    src = """program c;
  operator inc(v);
    integer v;
    method execute; v := v + 1; end method execute;
  end operator inc;
  inc 3;
end program c;"""
    with pytest.raises(CompileError, match="must be a variable"):
        compile_source(src)


def test_reference_parameter_binds_caller_cell():
    src = """program c;
  integer total;
  operator inc(v);
    integer v;
    method execute; v := v + 1; end method execute;
  end operator inc;
  inc total;
end program c;"""
    assert "CELL v#1: integer -> total#0" in dump_expanded(compile_source(src))


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda path: path.stem)
def test_expand_is_deterministic(path):
    source = path.read_text()
    a, b = compile_source(source), compile_source(source)
    assert a == b
    assert dump_expanded(a) == dump_expanded(b)


@pytest.mark.parametrize("path", corpus_programs(), ids=lambda path: path.stem)
def test_prelude_variant_does_not_change_diagnostics(path):
    compile_source(path.read_text(), prelude="sequential")
    for variant in ("parallel", "sequential"):
        with pytest.raises(CompileError) as info:
            compile_source(CONFORMANCE, prelude=variant)
        assert "get_min_size/2" in info.value.message
