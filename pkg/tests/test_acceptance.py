"""End-to-end acceptance checks, one test per criterion.

A summary line per criterion is printed at the end of the pytest run.
"""

import io
import re
import subprocess
import sys
import time

import pytest

from ool.cli import main
from ool.expander import AssignStep, SpawnStep, WaitZeroStep, dump_expanded, iter_steps
from ool.prelude import prelude_source
from ool.runtime import ExecContext, OutputSink, execute
from ool.toolchain import compile_source, parse_source, run_source
from ool.syntax import pretty_print

import layout_oracle
from conftest import CORPUS, GOLDEN, corpus_programs, read

EVENTS = {
    "yesno": "press_yes.evt",
    "inheritance": "count_twice.evt",
    "nested_dialogs": "nested.evt",
}


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.criterion(1, "hello-world surface equals the layout-oracle golden, under 1 s")
def test_hello_world_fidelity():
    start = time.monotonic()
    result = run_source(read("hello_world.ool"))
    elapsed = time.monotonic() - start
    golden = (GOLDEN / "hello_world.surface.txt").read_text()
    assert golden == layout_oracle.golden_text("hello_world")
    assert result.surface == golden
    assert layout_oracle.dialog_size(layout_oracle.GOLDENS["hello_world"][1]) == (13, 2)
    assert golden.splitlines()[0] == "+-Title-------+"
    assert elapsed < 1.0


@pytest.mark.criterion(2, "Ok/Cancel row renders `[ Cancel ][ Ok ]` at width 16")
def test_row_layout():
    result = run_source(read("ok_cancel.ool"))
    assert result.surface == (GOLDEN / "ok_cancel.surface.txt").read_text() == layout_oracle.golden_text("ok_cancel")
    lines = result.surface.splitlines()
    assert lines[2] == "|[ Cancel ][ Ok ]|"
    assert len(lines[0]) == 16 + 2


@pytest.mark.criterion(3, "bare assignment under dialog_window: exit 1, names get_min_size/2 and position")
def test_conformance_error(tmp_path):
    path = tmp_path / "bad.ool"
    path.write_text('program bad;\n  integer answer;\n  begin dialog_window "Title";\n    answer := 1;\n  end dialog_window;\nend program bad;\n')
    code, out, err = cli("run", str(path))
    assert code == 1 and out == ""
    assert err.startswith(f"{path}:4:5: ")
    assert "get_min_size/2" in err


@pytest.mark.criterion(4, "k nested operators unroll to k spawns with the count folded to k, k = 0..8")
def test_unroll_count():
    start = time.monotonic()
    for k in range(9):
        body = "".join("    n := n;\n" for _ in range(k))
        unit = compile_source(f"program gen;\n  integer n;\n  begin parallel_execute;\n{body}  end parallel_execute;\nend program gen;\n")
        dump = dump_expanded(unit)
        spawns = [s for s in iter_steps(unit.body) if isinstance(s, SpawnStep)]
        assert len(spawns) == k == dump.count("SPAWN ")
        (wait,) = [s for s in iter_steps(unit.body) if isinstance(s, WaitZeroStep)]
        assert re.search(rf"ASSIGN {re.escape(str(wait.sem))} := {k} @", dump)
        folded = [s for s in iter_steps(unit.body) if isinstance(s, AssignStep) and s.target == wait.sem]
        assert [s.value.value for s in folded] == [k]
    assert time.monotonic() - start < 1.0


def _timed_run(variant):
    unit = compile_source(read("parallel_tasks.ool"), prelude=variant)
    ctx = ExecContext(output=OutputSink(), warn=lambda m: None)
    start = time.monotonic()
    execute(unit, ctx)
    return time.monotonic() - start, ctx


@pytest.mark.criterion(5, "three 200 ms tasks: < 450 ms parallel, >= 600 ms sequential, semaphore 0 at join")
def test_fork_join_timing():
    def attempt():
        parallel, pctx = _timed_run("parallel")
        sequential, sctx = _timed_run("sequential")
        ok = parallel < 0.45 and sequential >= 0.6
        return ok, parallel, sequential, pctx, sctx

    ok, parallel, sequential, pctx, sctx = attempt()
    if not ok:  # one retry for scheduler noise
        ok, parallel, sequential, pctx, sctx = attempt()
    assert parallel < 0.45, parallel
    assert sequential >= 0.6, sequential
    assert pctx.join_counts == [0]
    # the sequential definition has no semaphore, so nothing can be left over
    assert sctx.join_counts == []


@pytest.mark.criterion(6, "8 spawned writes all visible after the join, 100 repetitions")
def test_fork_join_visibility():
    unit = compile_source(read("fork_join.ool"))
    for _ in range(100):
        ctx = execute(unit, ExecContext(output=OutputSink(), warn=lambda m: None))
        assert ctx.output.text == "36\n"
        assert ctx.join_counts == [0]


@pytest.mark.criterion(7, "Yes/No dialog prints 1, 0 and 0 for press Yes, press No and no events")
def test_yes_no_dialog():
    source = str(CORPUS / "yesno.ool")
    assert cli("run", source, "--events", str(CORPUS / "press_yes.evt"), "--no-surface")[:2] == (0, "1\n")
    assert cli("run", source, "--events", str(CORPUS / "press_no.evt"), "--no-surface")[:2] == (0, "0\n")
    assert cli("run", source, "--no-surface")[:2] == (0, "0\n")


@pytest.mark.criterion(8, "inherited Cancel button renders; user parallel_execute runs in order")
def test_inheritance():
    surface = run_source(read("ok_cancel.ool")).surface
    assert "[ Cancel ]" in surface
    shadowed = read("user_sequential.ool")
    assert run_source(shadowed).output == "1\n2\n3\n"
    assert not [s for s in iter_steps(compile_source(shadowed).body) if isinstance(s, SpawnStep)]


@pytest.mark.criterion(9, "parse/print/parse is the identity on every corpus program and the prelude")
def test_round_trip():
    sources = [p.read_text() for p in corpus_programs()]
    assert len(sources) >= 12
    sources += [prelude_source("parallel"), prelude_source("sequential")]
    for source in sources:
        tree = parse_source(source)
        assert parse_source(pretty_print(tree)) == tree


@pytest.mark.criterion(10, "two CLI runs of every race-free corpus program give identical stdout")
def test_determinism():
    for path in corpus_programs():
        argv = [sys.executable, "-m", "ool", "run", str(path)]
        if path.stem in EVENTS:
            argv += ["--events", str(CORPUS / EVENTS[path.stem])]
        first = subprocess.run(argv, capture_output=True, timeout=60)
        second = subprocess.run(argv, capture_output=True, timeout=60)
        assert first.returncode == second.returncode == 0, (path.name, first.stderr)
        assert first.stdout == second.stdout, path.name
