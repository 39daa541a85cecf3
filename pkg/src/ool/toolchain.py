"""Source text to expanded unit to result, in one call each."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .expander import ExpandedUnit, expand
from .lexer import tokenize
from .prelude import load_prelude
from .runtime import ExecContext, OutputSink, execute
from .syntax import Program, parse
from .windowkit import EventScript, PaintSurface, parse_events


def parse_source(source: str, source_name: str = "") -> Program:
    return parse(tokenize(source), source_name)


def compile_source(source: str, prelude: str = "parallel", source_name: str = "") -> ExpandedUnit:
    return expand(parse_source(source, source_name), load_prelude(prelude))


@dataclass
class RunResult:
    output: str
    surface: str
    context: ExecContext


def run_source(
    source: str,
    events: Optional[str] = None,
    prelude: str = "parallel",
    cols: int = 80,
    rows: int = 25,
    ctx: Optional[ExecContext] = None,
) -> RunResult:
    """Compile and execute ``source``; ``events`` is event-script text."""
    unit = compile_source(source, prelude)
    if ctx is None:
        script = parse_events(events) if events is not None else EventScript()
        ctx = ExecContext(surface=PaintSurface(cols, rows), events=script, output=OutputSink(), warn=lambda m: None)
    execute(unit, ctx)
    return RunResult(ctx.output.text, ctx.surface.dump(), ctx)
