"""Command-line entry point.

    ool <run|check|expand|ast|tokens> FILE [--events FILE] [--surface CxR]
        [--prelude parallel|sequential] [--no-surface]

Exit codes: 0 ok, 1 compile error, 2 runtime error, 3 usage error.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import EventError, OolError, OolRuntimeError
from .expander import dump_expanded, expand
from .lexer import tokenize
from .prelude import VARIANTS, load_prelude
from .runtime import ExecContext, OutputSink, execute
from .syntax import dump_tree, parse
from .windowkit import EventScript, PaintSurface, parse_events

EXIT_OK = 0
EXIT_COMPILE = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3

SUBCOMMANDS = ("run", "check", "expand", "ast", "tokens")
SURFACE_SEPARATOR = "--- surface ---"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    source: str
    events: Optional[str] = None
    cols: int = 80
    rows: int = 25
    prelude: str = "parallel"
    print_surface: bool = True


def _surface_size(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if not m or int(m.group(1)) <= 0 or int(m.group(2)) <= 0:
        raise UsageError(f"invalid surface size {text!r}; expected COLSxROWS with positive numbers")
    return int(m.group(1)), int(m.group(2))


def parse_args(argv: list[str]) -> RunConfig:
    parser = _Parser(prog="ool", description="Operator-oriented language toolchain.")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("source")
    parser.add_argument("--events")
    parser.add_argument("--surface", default="80x25")
    parser.add_argument("--prelude", choices=VARIANTS, default="parallel")
    parser.add_argument("--no-surface", action="store_true")
    ns = parser.parse_args(argv)
    if ns.events is not None and ns.subcommand != "run":
        raise UsageError("--events is only valid with `run`")
    cols, rows = _surface_size(ns.surface)
    return RunConfig(ns.subcommand, ns.source, ns.events, cols, rows, ns.prelude, not ns.no_surface)


def main(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config = parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as exc:
        stderr.write(f"ool: usage error: {exc}\n")
        return EXIT_USAGE

    try:
        with open(config.source, encoding="utf-8") as fh:
            source = fh.read()
        events_text = None
        if config.events is not None:
            with open(config.events, encoding="utf-8") as fh:
                events_text = fh.read()
    except OSError as exc:
        stderr.write(f"ool: {exc}\n")
        return EXIT_USAGE

    filename = config.source
    try:
        tokens = tokenize(source)
        if config.subcommand == "tokens":
            stdout.write("".join(f"{t}\n" for t in tokens))
            return EXIT_OK
        tree = parse(tokens)
        if config.subcommand == "ast":
            stdout.write(dump_tree(tree))
            return EXIT_OK
        unit = expand(tree, load_prelude(config.prelude))
    except OolError as exc:
        stderr.write(exc.diagnostic(filename) + "\n")
        return EXIT_COMPILE
    if config.subcommand == "expand":
        stdout.write(dump_expanded(unit))
        return EXIT_OK
    if config.subcommand == "check":
        return EXIT_OK

    try:
        script = parse_events(events_text) if events_text is not None else EventScript()
    except EventError as exc:
        stderr.write(f"runtime error @{config.events}:{exc.line}: {exc.message}\n")
        return EXIT_RUNTIME
    ctx = ExecContext(
        surface=PaintSurface(config.cols, config.rows),
        events=script,
        output=OutputSink(),
        warn=lambda message: stderr.write(f"warning: {message}\n"),
    )
    status = EXIT_OK
    try:
        execute(unit, ctx)
    except OolRuntimeError as exc:
        for err in getattr(exc, "errors", [exc]):
            stderr.write(f"{err}\n")
        status = EXIT_RUNTIME
    stdout.write(ctx.output.text)
    if config.print_surface:
        stdout.write(SURFACE_SEPARATOR + "\n")
        stdout.write(ctx.surface.dump())
    return status


def entry() -> None:
    sys.exit(main())
