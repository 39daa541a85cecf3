"""Toolchain for a small operator-oriented language.

Operators may carry nested statement lists; loops over those nested
statements are unrolled at compile time, so any operator that has the
methods a loop calls can be nested, with no common base required.
"""

from .errors import CompileError, EventError, LexError, OolError, OolRuntimeError, ParseError, Pos
from .expander import ExpandedUnit, dump_expanded, expand, flatten_inheritance
from .lexer import Token, TokenKind, tokenize
from .prelude import load_prelude, prelude_source
from .runtime import ExecContext, Semaphore, execute
from .syntax import Program, dump_tree, parse, pretty_print
from .toolchain import compile_source, parse_source, run_source
from .windowkit import PaintSurface, parse_events, surface_dump

__all__ = [
    "CompileError",
    "EventError",
    "ExecContext",
    "ExpandedUnit",
    "LexError",
    "OolError",
    "OolRuntimeError",
    "PaintSurface",
    "ParseError",
    "Pos",
    "Program",
    "Semaphore",
    "Token",
    "TokenKind",
    "compile_source",
    "dump_expanded",
    "dump_tree",
    "execute",
    "expand",
    "flatten_inheritance",
    "load_prelude",
    "parse",
    "parse_events",
    "parse_source",
    "prelude_source",
    "pretty_print",
    "run_source",
    "surface_dump",
    "tokenize",
]
