"""Diagnostics shared by every stage of the toolchain."""

from __future__ import annotations

from dataclasses import dataclass

PRELUDE_SOURCE_NAME = "<prelude>"


@dataclass(frozen=True)
class Pos:
    line: int
    col: int
    source: str = ""

    def __str__(self) -> str:
        if self.source == PRELUDE_SOURCE_NAME:
            return f"{self.source}:{self.line}:{self.col}"
        return f"{self.line}:{self.col}"


NOWHERE = Pos(0, 0)


class OolError(Exception):
    """Base class; carries a source position and a bare message."""

    def __init__(self, message: str, pos: Pos = NOWHERE):
        super().__init__(message)
        self.message = message
        self.pos = pos

    @property
    def line(self) -> int:
        return self.pos.line

    @property
    def column(self) -> int:
        return self.pos.col

    def diagnostic(self, filename: str) -> str:
        name = self.pos.source or filename
        return f"{name}:{self.pos.line}:{self.pos.col}: {self.message}"

    def __str__(self) -> str:
        return f"{self.pos}: {self.message}"


class LexError(OolError):
    pass


class ParseError(OolError):
    def __init__(self, message: str, pos: Pos = NOWHERE, expected: str = "", found: str = ""):
        super().__init__(message, pos)
        self.expected = expected
        self.found = found


class CompileError(OolError):
    pass


class OolRuntimeError(OolError):
    def __str__(self) -> str:
        return f"runtime error @{self.pos}: {self.message}"


class EventError(OolError):
    pass
