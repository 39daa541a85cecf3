"""Signatures of the operators and functions the toolchain provides natively.

An argument mode is either ``"value"`` (any expression) or ``"var:<type>"``
(a variable of that type, passed as its storage cell).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Builtin:
    name: str
    modes: tuple
    block: bool = False


BUILTINS = {
    b.name: b
    for b in (
        Builtin("print", ("value",)),
        Builtin("sleep_ms", ("value",)),
        Builtin("paint_dialog_window", ("value", "value", "value")),
        Builtin("paint_text", ("value", "value", "value")),
        Builtin("wait_zero_semaphore", ("var:semaphore",)),
        Builtin("new_thread", ("var:semaphore",), block=True),
        # label receives each event, handled is zeroed before the body runs,
        # the loop stops once closing becomes non-zero
        Builtin("for_each_event", ("var:string", "var:integer", "var:integer"), block=True),
        Builtin("if_equal", ("value", "value"), block=True),
    )
}

FUNCTIONS = {"max": 2, "string_length": 1}

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1
