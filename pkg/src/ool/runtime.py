"""Interpreter for expanded units.

Each strand of execution walks the step tree on its own Python thread.
Spawned bodies share cells with their spawner by reference; semaphores are
the only synchronisation the language offers.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO

from .errors import NOWHERE, OolRuntimeError, Pos
from .expander import (
    AssignStep,
    BinOp,
    BuiltinStep,
    CellRef,
    CellSpec,
    Const,
    EvalStep,
    ExpandedUnit,
    FnCall,
    FrameStep,
    Load,
    Negate,
    Seq,
    SpawnStep,
    WaitZeroStep,
)
from .primitives import INT_MAX, INT_MIN
from .windowkit import EventScript, PaintSurface

log = logging.getLogger(__name__)


class Semaphore:
    """Counter with atomic assignment, atomic decrement and wait-for-zero."""

    def __init__(self, count: int = 0):
        self._count = count
        self._cond = threading.Condition()

    @property
    def count(self) -> int:
        with self._cond:
            return self._count

    def assign(self, n: int) -> None:
        if n < 0:
            raise ValueError(f"cannot assign negative count {n} to a semaphore")
        with self._cond:
            self._count = n
            self._cond.notify_all()

    def decrement(self) -> None:
        with self._cond:
            if self._count == 0:
                raise ValueError("semaphore decremented below zero")
            self._count -= 1
            if self._count == 0:
                self._cond.notify_all()

    def wait_zero(self) -> int:
        """Block until the count is zero; returns the count observed (always 0)."""
        with self._cond:
            self._cond.wait_for(lambda: self._count == 0)
            return self._count

    def __repr__(self) -> str:
        return f"<semaphore {self._count}>"


class Cell:
    __slots__ = ("type", "value")

    def __init__(self, type_name: str, value=None):
        self.type = type_name
        if value is None:
            value = Semaphore() if type_name == "semaphore" else {"integer": 0, "string": ""}[type_name]
        self.value = value

    def __repr__(self) -> str:
        return f"Cell({self.type}, {self.value!r})"


class Environment:
    """Frame id -> {name: Cell}. Child environments share the parent's cells."""

    def __init__(self, frames: Optional[dict] = None):
        self.frames = frames or {}

    def child(self, new_frames: dict) -> "Environment":
        frames = dict(self.frames)
        frames.update(new_frames)
        return Environment(frames)

    def cell(self, ref: CellRef) -> Cell:
        return self.frames[ref.frame][ref.name]


def type_of(value) -> str:
    if isinstance(value, Semaphore):
        return "semaphore"
    if isinstance(value, str):
        return "string"
    return "integer"


class OutputSink:
    def __init__(self, stream: Optional[TextIO] = None):
        self.lines: list[str] = []
        self.stream = stream
        self._lock = threading.Lock()

    def write_line(self, text: str) -> None:
        with self._lock:
            self.lines.append(text)
            if self.stream is not None:
                self.stream.write(text + "\n")

    @property
    def text(self) -> str:
        with self._lock:
            return "".join(line + "\n" for line in self.lines)


@dataclass
class ExecContext:
    surface: PaintSurface = field(default_factory=PaintSurface)
    events: EventScript = field(default_factory=EventScript)
    output: OutputSink = field(default_factory=OutputSink)
    sleep: Callable[[float], None] = time.sleep
    clock: Callable[[], float] = time.monotonic
    warn: Optional[Callable[[str], None]] = None
    # counts observed by each completed wait_zero_semaphore, in completion order
    join_counts: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def warning(self, message: str) -> None:
        self.warnings.append(message)
        if self.warn is not None:
            self.warn(message)
        else:
            log.warning(message)


def _check_int(value: int, pos: Pos) -> int:
    if not INT_MIN <= value <= INT_MAX:
        raise OolRuntimeError("integer overflow", pos)
    return value


class Interpreter:
    def __init__(self, ctx: ExecContext):
        self.ctx = ctx
        self.threads: list[threading.Thread] = []
        self.deferred: list[OolRuntimeError] = []
        self._lock = threading.Lock()

    # expressions

    def eval(self, e, env: Environment):
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Load):
            return env.cell(e.cell).value
        if isinstance(e, BinOp):
            left = self.eval(e.left, env)
            right = self.eval(e.right, env)
            if type_of(left) != "integer" or type_of(right) != "integer":
                raise OolRuntimeError(
                    f"cannot apply `{e.op}` to {type_of(left)} and {type_of(right)}", e.pos
                )
            if e.op == "+":
                result = left + right
            elif e.op == "-":
                result = left - right
            elif e.op == "*":
                result = left * right
            else:
                if right == 0:
                    raise OolRuntimeError("division by zero", e.pos)
                result = abs(left) // abs(right)
                if (left < 0) != (right < 0):
                    result = -result
            return _check_int(result, e.pos)
        if isinstance(e, Negate):
            value = self.eval(e.operand, env)
            if type_of(value) != "integer":
                raise OolRuntimeError(f"cannot negate a {type_of(value)}", e.pos)
            return _check_int(-value, e.pos)
        if isinstance(e, FnCall):
            args = [self.eval(a, env) for a in e.args]
            if e.name == "max":
                if any(type_of(a) != "integer" for a in args):
                    raise OolRuntimeError("max expects integers", e.pos)
                return max(args)
            if e.name == "string_length":
                if type_of(args[0]) != "string":
                    raise OolRuntimeError(f"string_length expects a string, got {type_of(args[0])}", e.pos)
                return len(args[0])
            raise OolRuntimeError(f"unknown function `{e.name}`", e.pos)
        raise TypeError(f"not a resolved expression: {e!r}")

    def store(self, cell: Cell, value, pos: Pos) -> None:
        if cell.type == "semaphore":
            if type_of(value) != "integer":
                raise OolRuntimeError(f"cannot assign a {type_of(value)} to a semaphore", pos)
            try:
                cell.value.assign(value)
            except ValueError as exc:
                raise OolRuntimeError(str(exc), pos) from None
            return
        if type_of(value) != cell.type:
            raise OolRuntimeError(f"cannot assign a {type_of(value)} to a {cell.type} variable", pos)
        cell.value = value

    # steps

    def run(self, step, env: Environment) -> None:
        if isinstance(step, Seq):
            for s in step.steps:
                self.run(s, env)
        elif isinstance(step, AssignStep):
            self.store(env.cell(step.target), self.eval(step.value, env), step.pos)
        elif isinstance(step, EvalStep):
            self.eval(step.value, env)
        elif isinstance(step, FrameStep):
            self.run_frame(step, env)
        elif isinstance(step, BuiltinStep):
            self.run_builtin(step, env)
        elif isinstance(step, SpawnStep):
            self.spawn(step, env)
        elif isinstance(step, WaitZeroStep):
            sem = env.cell(step.sem).value
            self.ctx.join_counts.append(sem.wait_zero())
        else:
            raise TypeError(f"not a step: {step!r}")

    def make_cell(self, spec: CellSpec, env: Environment, pos: Pos) -> Cell:
        if spec.ref is not None:
            return env.cell(spec.ref)
        cell = Cell(spec.type)
        if spec.init is not None:
            self.store(cell, self.eval(spec.init, env), spec.init.pos if spec.init.pos != NOWHERE else pos)
        return cell

    def run_frame(self, step: FrameStep, env: Environment) -> None:
        for spec in step.frames:
            frame: dict = {}
            # later cells and frames of the same step may refer to earlier ones
            env = env.child({spec.frame: frame})
            for c in spec.cells:
                frame[c.name] = self.make_cell(c, env, step.pos)
        if step.kind != "operator":
            self.run(step.body, env)
            return
        saved = self.ctx.surface.translation
        try:
            self.run(step.body, env)
        finally:
            self.ctx.surface.translation = saved

    def spawn(self, step: SpawnStep, env: Environment) -> None:
        sem = env.cell(step.sem).value

        def strand() -> None:
            try:
                self.run(step.body, env)
            except OolRuntimeError as exc:
                self.defer(exc)
            finally:
                try:
                    sem.decrement()
                except ValueError as exc:
                    self.defer(OolRuntimeError(str(exc), step.pos))

        thread = threading.Thread(target=strand, name=f"strand@{step.pos}", daemon=True)
        with self._lock:
            self.threads.append(thread)
        thread.start()

    def defer(self, exc: OolRuntimeError) -> None:
        with self._lock:
            self.deferred.append(exc)

    def run_builtin(self, step: BuiltinStep, env: Environment) -> None:
        name = step.name
        ctx = self.ctx
        if name == "for_each_event":
            label_cell, handled_cell, closing_cell = (env.cell(ref) for ref in step.args)
            while closing_cell.value == 0:
                event = ctx.events.next()
                if event is None:
                    break
                label_cell.value = event.label
                handled_cell.value = 0
                self.run(step.body, env)
                if handled_cell.value == 0:
                    ctx.warning(f"event `press {event.label}` matched no button")
            return
        args = [self.eval(a, env) for a in step.args]
        if name == "if_equal":
            left, right = args
            if type_of(left) != type_of(right) or type_of(left) == "semaphore":
                raise OolRuntimeError(f"if_equal cannot compare {type_of(left)} with {type_of(right)}", step.pos)
            if left == right:
                self.run(step.body, env)
        elif name == "print":
            (value,) = args
            if isinstance(value, Semaphore):
                raise OolRuntimeError("cannot print a semaphore", step.pos)
            ctx.output.write_line(str(value))
        elif name == "sleep_ms":
            (ms,) = args
            if type_of(ms) != "integer" or ms < 0:
                raise OolRuntimeError("sleep_ms expects a non-negative integer", step.pos)
            if ms:
                ctx.sleep(ms / 1000.0)
        elif name == "paint_dialog_window":
            title, width, height = args
            self._expect(step, args, ("string", "integer", "integer"))
            if width < 0 or height < 0:
                raise OolRuntimeError("dialog size must not be negative", step.pos)
            ctx.surface.paint_dialog_window(title, width, height)
        elif name == "paint_text":
            self._expect(step, args, ("integer", "integer", "string"))
            ctx.surface.paint_text(*args)
        else:
            raise OolRuntimeError(f"unknown builtin `{name}`", step.pos)

    @staticmethod
    def _expect(step: BuiltinStep, args: list, types: tuple) -> None:
        got = tuple(type_of(a) for a in args)
        if got != types:
            raise OolRuntimeError(f"`{step.name}` expects ({', '.join(types)}), got ({', '.join(got)})", step.pos)

    def join(self) -> None:
        while True:
            with self._lock:
                pending = [t for t in self.threads if t.is_alive()]
            if not pending:
                return
            for t in pending:
                t.join()


def new_environment(unit: ExpandedUnit) -> Environment:
    return Environment({0: {c.name: Cell(c.type) for c in unit.globals.cells}})


def execute(unit: ExpandedUnit, ctx: Optional[ExecContext] = None) -> ExecContext:
    """Run ``unit`` to completion and return the context it ran in.

    Raises OolRuntimeError for the first error on the main strand, or, after
    every strand has finished, for the first error a spawned strand hit (all
    of them are kept on the exception's ``errors`` attribute).
    """
    ctx = ctx or ExecContext()
    interp = Interpreter(ctx)
    interp.run(unit.body, new_environment(unit))
    interp.join()
    if ctx.events.remaining:
        ctx.warning(f"{ctx.events.remaining} unconsumed event(s) ignored")
    if interp.deferred:
        first = interp.deferred[0]
        first.errors = list(interp.deferred)
        raise first
    return ctx
