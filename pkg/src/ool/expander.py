"""Compile-time expansion into a tree of primitive steps.

Every use of an operator is replaced by a frame that inlines the operator's
``execute`` method, specialised to the statements nested at that use. Loops
by nested operators are unrolled once per nested statement, ``this_operator``
calls are inlined against the statement of the current copy, and
``num_nested_operators`` becomes an integer constant. What remains refers only
to concrete storage cells and literals.

Name lookup at a statement goes: the enclosing method's (or program's) locals
and its operator's own members, then the shared members of the operators
whose nested lists enclose the use site (innermost first), then operator
definitions and builtins.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .errors import NOWHERE, PRELUDE_SOURCE_NAME, CompileError, Pos
from .primitives import BUILTINS, FUNCTIONS, Builtin
from .syntax import (
    Assign,
    Binary,
    Call,
    IntLit,
    LoopByNested,
    MethodDef,
    Name,
    Neg,
    OperatorDef,
    Program,
    StrLit,
    ThisCall,
    Use,
    VarDecl,
    format_expr,
)

MAX_EXPANSION_DEPTH = 200


# -- intermediary program ---------------------------------------------------


@dataclass(frozen=True)
class CellRef:
    frame: int
    name: str

    def __str__(self) -> str:
        return f"{self.name}#{self.frame}"


@dataclass(frozen=True)
class Const:
    value: Union[int, str]
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class Load:
    cell: CellRef
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class FnCall:
    name: str
    args: tuple
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "XExpr"
    right: "XExpr"
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class Negate:
    operand: "XExpr"
    pos: Pos = NOWHERE


XExpr = Union[Const, Load, FnCall, BinOp, Negate]


@dataclass(frozen=True)
class CellSpec:
    """One cell of a new frame: bound to an existing cell, initialised, or defaulted."""

    name: str
    type: str
    ref: Optional[CellRef] = None
    init: Optional[XExpr] = None


@dataclass(frozen=True)
class FrameSpec:
    frame: int
    label: str
    cells: tuple


@dataclass(frozen=True)
class Seq:
    steps: tuple
    pos: Pos = NOWHERE
    label: str = ""


@dataclass(frozen=True)
class AssignStep:
    target: CellRef
    value: XExpr
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class EvalStep:
    value: XExpr
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class BuiltinStep:
    name: str
    args: tuple
    body: Optional[Seq] = None
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class FrameStep:
    kind: str  # "operator" or "method"
    frames: tuple
    body: Seq
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class SpawnStep:
    sem: CellRef
    body: Seq
    pos: Pos = NOWHERE


@dataclass(frozen=True)
class WaitZeroStep:
    sem: CellRef
    pos: Pos = NOWHERE


Step = Union[Seq, AssignStep, EvalStep, BuiltinStep, FrameStep, SpawnStep, WaitZeroStep]


@dataclass(frozen=True)
class ExpandedUnit:
    globals: FrameSpec
    body: Seq


# -- inheritance ------------------------------------------------------------


@dataclass
class FlatOperator:
    name: str
    params: list
    vars: dict  # name -> VarDecl, parent order first
    methods: dict  # name -> MethodDef
    pos: Pos = NOWHERE

    @property
    def shared(self) -> frozenset:
        names = [v.name for v in self.vars.values() if v.shared]
        names += [m.name for m in self.methods.values() if m.shared]
        return frozenset(names)


def merge_definitions(program: Program, prelude: Optional[Program]) -> list[OperatorDef]:
    """Prelude definitions overridden by same-named user definitions."""
    merged: dict[str, OperatorDef] = {}
    for source in (prelude, program):
        if source is None:
            continue
        seen = set()
        for op in source.defs:
            if op.name in seen:
                raise CompileError(f"operator `{op.name}` is defined twice", op.pos)
            seen.add(op.name)
            merged[op.name] = op
    return list(merged.values())


def flatten_inheritance(defs: list[OperatorDef]) -> dict[str, FlatOperator]:
    by_name = {}
    for op in defs:
        if op.name in by_name:
            raise CompileError(f"operator `{op.name}` is defined twice", op.pos)
        by_name[op.name] = op
    flat: dict[str, FlatOperator] = {}

    def build(name: str, path: list[str]) -> FlatOperator:
        if name in flat:
            return flat[name]
        op = by_name[name]
        if name in path:
            cycle = path[path.index(name) :] + [name]
            raise CompileError("inheritance cycle: " + " -> ".join(cycle), op.pos)
        vars_: dict = {}
        methods: dict = {}
        if op.parent is not None:
            if op.parent not in by_name:
                raise CompileError(f"operator `{name}` inherits unknown operator `{op.parent}`", op.pos)
            base = build(op.parent, path + [name])
            vars_.update(base.vars)
            methods.update(base.methods)
        for v in op.vars:
            vars_[v.name] = v
        for m in op.methods:
            methods[m.name] = m
        result = FlatOperator(op.name, list(op.params), vars_, methods, op.pos)
        flat[name] = result
        return result

    for name in by_name:
        build(name, [])
    return flat


# -- expansion state --------------------------------------------------------


@dataclass(frozen=True)
class VarBinding:
    cell: CellRef
    type: str


@dataclass(frozen=True)
class MethodBinding:
    instance: "Instance"
    method: MethodDef


@dataclass(frozen=True)
class OperatorBinding:
    op: FlatOperator


@dataclass(frozen=True)
class BuiltinBinding:
    builtin: Builtin


class Scope:
    def __init__(self, names: Optional[dict] = None, parent: Optional["Scope"] = None, what: str = ""):
        self.names = dict(names or {})
        self.parent = parent
        self.what = what

    def lookup(self, name: str):
        scope = self
        while scope is not None:
            if name in scope.names:
                return scope.names[name]
            scope = scope.parent
        return None

    def describe(self) -> list[str]:
        out = []
        scope = self
        while scope is not None:
            out.append(scope.what)
            scope = scope.parent
        return out


@dataclass(eq=False)
class Instance:
    op: FlatOperator
    frame: int
    site: Use
    chain: tuple  # instances enclosing the use site, innermost first
    nested: list = field(default_factory=list)
    members: Optional[Scope] = None

    def __repr__(self) -> str:
        return f"Instance({self.op.name}#{self.frame})"


@dataclass(eq=False)
class NestedOp:
    stmt: object
    ctx: "Ctx"
    instance: Optional[Instance] = None

    def describe(self) -> str:
        s = self.stmt
        if isinstance(s, Assign):
            return f"assignment `{s.target} := {format_expr(s.value)}`"
        if isinstance(s, Use):
            return f"`{s.name}`"
        if isinstance(s, ThisCall):
            return f"`this_operator.{s.method}`"
        return "statement"


@dataclass(frozen=True)
class Ctx:
    scope: Scope
    chain: tuple = ()
    instance: Optional[Instance] = None  # operator whose method text is being expanded
    loop: Optional[NestedOp] = None  # what this_operator designates here


@dataclass(frozen=True)
class ConformanceRequirement:
    method: str
    arity: int
    pos: Pos


def _assigned_names(body: list) -> set:
    out = set()
    for s in body:
        if isinstance(s, Assign):
            out.add(s.target)
        elif isinstance(s, LoopByNested):
            out |= _assigned_names(s.body)
        elif isinstance(s, Use) and s.nested:
            out |= _assigned_names(s.nested)
    return out


def _check_declarations(body: list, where: str) -> None:
    for s in body:
        inner = None
        if isinstance(s, LoopByNested):
            inner = s.body
        elif isinstance(s, Use):
            inner = s.nested
        for t in inner or ():
            if isinstance(t, VarDecl):
                raise CompileError(f"variable declarations must appear at the top level of {where}", t.pos)
        if inner:
            _check_declarations(inner, where)


class Expander:
    def __init__(self, operators: dict[str, FlatOperator]):
        self.operators = operators
        self.next_frame = 1
        self.path: list = []  # (key, label) of methods being inlined

    def new_frame(self) -> int:
        frame = self.next_frame
        self.next_frame += 1
        return frame

    # names

    def resolve_name(self, name: str, ctx: Ctx, pos: Pos):
        found = ctx.scope.lookup(name)
        if found is not None:
            return found
        for inst in ctx.chain:
            if name in inst.op.shared:
                return inst.members.names[name]
        if name in self.operators:
            return OperatorBinding(self.operators[name])
        if name in BUILTINS:
            return BuiltinBinding(BUILTINS[name])
        searched = ctx.scope.describe()
        searched += [f"shared members of {inst.op.name}" for inst in ctx.chain]
        searched.append("operators and builtins")
        raise CompileError(f"unresolved name `{name}` (searched: {', '.join(searched)})", pos)

    def resolve_var(self, name: str, ctx: Ctx, pos: Pos) -> VarBinding:
        found = self.resolve_name(name, ctx, pos)
        if not isinstance(found, VarBinding):
            raise CompileError(f"`{name}` is not a variable", pos)
        return found

    def resolve_expr(self, e, ctx: Ctx) -> XExpr:
        if isinstance(e, IntLit):
            return Const(e.value, e.pos)
        if isinstance(e, StrLit):
            return Const(e.value, e.pos)
        if isinstance(e, Name):
            if e.name == "num_nested_operators":
                if ctx.instance is None:
                    raise CompileError("`num_nested_operators` used outside an operator body", e.pos)
                return Const(len(ctx.instance.nested), e.pos)
            return Load(self.resolve_var(e.name, ctx, e.pos).cell, e.pos)
        if isinstance(e, Call):
            if e.name not in FUNCTIONS:
                raise CompileError(f"unknown function `{e.name}`", e.pos)
            if len(e.args) != FUNCTIONS[e.name]:
                raise CompileError(f"`{e.name}` expects {FUNCTIONS[e.name]} argument(s), got {len(e.args)}", e.pos)
            return FnCall(e.name, tuple(self.resolve_expr(a, ctx) for a in e.args), e.pos)
        if isinstance(e, Binary):
            return BinOp(e.op, self.resolve_expr(e.left, ctx), self.resolve_expr(e.right, ctx), e.pos)
        if isinstance(e, Neg):
            return Negate(self.resolve_expr(e.operand, ctx), e.pos)
        raise TypeError(f"not an expression: {e!r}")

    def bind_argument(self, param: str, type_name: str, arg, ctx: Ctx, assigned: bool, callee: str) -> CellSpec:
        if isinstance(arg, Name) and arg.name != "num_nested_operators":
            found = self.resolve_name(arg.name, ctx, arg.pos)
            if isinstance(found, VarBinding):
                if found.type != type_name:
                    raise CompileError(
                        f"argument `{arg.name}` of type {found.type} passed to {type_name} parameter `{param}` of `{callee}`",
                        arg.pos,
                    )
                return CellSpec(param, type_name, ref=found.cell)
        if assigned:
            raise CompileError(
                f"parameter `{param}` of `{callee}` is assigned, so its argument must be a variable", arg.pos
            )
        if type_name == "semaphore":
            raise CompileError(f"semaphore parameter `{param}` of `{callee}` needs a semaphore variable", arg.pos)
        return CellSpec(param, type_name, init=self.resolve_expr(arg, ctx))

    # operators and methods

    def member_scope(self, inst: Instance) -> Scope:
        names = {}
        for v in inst.op.vars.values():
            names[v.name] = VarBinding(CellRef(inst.frame, v.name), v.type)
        for m in inst.op.methods.values():
            names[m.name] = MethodBinding(inst, m)
        return Scope(names, None, f"members of {inst.op.name}")

    def instantiate(self, op: FlatOperator, use: Use, ctx: Ctx) -> tuple[Instance, list]:
        """Allocate the instance for ``use`` and, recursively, for operators nested in it."""
        if len(use.args) != len(op.params):
            raise CompileError(
                f"operator `{op.name}` expects {len(op.params)} argument(s), got {len(use.args)}", use.pos
            )
        inst = Instance(op, self.new_frame(), use, ctx.chain)
        inst.members = self.member_scope(inst)
        assigned = set()
        for m in op.methods.values():
            assigned |= _assigned_names(m.body)
        cells = []
        for param, arg in zip(op.params, use.args):
            decl = op.vars[param]
            cells.append(self.bind_argument(param, decl.type, arg, ctx, param in assigned, op.name))
        for v in op.vars.values():
            if v.name in op.params:
                continue
            init = self.resolve_expr(v.init, ctx) if v.init is not None else None
            cells.append(CellSpec(v.name, v.type, init=init))
        specs = [FrameSpec(inst.frame, op.name, tuple(cells))]
        inner = replace(ctx, chain=(inst,) + ctx.chain)
        for stmt in use.nested or ():
            if isinstance(stmt, VarDecl):
                raise CompileError("variable declarations are not allowed in a nested operator list", stmt.pos)
            nested = NestedOp(stmt, inner)
            if isinstance(stmt, Use):
                found = self.resolve_name(stmt.name, inner, stmt.pos)
                if isinstance(found, OperatorBinding):
                    child, child_specs = self.instantiate(found.op, stmt, inner)
                    nested.instance = child
                    specs += child_specs
            inst.nested.append(nested)
        return inst, specs

    def inline_method(self, inst: Instance, name: str, args: list, ctx: Ctx, pos: Pos) -> FrameStep:
        method = inst.op.methods.get(name)
        if method is None or len(method.params) != len(args):
            raise CompileError(f"operator `{inst.op.name}` has no method {name}/{len(args)}", pos)
        label = f"{inst.op.name}.{name}"
        key = (id(inst.site), name)
        keys = [k for k, _ in self.path]
        if key in keys:
            cycle = [lbl for _, lbl in self.path[keys.index(key) :]] + [label]
            raise CompileError("expansion cycle: " + " -> ".join(cycle), pos)
        if len(self.path) >= MAX_EXPANSION_DEPTH:
            raise CompileError(f"expansion deeper than {MAX_EXPANSION_DEPTH} levels at `{label}`", pos)

        where = f"method `{label}`"
        _check_declarations(method.body, where)
        decls: dict[str, VarDecl] = {}
        for d in method.locals:
            if d.name in decls:
                raise CompileError(f"variable `{d.name}` declared twice in {where}", d.pos)
            decls[d.name] = d
        frame = self.new_frame()
        assigned = _assigned_names(method.body)
        cells = []
        scope = Scope({}, inst.members, f"locals of {label}")
        for param, arg in zip(method.params, args):
            decl = decls[param]
            cells.append(self.bind_argument(param, decl.type, arg, ctx, param in assigned, label))
            scope.names[param] = VarBinding(CellRef(frame, param), decl.type)
        for d in decls.values():
            if d.name not in method.params:
                cells.append(CellSpec(d.name, d.type))

        self.path.append((key, label))
        try:
            mctx = Ctx(scope, inst.chain, inst, None)
            body = self.expand_body(method.body, mctx, declare=set(method.params), frame=frame)
        finally:
            self.path.pop()
        return FrameStep("method", (FrameSpec(frame, label, tuple(cells)),), Seq(tuple(body), method.pos), pos)

    def use_operator(self, op: FlatOperator, use: Use, ctx: Ctx) -> FrameStep:
        if "execute" not in op.methods:
            raise CompileError(f"operator `{op.name}` has no method execute/0", use.pos)
        try:
            inst, specs = self.instantiate(op, use, ctx)
            body = self.inline_method(inst, "execute", [], ctx, use.pos)
        except CompileError as exc:
            # point prelude-internal failures at the user's code
            if exc.pos.source == PRELUDE_SOURCE_NAME and use.pos.source != PRELUDE_SOURCE_NAME:
                raise CompileError(f"{exc.message} (at {exc.pos}, expanding `{op.name}`)", use.pos) from None
            raise
        return FrameStep("operator", tuple(specs), Seq((body,), use.pos), use.pos)

    def call_nested(self, nested: NestedOp, call: ThisCall, ctx: Ctx) -> list:
        req = ConformanceRequirement(call.method, len(call.args), call.pos)
        if nested.instance is not None:
            method = nested.instance.op.methods.get(req.method)
            if method is None or len(method.params) != req.arity:
                raise self.conformance_error(nested, req)
            return [self.inline_method(nested.instance, req.method, call.args, ctx, call.pos)]
        if req.method != "execute" or req.arity != 0:
            raise self.conformance_error(nested, req, plain=True)
        return self.expand_statement(nested.stmt, nested.ctx)

    def conformance_error(self, nested: NestedOp, req: ConformanceRequirement, plain: bool = False) -> CompileError:
        pos = nested.stmt.pos
        detail = " (a plain statement only provides execute/0)" if plain else ""
        return CompileError(
            f"nested operator {nested.describe()} at {pos} does not conform: "
            f"missing method {req.method}/{req.arity}{detail}, required by this_operator call at {req.pos}",
            pos,
        )

    # statements

    def expand_body(self, body: list, ctx: Ctx, declare: Optional[set] = None, frame: Optional[int] = None) -> list:
        """Expand a method or program body; its variable declarations become visible in order."""
        steps = []
        for stmt in body:
            if isinstance(stmt, VarDecl):
                if declare is not None and stmt.name in declare:
                    continue
                ctx.scope.names[stmt.name] = VarBinding(CellRef(frame, stmt.name), stmt.type)
                continue
            steps += self.expand_statement(stmt, ctx)
        return steps

    def expand_block(self, body: list, ctx: Ctx) -> list:
        steps = []
        for stmt in body:
            if isinstance(stmt, VarDecl):
                raise CompileError("variable declarations must appear at the top level of a body", stmt.pos)
            steps += self.expand_statement(stmt, ctx)
        return steps

    def expand_statement(self, stmt, ctx: Ctx) -> list:
        if isinstance(stmt, Assign):
            target = self.resolve_var(stmt.target, ctx, stmt.pos)
            return [AssignStep(target.cell, self.resolve_expr(stmt.value, ctx), stmt.pos)]
        if isinstance(stmt, ThisCall):
            if ctx.loop is None:
                raise CompileError("`this_operator` used outside a loop by nested operators", stmt.pos)
            return self.call_nested(ctx.loop, stmt, ctx)
        if isinstance(stmt, LoopByNested):
            if ctx.instance is None:
                raise CompileError("loop by nested operators outside an operator body", stmt.pos)
            copies = []
            k = len(ctx.instance.nested)
            for i, nested in enumerate(ctx.instance.nested, start=1):
                body = self.expand_block(stmt.body, replace(ctx, loop=nested))
                copies.append(Seq(tuple(body), stmt.pos, f"by_nested_operators {i}/{k}"))
            return copies
        if isinstance(stmt, Use):
            return self.expand_use(stmt, ctx)
        if isinstance(stmt, VarDecl):
            raise CompileError("variable declarations must appear at the top level of a body", stmt.pos)
        raise TypeError(f"not a statement: {stmt!r}")

    def expand_use(self, use: Use, ctx: Ctx) -> list:
        if use.name in FUNCTIONS and ctx.scope.lookup(use.name) is None and use.nested is None:
            return [EvalStep(self.resolve_expr(Call(use.name, use.args, use.pos), ctx), use.pos)]
        found = self.resolve_name(use.name, ctx, use.pos)
        if isinstance(found, VarBinding):
            raise CompileError(f"`{use.name}` is a variable, not an operator", use.pos)
        if isinstance(found, MethodBinding):
            if use.nested is not None:
                raise CompileError(f"method `{use.name}` cannot take a nested operator list", use.pos)
            if len(found.method.params) != len(use.args):
                raise CompileError(
                    f"method `{use.name}` expects {len(found.method.params)} argument(s), got {len(use.args)}",
                    use.pos,
                )
            return [self.inline_method(found.instance, use.name, use.args, ctx, use.pos)]
        if isinstance(found, OperatorBinding):
            return [self.use_operator(found.op, use, ctx)]
        return [self.expand_builtin(found.builtin, use, ctx)]

    def expand_builtin(self, builtin: Builtin, use: Use, ctx: Ctx) -> Step:
        if len(use.args) != len(builtin.modes):
            raise CompileError(
                f"`{builtin.name}` expects {len(builtin.modes)} argument(s), got {len(use.args)}", use.pos
            )
        if builtin.block and use.nested is None:
            raise CompileError(f"`{builtin.name}` must be used as `begin {builtin.name} ... end {builtin.name}`", use.pos)
        if not builtin.block and use.nested is not None:
            raise CompileError(f"`{builtin.name}` does not take a nested operator list", use.pos)
        args = []
        for mode, arg in zip(builtin.modes, use.args):
            if mode == "value":
                args.append(self.resolve_expr(arg, ctx))
                continue
            wanted = mode.split(":", 1)[1]
            if not isinstance(arg, Name):
                raise CompileError(f"`{builtin.name}` needs a {wanted} variable here", arg.pos)
            var = self.resolve_var(arg.name, ctx, arg.pos)
            if var.type != wanted:
                raise CompileError(f"`{builtin.name}` needs a {wanted} variable, `{arg.name}` is {var.type}", arg.pos)
            args.append(var.cell)
        body = Seq(tuple(self.expand_block(use.nested, ctx)), use.pos) if builtin.block else None
        if builtin.name == "new_thread":
            return SpawnStep(args[0], body, use.pos)
        if builtin.name == "wait_zero_semaphore":
            return WaitZeroStep(args[0], use.pos)
        return BuiltinStep(builtin.name, tuple(args), body, use.pos)


def expand(program: Program, prelude: Optional[Program] = None) -> ExpandedUnit:
    """Expand ``program`` against ``prelude`` (whose operators it may shadow)."""
    operators = flatten_inheritance(merge_definitions(program, prelude))
    expander = Expander(operators)
    _check_declarations(program.body, "the program")
    cells = []
    seen = set()
    for d in program.body:
        if isinstance(d, VarDecl):
            if d.name in seen:
                raise CompileError(f"variable `{d.name}` declared twice", d.pos)
            seen.add(d.name)
            cells.append(CellSpec(d.name, d.type))
    scope = Scope({}, None, f"program {program.name}")
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10000))
    try:
        body = expander.expand_body(program.body, Ctx(scope), frame=0)
    finally:
        sys.setrecursionlimit(limit)
    return ExpandedUnit(FrameSpec(0, program.name, tuple(cells)), Seq(tuple(body), program.pos))


# -- dump -------------------------------------------------------------------


def _at(pos: Pos) -> str:
    return f"@{pos}"


def format_xexpr(e) -> str:
    if isinstance(e, CellRef):
        return str(e)
    if isinstance(e, Const):
        return f'"{e.value}"' if isinstance(e.value, str) else str(e.value)
    if isinstance(e, Load):
        return str(e.cell)
    if isinstance(e, FnCall):
        return f"{e.name}({', '.join(format_xexpr(a) for a in e.args)})"
    if isinstance(e, BinOp):
        return f"({format_xexpr(e.left)} {e.op} {format_xexpr(e.right)})"
    if isinstance(e, Negate):
        return f"-{format_xexpr(e.operand)}"
    raise TypeError(f"not a resolved expression: {e!r}")


def _cell_line(frame: int, c: CellSpec) -> str:
    text = f"CELL {c.name}#{frame}: {c.type}"
    if c.ref is not None:
        return f"{text} -> {c.ref}"
    if c.init is not None:
        return f"{text} = {format_xexpr(c.init)}"
    return text


def _dump_step(step, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(step, Seq):
        if not step.steps:
            out.append(f"{pad}SEQ (empty)")
            return
        if step.label:
            out.append(f"{pad}SEQ {step.label} {_at(step.pos)}")
            depth += 1
        for s in step.steps:
            _dump_step(s, depth, out)
    elif isinstance(step, AssignStep):
        out.append(f"{pad}ASSIGN {step.target} := {format_xexpr(step.value)} {_at(step.pos)}")
    elif isinstance(step, EvalStep):
        out.append(f"{pad}EVAL {format_xexpr(step.value)} {_at(step.pos)}")
    elif isinstance(step, BuiltinStep):
        args = ", ".join(format_xexpr(a) for a in step.args)
        out.append(f"{pad}BUILTIN {step.name} {_at(step.pos)} ({args})")
        if step.body is not None:
            _dump_step(step.body, depth + 1, out)
    elif isinstance(step, FrameStep):
        out.append(f"{pad}FRAME {step.kind} {step.frames[0].label} {_at(step.pos)}")
        for spec in step.frames:
            out.append(f"{pad}  ALLOC {spec.label} #{spec.frame}")
            for c in spec.cells:
                out.append(f"{pad}    {_cell_line(spec.frame, c)}")
        _dump_step(step.body, depth + 1, out)
    elif isinstance(step, SpawnStep):
        out.append(f"{pad}SPAWN {step.sem} {_at(step.pos)}")
        _dump_step(step.body, depth + 1, out)
    elif isinstance(step, WaitZeroStep):
        out.append(f"{pad}WAITZERO {step.sem} {_at(step.pos)}")
    else:
        raise TypeError(f"not a step: {step!r}")


def dump_expanded(unit: ExpandedUnit) -> str:
    out = [f"  {_cell_line(0, c)}".strip() for c in unit.globals.cells]
    _dump_step(unit.body, 0, out)
    return "\n".join(out) + "\n"


def iter_steps(step):
    """Depth-first walk over a step tree."""
    yield step
    if isinstance(step, Seq):
        for s in step.steps:
            yield from iter_steps(s)
    elif isinstance(step, (FrameStep, SpawnStep)):
        yield from iter_steps(step.body)
    elif isinstance(step, BuiltinStep) and step.body is not None:
        yield from iter_steps(step.body)
