"""Syntax tree, recursive-descent parser and pretty printer.

Grammar sketch::

    program    := 'program' NAME ';' { operator | statement } 'end' 'program' NAME ';'
    operator   := 'operator' NAME [ '(' names ')' ] [ 'inherits' NAME ] ';'
                  { ['shared'] (vardecl | method) } 'end' 'operator' NAME ';'
    method     := 'method' NAME [ '(' names ')' ] ';' { statement } 'end' 'method' NAME ';'
    statement  := 'begin' 'by_nested_operators' ';' { statement } 'end' 'by_nested_operators' ';'
                | 'begin' NAME args ';' { statement } 'end' NAME ';'
                | 'this_operator' '.' NAME [ '(' exprs ')' ] ';'
                | TYPE NAME { ',' NAME } ';'
                | NAME ':=' expr ';'
                | NAME args ';'
    args       := '(' [ exprs ] ')' | INT | STRING | NAME [ '(' exprs ')' ] | <nothing>

Tree equality ignores source positions, so a pretty-printed and re-parsed
program compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import NOWHERE, ParseError, Pos
from .lexer import Token, TokenKind

TYPE_NAMES = ("integer", "string", "semaphore")


def _pos() -> Pos:
    return field(default=NOWHERE, compare=False, repr=False)


# -- expressions ------------------------------------------------------------


@dataclass
class IntLit:
    value: int
    pos: Pos = _pos()


@dataclass
class StrLit:
    value: str
    pos: Pos = _pos()


@dataclass
class Name:
    name: str
    pos: Pos = _pos()


@dataclass
class Call:
    name: str
    args: list
    pos: Pos = _pos()


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass
class Neg:
    operand: "Expr"
    pos: Pos = _pos()


Expr = Union[IntLit, StrLit, Name, Call, Binary, Neg]


# -- statements and definitions ----------------------------------------------


@dataclass
class VarDecl:
    type: str
    name: str
    init: Optional[Expr] = None
    shared: bool = False
    pos: Pos = _pos()


@dataclass
class Use:
    name: str
    args: list
    nested: Optional[list] = None
    pos: Pos = _pos()


@dataclass
class LoopByNested:
    body: list
    pos: Pos = _pos()


@dataclass
class Assign:
    target: str
    value: Expr
    pos: Pos = _pos()


@dataclass
class ThisCall:
    method: str
    args: list
    pos: Pos = _pos()


Statement = Union[Use, LoopByNested, Assign, ThisCall, VarDecl]


@dataclass
class MethodDef:
    name: str
    params: list
    body: list
    shared: bool = False
    pos: Pos = _pos()

    @property
    def locals(self) -> list[VarDecl]:
        return [s for s in self.body if isinstance(s, VarDecl)]


@dataclass
class OperatorDef:
    name: str
    params: list
    parent: Optional[str]
    vars: list
    methods: list
    pos: Pos = _pos()

    def method(self, name: str) -> Optional[MethodDef]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass
class Program:
    name: str
    defs: list
    body: list
    pos: Pos = _pos()


# -- parser -----------------------------------------------------------------


def _describe(tok: Optional[Token]) -> str:
    if tok is None:
        return "end of input"
    if tok.kind is TokenKind.STRING:
        return f'string "{tok.lexeme}"'
    if tok.kind in (TokenKind.KEYWORD, TokenKind.IDENTIFIER, TokenKind.INT):
        return f"{tok.kind.value} `{tok.lexeme}`"
    return f"`{tok.lexeme}`"


class Parser:
    def __init__(self, tokens: list[Token], source_name: str = ""):
        self.tokens = tokens
        self.i = 0
        self.source_name = source_name

    # token helpers

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def pos_of(self, tok: Optional[Token]) -> Pos:
        if tok is None:
            if self.tokens:
                last = self.tokens[-1]
                return Pos(last.line, last.column + len(last.lexeme), self.source_name)
            return Pos(1, 1, self.source_name)
        return Pos(tok.line, tok.column, self.source_name)

    def here(self) -> Pos:
        return self.pos_of(self.peek())

    def at(self, kind: TokenKind, lexeme: Optional[str] = None, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind is kind and (lexeme is None or tok.lexeme == lexeme)

    def at_kw(self, word: str, offset: int = 0) -> bool:
        return self.at(TokenKind.KEYWORD, word, offset)

    def fail(self, expected: str) -> ParseError:
        tok = self.peek()
        found = _describe(tok)
        return ParseError(f"expected {expected}, found {found}", self.pos_of(tok), expected, found)

    def expect(self, kind: TokenKind, lexeme: Optional[str] = None, what: Optional[str] = None) -> Token:
        if not self.at(kind, lexeme):
            raise self.fail(what or (f"`{lexeme}`" if lexeme else kind.value))
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def keyword(self, word: str) -> Token:
        return self.expect(TokenKind.KEYWORD, word)

    def ident(self, what: str = "identifier") -> Token:
        return self.expect(TokenKind.IDENTIFIER, what=what)

    def semi(self) -> None:
        self.expect(TokenKind.SEMICOLON, what="`;`")

    def end_name(self, expected: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.IDENTIFIER:
            raise self.fail(f"`{expected}`")
        if tok.lexeme != expected:
            raise ParseError(
                f"mismatched end: expected `{expected}`, found `{tok.lexeme}`",
                self.pos_of(tok),
                expected,
                tok.lexeme,
            )
        self.i += 1

    # program structure

    def parse_program(self) -> Program:
        start = self.keyword("program")
        name = self.ident("program name").lexeme
        self.semi()
        defs: list[OperatorDef] = []
        body: list = []
        while not (self.at_kw("end") and self.at_kw("program", 1)):
            if self.peek() is None:
                raise self.fail("`end program`")
            if self.at_kw("operator"):
                defs.append(self.parse_operator())
            else:
                body.extend(self.parse_statement(in_method=False))
        self.keyword("end")
        self.keyword("program")
        self.end_name(name)
        self.semi()
        if self.peek() is not None:
            raise self.fail("end of input")
        return Program(name, defs, body, self.pos_of(start))

    def parse_name_list(self) -> list[str]:
        names: list[str] = []
        if self.at(TokenKind.LPAREN):
            self.i += 1
            if not self.at(TokenKind.RPAREN):
                names.append(self.ident("parameter name").lexeme)
                while self.at(TokenKind.COMMA):
                    self.i += 1
                    names.append(self.ident("parameter name").lexeme)
            self.expect(TokenKind.RPAREN, what="`)`")
        return names

    def parse_operator(self) -> OperatorDef:
        start = self.keyword("operator")
        name = self.ident("operator name").lexeme
        params = self.parse_name_list()
        parent = None
        if self.at_kw("inherits"):
            self.i += 1
            parent = self.ident("parent operator name").lexeme
        self.semi()
        vars_: list[VarDecl] = []
        methods: list[MethodDef] = []
        while not self.at_kw("end"):
            shared = False
            if self.at_kw("shared"):
                shared = True
                self.i += 1
            if self.at_kw("method"):
                meth = self.parse_method(shared)
                if any(m.name == meth.name for m in methods):
                    raise ParseError(f"duplicate method `{meth.name}` in operator `{name}`", meth.pos)
                methods.append(meth)
            elif self.at(TokenKind.KEYWORD) and self.peek().lexeme in TYPE_NAMES:
                for decl in self.parse_var_decl(shared=shared, allow_init=True):
                    if any(v.name == decl.name for v in vars_):
                        raise ParseError(f"duplicate variable `{decl.name}` in operator `{name}`", decl.pos)
                    vars_.append(decl)
            else:
                raise self.fail("variable declaration, `method` or `end operator`")
        self.keyword("end")
        self.keyword("operator")
        self.end_name(name)
        self.semi()
        declared = {v.name for v in vars_}
        for p in params:
            if p not in declared:
                raise ParseError(f"parameter `{p}` of operator `{name}` has no type declaration", self.pos_of(start))
        return OperatorDef(name, params, parent, vars_, methods, self.pos_of(start))

    def parse_method(self, shared: bool) -> MethodDef:
        start = self.keyword("method")
        name = self.ident("method name").lexeme
        params = self.parse_name_list()
        self.semi()
        body: list = []
        while not self.at_kw("end"):
            if self.peek() is None:
                raise self.fail(f"`end method {name}`")
            body.extend(self.parse_statement(in_method=True))
        self.keyword("end")
        self.keyword("method")
        self.end_name(name)
        self.semi()
        declared = {d.name for d in body if isinstance(d, VarDecl)}
        for p in params:
            if p not in declared:
                raise ParseError(f"parameter `{p}` of method `{name}` has no type declaration", self.pos_of(start))
        if len(set(params)) != len(params):
            raise ParseError(f"duplicate parameter in method `{name}`", self.pos_of(start))
        return MethodDef(name, params, body, shared, self.pos_of(start))

    def parse_var_decl(self, shared: bool = False, allow_init: bool = False) -> list[VarDecl]:
        type_name = self.expect(TokenKind.KEYWORD).lexeme
        decls = []
        while True:
            tok = self.ident("variable name")
            init = None
            if self.at(TokenKind.ASSIGN):
                if not allow_init:
                    raise ParseError(
                        "initializers are only allowed on operator variables", self.here(), "`;`", "`:=`"
                    )
                self.i += 1
                init = self.parse_literal()
            decls.append(VarDecl(type_name, tok.lexeme, init, shared, self.pos_of(tok)))
            if not self.at(TokenKind.COMMA):
                break
            self.i += 1
        self.semi()
        return decls

    def parse_literal(self) -> Expr:
        tok = self.peek()
        if self.at(TokenKind.INT):
            self.i += 1
            return IntLit(int(tok.lexeme), self.pos_of(tok))
        if self.at(TokenKind.STRING):
            self.i += 1
            return StrLit(tok.lexeme, self.pos_of(tok))
        if self.at(TokenKind.MINUS) and self.at(TokenKind.INT, offset=1):
            self.i += 2
            num = self.tokens[self.i - 1]
            return Neg(IntLit(int(num.lexeme), self.pos_of(num)), self.pos_of(tok))
        raise self.fail("literal initializer")

    # statements

    def parse_statement(self, in_method: bool) -> list:
        tok = self.peek()
        pos = self.pos_of(tok)
        if tok is None:
            raise self.fail("statement")
        if self.at_kw("begin"):
            self.i += 1
            if self.at_kw("by_nested_operators"):
                if not in_method:
                    raise ParseError("`by_nested_operators` is only allowed inside a method", self.here())
                self.i += 1
                self.semi()
                body = self.parse_block_body("by_nested_operators", in_method)
                self.keyword("by_nested_operators")
                self.semi()
                return [LoopByNested(body, pos)]
            name = self.ident("operator name after `begin`").lexeme
            args = self.parse_use_args()
            self.semi()
            nested = self.parse_block_body(name, in_method)
            self.end_name(name)
            self.semi()
            return [Use(name, args, nested, pos)]
        if self.at_kw("this_operator"):
            if not in_method:
                raise ParseError("`this_operator` is only allowed inside a method", pos)
            self.i += 1
            self.expect(TokenKind.DOT, what="`.`")
            method = self.ident("method name").lexeme
            args = []
            if self.at(TokenKind.LPAREN):
                args = self.parse_call_args()
            self.semi()
            return [ThisCall(method, args, pos)]
        if tok.kind is TokenKind.KEYWORD and tok.lexeme in TYPE_NAMES:
            return self.parse_var_decl()
        if tok.kind is TokenKind.KEYWORD and tok.lexeme == "shared":
            raise ParseError("`shared` is only allowed on operator members", pos)
        if tok.kind is not TokenKind.IDENTIFIER:
            raise self.fail("statement")
        self.i += 1
        if self.at(TokenKind.ASSIGN):
            self.i += 1
            value = self.parse_expr()
            self.semi()
            return [Assign(tok.lexeme, value, pos)]
        args = self.parse_use_args()
        self.semi()
        return [Use(tok.lexeme, args, None, pos)]

    def parse_block_body(self, name: str, in_method: bool) -> list:
        body: list = []
        while not self.at_kw("end"):
            if self.peek() is None:
                raise self.fail(f"`end {name}`")
            body.extend(self.parse_statement(in_method))
        self.keyword("end")
        return body

    def parse_use_args(self) -> list:
        tok = self.peek()
        if self.at(TokenKind.LPAREN):
            return self.parse_call_args()
        if self.at(TokenKind.INT):
            self.i += 1
            return [IntLit(int(tok.lexeme), self.pos_of(tok))]
        if self.at(TokenKind.STRING):
            self.i += 1
            return [StrLit(tok.lexeme, self.pos_of(tok))]
        if self.at(TokenKind.IDENTIFIER):
            self.i += 1
            if self.at(TokenKind.LPAREN):
                return [Call(tok.lexeme, self.parse_call_args(), self.pos_of(tok))]
            return [Name(tok.lexeme, self.pos_of(tok))]
        return []

    def parse_call_args(self) -> list:
        self.expect(TokenKind.LPAREN, what="`(`")
        args = []
        if not self.at(TokenKind.RPAREN):
            args.append(self.parse_expr())
            while self.at(TokenKind.COMMA):
                self.i += 1
                args.append(self.parse_expr())
        self.expect(TokenKind.RPAREN, what="`)` or `,`")
        return args

    # expressions

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.at(TokenKind.PLUS) or self.at(TokenKind.MINUS):
            op = self.peek()
            self.i += 1
            left = Binary(op.lexeme, left, self.parse_term(), self.pos_of(op))
        return left

    def parse_term(self) -> Expr:
        left = self.parse_unary()
        while self.at(TokenKind.STAR) or self.at(TokenKind.SLASH):
            op = self.peek()
            self.i += 1
            left = Binary(op.lexeme, left, self.parse_unary(), self.pos_of(op))
        return left

    def parse_unary(self) -> Expr:
        if self.at(TokenKind.MINUS):
            tok = self.peek()
            self.i += 1
            return Neg(self.parse_unary(), self.pos_of(tok))
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        pos = self.pos_of(tok)
        if self.at(TokenKind.INT):
            self.i += 1
            return IntLit(int(tok.lexeme), pos)
        if self.at(TokenKind.STRING):
            self.i += 1
            return StrLit(tok.lexeme, pos)
        if self.at(TokenKind.IDENTIFIER):
            self.i += 1
            if self.at(TokenKind.LPAREN):
                return Call(tok.lexeme, self.parse_call_args(), pos)
            return Name(tok.lexeme, pos)
        if self.at(TokenKind.LPAREN):
            self.i += 1
            inner = self.parse_expr()
            self.expect(TokenKind.RPAREN, what="`)`")
            return inner
        raise self.fail("expression")


def parse(tokens: list[Token], source_name: str = "") -> Program:
    return Parser(tokens, source_name).parse_program()


# -- pretty printer ---------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, StrLit):
        return f'"{e.value}"'
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, Neg):
        inner = format_expr(e.operand)
        if isinstance(e.operand, (Binary, Neg)):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        left = format_expr(e.left)
        if isinstance(e.left, Binary) and _PREC[e.left.op] < prec:
            left = f"({left})"
        right = format_expr(e.right)
        if isinstance(e.right, Binary) and _PREC[e.right.op] <= prec:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _format_use_args(args: list) -> str:
    if not args:
        return ""
    if len(args) == 1 and isinstance(args[0], (IntLit, StrLit, Name)):
        return " " + format_expr(args[0])
    return "(" + ", ".join(format_expr(a) for a in args) + ")"


def _format_params(params: list) -> str:
    return f"({', '.join(params)})" if params else ""


def _var_line(v: VarDecl) -> str:
    text = f"{'shared ' if v.shared else ''}{v.type} {v.name}"
    if v.init is not None:
        text += f" := {format_expr(v.init)}"
    return text + ";"


def _statement_lines(s, depth: int) -> list[str]:
    pad = "  " * depth
    if isinstance(s, VarDecl):
        return [pad + _var_line(s)]
    if isinstance(s, Assign):
        return [f"{pad}{s.target} := {format_expr(s.value)};"]
    if isinstance(s, ThisCall):
        args = f"({', '.join(format_expr(a) for a in s.args)})" if s.args else ""
        return [f"{pad}this_operator.{s.method}{args};"]
    if isinstance(s, LoopByNested):
        lines = [f"{pad}begin by_nested_operators;"]
        for inner in s.body:
            lines += _statement_lines(inner, depth + 1)
        return lines + [f"{pad}end by_nested_operators;"]
    if isinstance(s, Use):
        if s.nested is None:
            return [f"{pad}{s.name}{_format_use_args(s.args)};"]
        lines = [f"{pad}begin {s.name}{_format_use_args(s.args)};"]
        for inner in s.nested:
            lines += _statement_lines(inner, depth + 1)
        return lines + [f"{pad}end {s.name};"]
    raise TypeError(f"not a statement: {s!r}")


def _operator_lines(op: OperatorDef, depth: int) -> list[str]:
    pad = "  " * depth
    header = f"{pad}operator {op.name}{_format_params(op.params)}"
    if op.parent:
        header += f" inherits {op.parent}"
    lines = [header + ";"]
    for v in op.vars:
        lines.append("  " * (depth + 1) + _var_line(v))
    for m in op.methods:
        mpad = "  " * (depth + 1)
        lines.append(f"{mpad}{'shared ' if m.shared else ''}method {m.name}{_format_params(m.params)};")
        for s in m.body:
            lines += _statement_lines(s, depth + 2)
        lines.append(f"{mpad}end method {m.name};")
    lines.append(f"{pad}end operator {op.name};")
    return lines


def pretty_print(tree: Program) -> str:
    lines = [f"program {tree.name};"]
    for op in tree.defs:
        lines += _operator_lines(op, 1)
    for s in tree.body:
        lines += _statement_lines(s, 1)
    lines.append(f"end program {tree.name};")
    return "\n".join(lines)


# -- tree dump --------------------------------------------------------------


def _at(node) -> str:
    return f"@{node.pos.line}:{node.pos.col}"


def _dump_expr(e: Expr, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(e, IntLit):
        out.append(f"{pad}IntLit {e.value} {_at(e)}")
    elif isinstance(e, StrLit):
        out.append(f'{pad}StrLit "{e.value}" {_at(e)}')
    elif isinstance(e, Name):
        out.append(f"{pad}Name {e.name} {_at(e)}")
    elif isinstance(e, Call):
        out.append(f"{pad}Call {e.name} {_at(e)}")
        for a in e.args:
            _dump_expr(a, depth + 1, out)
    elif isinstance(e, Binary):
        out.append(f"{pad}Binary {e.op} {_at(e)}")
        _dump_expr(e.left, depth + 1, out)
        _dump_expr(e.right, depth + 1, out)
    elif isinstance(e, Neg):
        out.append(f"{pad}Neg - {_at(e)}")
        _dump_expr(e.operand, depth + 1, out)


def _dump_stmt(s, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    if isinstance(s, VarDecl):
        shared = "shared " if s.shared else ""
        out.append(f"{pad}Var {shared}{s.type} {s.name} {_at(s)}")
        if s.init is not None:
            _dump_expr(s.init, depth + 1, out)
    elif isinstance(s, Assign):
        out.append(f"{pad}Assign {s.target} {_at(s)}")
        _dump_expr(s.value, depth + 1, out)
    elif isinstance(s, ThisCall):
        out.append(f"{pad}ThisCall {s.method} {_at(s)}")
        for a in s.args:
            _dump_expr(a, depth + 1, out)
    elif isinstance(s, LoopByNested):
        out.append(f"{pad}LoopByNested by_nested_operators {_at(s)}")
        for inner in s.body:
            _dump_stmt(inner, depth + 1, out)
    elif isinstance(s, Use):
        kind = "Use" if s.nested is None else "BlockUse"
        out.append(f"{pad}{kind} {s.name} {_at(s)}")
        for a in s.args:
            _dump_expr(a, depth + 1, out)
        for inner in s.nested or ():
            _dump_stmt(inner, depth + 1, out)


def dump_tree(tree: Program) -> str:
    """Indented node-per-line dump: ``KIND name @LINE:COL``."""
    out = [f"Program {tree.name} {_at(tree)}"]
    for op in tree.defs:
        parent = f" inherits {op.parent}" if op.parent else ""
        out.append(f"  Operator {op.name}{parent} {_at(op)}")
        for p in op.params:
            out.append(f"    Param {p} {_at(op)}")
        for v in op.vars:
            _dump_stmt(v, 2, out)
        for m in op.methods:
            shared = "shared " if m.shared else ""
            out.append(f"    Method {shared}{m.name} {_at(m)}")
            for p in m.params:
                out.append(f"      Param {p} {_at(m)}")
            for s in m.body:
                _dump_stmt(s, 3, out)
    for s in tree.body:
        _dump_stmt(s, 1, out)
    return "\n".join(out) + "\n"
