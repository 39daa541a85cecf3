from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import LexError, Pos

KEYWORDS = frozenset(
    {
        "program",
        "end",
        "operator",
        "method",
        "begin",
        "inherits",
        "shared",
        "by_nested_operators",
        "this_operator",
        "integer",
        "string",
        "semaphore",
    }
)


class TokenKind(str, Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    INT = "int-literal"
    STRING = "string-literal"
    ASSIGN = "assign"
    DOT = "dot"
    COMMA = "comma"
    SEMICOLON = "semicolon"
    LPAREN = "lparen"
    RPAREN = "rparen"
    PLUS = "plus"
    MINUS = "minus"
    STAR = "star"
    SLASH = "slash"
    EOF = "eof"


PUNCTUATION = {
    ":=": TokenKind.ASSIGN,
    ".": TokenKind.DOT,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMICOLON,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    line: int
    column: int

    @property
    def pos(self) -> Pos:
        return Pos(self.line, self.column)

    def __str__(self) -> str:
        return f"{self.line}:{self.column} {self.kind.value} {self.lexeme}"


_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_DIGITS = re.compile(r"[0-9]+")


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens. ``--`` starts a comment running to end of line.

    Raises LexError on an illegal character or an unterminated string literal.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(source)
    while i < n:
        ch = source[i]
        col = i - line_start + 1
        if ch == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue
        if source.startswith("--", i):
            nl = source.find("\n", i)
            i = n if nl < 0 else nl
            continue
        if ch == '"':
            end = i + 1
            while end < n and source[end] not in '"\n':
                end += 1
            if end >= n or source[end] != '"':
                raise LexError("unterminated string literal", Pos(line, col))
            tokens.append(Token(TokenKind.STRING, source[i + 1 : end], line, col))
            i = end + 1
            continue
        m = _WORD.match(source, i)
        if m:
            word = m.group()
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, word, line, col))
            i = m.end()
            continue
        m = _DIGITS.match(source, i)
        if m:
            tokens.append(Token(TokenKind.INT, m.group(), line, col))
            i = m.end()
            continue
        two = source[i : i + 2]
        if two in PUNCTUATION:
            tokens.append(Token(PUNCTUATION[two], two, line, col))
            i += 2
            continue
        if ch in PUNCTUATION:
            tokens.append(Token(PUNCTUATION[ch], ch, line, col))
            i += 1
            continue
        raise LexError(f"illegal character {ch!r}", Pos(line, col))
    return tokens
