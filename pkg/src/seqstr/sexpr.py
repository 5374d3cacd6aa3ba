"""Minimal s-expression reader for the SMT-LIB subset used by the frontend.

Atoms are simple symbols or numerals; string literals use SMT-LIB 2.6 syntax
(double quotes, doubled-quote escape).  Each node remembers its source line and
column for error reporting.
"""

from __future__ import annotations

from dataclasses import dataclass


class SexprError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class SexprAtom:
    value: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SexprString:
    value: str
    line: int = 0
    col: int = 0


class SexprList(tuple):
    """A parenthesized list; carries the position of its opening paren."""

    line = 0
    col = 0

    def __new__(cls, items, line=0, col=0):
        obj = super().__new__(cls, items)
        obj.line = line
        obj.col = col
        return obj


_SYMBOL_EXTRA = set("~!@$%^&*_-+=<>.?/")


def _is_symbol_char(ch: str) -> bool:
    return ch.isalnum() or ch in _SYMBOL_EXTRA


class _Reader:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, msg: str):
        raise SexprError(msg, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.src):
                if self.src[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def skip_ws(self):
        while self.pos < len(self.src):
            ch = self.src[self.pos]
            if ch == ";":
                while self.pos < len(self.src) and self.src[self.pos] != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.src)

    def read(self):
        self.skip_ws()
        if self.pos >= len(self.src):
            self.error("unexpected end of input")
        ch = self.src[self.pos]
        line, col = self.line, self.col
        if ch == "(":
            self._advance()
            items = []
            while True:
                self.skip_ws()
                if self.pos >= len(self.src):
                    raise SexprError("unbalanced '('", line, col)
                if self.src[self.pos] == ")":
                    self._advance()
                    return SexprList(items, line, col)
                items.append(self.read())
        if ch == ")":
            self.error("unbalanced ')'")
        if ch == '"':
            self._advance()
            chars = []
            while True:
                if self.pos >= len(self.src):
                    raise SexprError("unterminated string literal", line, col)
                c = self.src[self.pos]
                if c == '"':
                    self._advance()
                    if self.pos < len(self.src) and self.src[self.pos] == '"':
                        chars.append('"')
                        self._advance()
                        continue
                    return SexprString("".join(chars), line, col)
                chars.append(c)
                self._advance()
        if not _is_symbol_char(ch):
            self.error(f"unexpected character {ch!r}")
        chars = []
        while self.pos < len(self.src) and _is_symbol_char(self.src[self.pos]):
            chars.append(self.src[self.pos])
            self._advance()
        return SexprAtom("".join(chars), line, col)


def read_all(src: str) -> list:
    reader = _Reader(src)
    out = []
    while not reader.at_end():
        out.append(reader.read())
    return out


def read_one(src: str):
    reader = _Reader(src)
    node = reader.read()
    if not reader.at_end():
        reader.error("trailing input after s-expression")
    return node


def position(node) -> tuple[int, int]:
    return (getattr(node, "line", 0), getattr(node, "col", 0))
