"""Regular expression ASTs with a classic textual dialect and an SMT-LIB dialect.

The core constructors are Empty, Epsilon, Range, Union, Concat, Star and
Complement; `+` and `?` are desugared at parse time.  Characters are Unicode
codepoints; transitions elsewhere in the package use inclusive codepoint
intervals, so character classes stay compact regardless of alphabet size.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_CODEPOINT = 0x10FFFF

# Reserved element separator ('†'), outside the user alphabet.
SEPARATOR = 0x2020
SEPARATOR_CHAR = chr(SEPARATOR)


class RegexError(ValueError):
    """Raised on malformed regex input (syntax or bad range)."""


class Regex:
    __slots__ = ()


@dataclass(frozen=True)
class Empty(Regex):
    pass


@dataclass(frozen=True)
class Epsilon(Regex):
    pass


@dataclass(frozen=True)
class Range(Regex):
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= MAX_CODEPOINT):
            raise RegexError(f"bad character range {self.lo}-{self.hi}")


@dataclass(frozen=True)
class Union(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Star(Regex):
    inner: Regex


@dataclass(frozen=True)
class Complement(Regex):
    inner: Regex


def rex_plus(e: Regex) -> Regex:
    return Concat(e, Star(e))


def rex_opt(e: Regex) -> Regex:
    return Union(Epsilon(), e)


def literal(s: str) -> Regex:
    """Regex accepting exactly the string s."""
    out: Regex = Epsilon()
    for ch in s:
        piece = Range(ord(ch), ord(ch))
        out = piece if isinstance(out, Epsilon) else Concat(out, piece)
    return out


def union_all(parts) -> Regex:
    parts = list(parts)
    if not parts:
        return Empty()
    out = parts[0]
    for p in parts[1:]:
        out = Union(out, p)
    return out


def concat_all(parts) -> Regex:
    parts = list(parts)
    if not parts:
        return Epsilon()
    out = parts[0]
    for p in parts[1:]:
        out = Concat(out, p)
    return out


def is_nullable(e: Regex) -> bool:
    """Whether the empty string is in L(e).  Complement defers to automata."""
    if isinstance(e, (Empty, Range)):
        return False
    if isinstance(e, (Epsilon, Star)):
        return True
    if isinstance(e, Union):
        return is_nullable(e.left) or is_nullable(e.right)
    if isinstance(e, Concat):
        return is_nullable(e.left) and is_nullable(e.right)
    if isinstance(e, Complement):
        return not is_nullable(e.inner)
    raise TypeError(f"not a regex: {e!r}")


# ---------------------------------------------------------------------------
# Classic dialect
# ---------------------------------------------------------------------------

_CLASSIC_META = set("()[]|*+?.\\~")


class _ClassicParser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, msg: str):
        raise RegexError(f"regex syntax error at column {self.pos + 1}: {msg}")

    def peek(self):
        return self.src[self.pos] if self.pos < len(self.src) else None

    def take(self):
        ch = self.peek()
        if ch is None:
            self.error("unexpected end of input")
        self.pos += 1
        return ch

    def parse(self) -> Regex:
        e = self.alternation()
        if self.pos != len(self.src):
            self.error(f"unexpected {self.src[self.pos]!r}")
        return e

    def alternation(self) -> Regex:
        out = self.concatenation()
        while self.peek() == "|":
            self.take()
            out = Union(out, self.concatenation())
        return out

    def concatenation(self) -> Regex:
        parts = []
        while self.peek() is not None and self.peek() not in ")|":
            parts.append(self.repetition())
        return concat_all(parts)

    def repetition(self) -> Regex:
        e = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.take()
            if op == "*":
                e = Star(e)
            elif op == "+":
                e = rex_plus(e)
            else:
                e = rex_opt(e)
        return e

    def atom(self) -> Regex:
        ch = self.peek()
        if ch == "(":
            self.take()
            e = self.alternation()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return e
        if ch == "~":
            self.take()
            if self.peek() != "(":
                self.error("expected '(' after '~'")
            self.take()
            e = self.alternation()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return Complement(e)
        if ch == "[":
            return self.char_class()
        if ch == ".":
            self.take()
            return union_all(Range(lo, hi) for lo, hi in sigma_ranges())
        if ch == "\\":
            self.take()
            cp = ord(self.take())
            return Range(cp, cp)
        if ch is None or ch in _CLASSIC_META:
            self.error(f"unexpected {ch!r}")
        self.take()
        return Range(ord(ch), ord(ch))

    def class_char(self) -> int:
        ch = self.take()
        if ch == "\\":
            ch = self.take()
        return ord(ch)

    def char_class(self) -> Regex:
        self.take()  # '['
        negated = False
        if self.peek() == "^":
            negated = True
            self.take()
        items: list[tuple[int, int]] = []
        if self.peek() == "]":  # leading ']' is a literal
            self.take()
            items.append((ord("]"), ord("]")))
        while self.peek() != "]":
            if self.peek() is None:
                self.error("unterminated character class")
            lo = self.class_char()
            if self.peek() == "-" and self.src[self.pos + 1 : self.pos + 2] != "]":
                self.take()
                hi = self.class_char()
                if lo > hi:
                    self.error(f"range with lo > hi: {chr(lo)}-{chr(hi)}")
                items.append((lo, hi))
            else:
                items.append((lo, lo))
        self.take()  # ']'
        if negated:
            items = list(subtract_ranges(sigma_ranges(), items))
            if not items:
                return Empty()
        return union_all(Range(lo, hi) for lo, hi in items)


def sigma_ranges() -> tuple[tuple[int, int], ...]:
    """The user alphabet as codepoint intervals: all of Unicode minus the separator."""
    return ((0, SEPARATOR - 1), (SEPARATOR + 1, MAX_CODEPOINT))


def normalize_ranges(ranges) -> tuple[tuple[int, int], ...]:
    """Sort and merge overlapping/adjacent intervals."""
    rs = sorted((lo, hi) for lo, hi in ranges if lo <= hi)
    out: list[tuple[int, int]] = []
    for lo, hi in rs:
        if out and lo <= out[-1][1] + 1:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def subtract_ranges(universe, holes) -> tuple[tuple[int, int], ...]:
    """Intervals of `universe` not covered by `holes`."""
    holes = normalize_ranges(holes)
    out = []
    for lo, hi in normalize_ranges(universe):
        cur = lo
        for hlo, hhi in holes:
            if hhi < cur or hlo > hi:
                continue
            if hlo > cur:
                out.append((cur, hlo - 1))
            cur = max(cur, hhi + 1)
            if cur > hi:
                break
        if cur <= hi:
            out.append((cur, hi))
    return tuple(out)


def intersect_two_ranges(a, b):
    lo = max(a[0], b[0])
    hi = min(a[1], b[1])
    return (lo, hi) if lo <= hi else None


# ---------------------------------------------------------------------------
# Printer (classic dialect); parse(print(e)) == e up to desugaring
# ---------------------------------------------------------------------------

def _escape_char(cp: int, in_class: bool) -> str:
    ch = chr(cp)
    if in_class:
        if ch in "]\\-^":
            return "\\" + ch
    elif ch in _CLASSIC_META:
        return "\\" + ch
    if 0x20 <= cp < 0x7F:
        return ch
    return ch  # non-ASCII printed raw; the parser reads codepoints directly


def print_regex(e: Regex) -> str:
    def prec(e):
        if isinstance(e, Union):
            return 0
        if isinstance(e, Concat):
            return 1
        return 2

    def wrap(sub, level):
        s = go(sub)
        return f"({s})" if prec(sub) < level else s

    def go(e):
        if isinstance(e, Empty):
            return "~(.*)"
        if isinstance(e, Epsilon):
            return "()"
        if isinstance(e, Range):
            if e.lo == e.hi:
                return _escape_char(e.lo, in_class=False)
            return f"[{_escape_char(e.lo, True)}-{_escape_char(e.hi, True)}]"
        if isinstance(e, Union):
            return f"{go(e.left)}|{go(e.right)}"
        if isinstance(e, Concat):
            return f"{wrap(e.left, 1)}{wrap(e.right, 1)}"
        if isinstance(e, Star):
            return f"{wrap(e.inner, 2)}*"
        if isinstance(e, Complement):
            return f"~({go(e.inner)})"
        raise TypeError(f"not a regex: {e!r}")

    return go(e)


# ---------------------------------------------------------------------------
# SMT-LIB dialect (re.* terms as already-read s-expressions)
# ---------------------------------------------------------------------------

def regex_from_sexpr(sx) -> Regex:
    """Build a Regex from a parsed SMT-LIB s-expression (lists/atoms/strings)."""
    from .sexpr import SexprAtom, SexprString

    if isinstance(sx, SexprString):
        raise RegexError("string literal is not a regex; wrap it in str.to_re")
    if isinstance(sx, SexprAtom):
        name = sx.value
        if name == "re.none":
            return Empty()
        if name == "re.all":
            return Star(union_all(Range(lo, hi) for lo, hi in sigma_ranges()))
        if name == "re.allchar":
            return union_all(Range(lo, hi) for lo, hi in sigma_ranges())
        raise RegexError(f"unknown regex constant {name!r}")
    head = sx[0]
    if not isinstance(head, SexprAtom):
        raise RegexError("malformed regex term")
    op = head.value
    args = sx[1:]
    if op == "str.to_re":
        if len(args) != 1 or not isinstance(args[0], SexprString):
            raise RegexError("str.to_re expects one string literal")
        return literal(args[0].value)
    if op == "re.range":
        if (
            len(args) != 2
            or not all(isinstance(a, SexprString) for a in args)
            or any(len(a.value) != 1 for a in args)
        ):
            raise RegexError("re.range expects two single-character strings")
        lo, hi = ord(args[0].value), ord(args[1].value)
        if lo > hi:
            raise RegexError(f"re.range with lo > hi: {args[0].value!r}-{args[1].value!r}")
        return Range(lo, hi)
    sub = [regex_from_sexpr(a) for a in args]
    if op == "re.++":
        if not sub:
            raise RegexError("re.++ needs at least one argument")
        return concat_all(sub)
    if op == "re.union":
        if not sub:
            raise RegexError("re.union needs at least one argument")
        return union_all(sub)
    if op == "re.inter":
        if not sub:
            raise RegexError("re.inter needs at least one argument")
        out = sub[0]
        for p in sub[1:]:
            out = Complement(Union(Complement(out), Complement(p)))
        return out
    if op == "re.*":
        (x,) = sub
        return Star(x)
    if op == "re.+":
        (x,) = sub
        return rex_plus(x)
    if op == "re.opt":
        (x,) = sub
        return rex_opt(x)
    if op == "re.comp":
        (x,) = sub
        return Complement(x)
    raise RegexError(f"unknown regex operator {op!r}")


def parse_regex(src: str, dialect: str = "classic") -> Regex:
    """Parse a regex in the classic or smtlib dialect."""
    if dialect == "classic":
        return _ClassicParser(src).parse()
    if dialect == "smtlib":
        from .sexpr import read_one

        return regex_from_sexpr(read_one(src))
    raise ValueError(f"unknown dialect {dialect!r}")
