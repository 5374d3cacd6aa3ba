"""Sequence-to-string reduction: sequences become separator-delimited strings
and every sequence operation becomes a string operation.

A sequence (u1, ..., um) is encoded as †u1†u2†...†um†; the lone separator
encodes the empty sequence.  The translated constraints use only: constants,
variable copies, concatenation, transducer application, write, subseq, elem,
and length counters, plus regex memberships and integer comparisons.  Index
arithmetic shifts by one (element i sits after the (i+1)-th separator) and
sequence length is the separator count minus one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import frontend as fe
from . import lia
from . import regexes as rx
from .automata import Nfa, SEP, SIGMA
from .regexes import SEPARATOR_CHAR as SEP_CHAR


class SeparatorInElement(ValueError):
    pass


def enc_value(seq) -> str:
    """†-delimited encoding of a sequence of separator-free strings."""
    out = [SEP_CHAR]
    for element in seq:
        if SEP_CHAR in element:
            raise SeparatorInElement(repr(element))
        out.append(element)
        out.append(SEP_CHAR)
    return "".join(out)


def dec_value(w: str) -> tuple:
    """Left inverse of enc_value on well-formed encodings."""
    if not (w.startswith(SEP_CHAR) and w.endswith(SEP_CHAR)):
        raise ValueError(f"not a sequence encoding: {w!r}")
    if w == SEP_CHAR:
        return ()
    return tuple(w[1:-1].split(SEP_CHAR))


def format_automata() -> tuple[Nfa, Nfa]:
    """(A0, A1): encodings †(Σ*†)* and plain separator-free strings Σ*."""
    a0 = Nfa(
        frozenset([0, 1, 2]),
        frozenset(
            {(0, SEP, SEP, 1), (1, SEP, SEP, 1), (2, SEP, SEP, 1)}
            | {(1, lo, hi, 2) for lo, hi in SIGMA}
            | {(2, lo, hi, 2) for lo, hi in SIGMA}
        ),
        frozenset([0]),
        frozenset([1]),
    )
    a1 = Nfa(
        frozenset([0]),
        frozenset((0, lo, hi, 0) for lo, hi in SIGMA),
        frozenset([0]),
        frozenset([0]),
    )
    return a0, a1


def tail_format_automaton() -> Nfa:
    """(Σ*†)*: an encoding with the leading separator removed."""
    return Nfa(
        frozenset([0, 1]),
        frozenset(
            {(0, SEP, SEP, 0), (1, SEP, SEP, 0)}
            | {(0, lo, hi, 1) for lo, hi in SIGMA}
            | {(1, lo, hi, 1) for lo, hi in SIGMA}
        ),
        frozenset([0]),
        frozenset([0]),
    )


# ---------------------------------------------------------------------------
# Translated constraint forms
# ---------------------------------------------------------------------------

TAG_SEQ = "seq"
TAG_STR = "str"
TAG_TAIL = "tail"


@dataclass(frozen=True)
class XConst:
    x: str
    value: str


@dataclass(frozen=True)
class XVarEq:
    x: str
    y: str


@dataclass(frozen=True)
class XConcat:
    x: str
    y: str
    z: str


@dataclass(frozen=True)
class XTransduce:
    x: str
    spec: tuple  # ("filter", e) | ("splitstr", e) | ("matchallstr", e) | ("join", word) | ("tail",)
    y: str


@dataclass(frozen=True)
class XWrite:
    z: str
    x: str
    index: lia.LinTerm
    y: str


@dataclass(frozen=True)
class XSubseq:
    y: str
    x: str
    start: lia.LinTerm
    length: lia.LinTerm


@dataclass(frozen=True)
class XElem:
    y: str
    x: str
    index: lia.LinTerm


@dataclass(frozen=True)
class XStrlen:
    k: str
    x: str


@dataclass(frozen=True)
class XSeqlen:
    k: str
    x: str


@dataclass(frozen=True)
class XMember:
    x: str
    regex: rx.Regex


@dataclass(frozen=True)
class XLia:
    formula: lia.Formula


_DEFINING = (XConst, XVarEq, XConcat, XTransduce, XWrite, XSubseq, XElem)


def defined_var(atom):
    if isinstance(atom, (XConst, XVarEq, XConcat, XTransduce)):
        return atom.x
    if isinstance(atom, XWrite):
        return atom.z
    if isinstance(atom, (XSubseq, XElem)):
        return atom.y
    return None


def argument_vars(atom):
    if isinstance(atom, XConst):
        return ()
    if isinstance(atom, XVarEq):
        return (atom.y,)
    if isinstance(atom, XConcat):
        return (atom.y, atom.z)
    if isinstance(atom, XTransduce):
        return (atom.y,)
    if isinstance(atom, XWrite):
        return (atom.x, atom.y)
    if isinstance(atom, (XSubseq, XElem)):
        return (atom.x,)
    return ()


@dataclass
class XScript:
    tags: dict  # var -> TAG_*
    atoms: list
    int_vars: set


# ---------------------------------------------------------------------------
# Formula translation
# ---------------------------------------------------------------------------


class _Encoder:
    def __init__(self, script: fe.Script):
        self.script = script
        self.tags = {}
        self.atoms = []
        self.int_vars = set()
        self.counter = itertools.count()
        self.const_vars = {}
        self.len_vars = {}
        for name, sort in script.decls:
            if sort == fe.INT:
                self.int_vars.add(name)
            elif sort == fe.STR:
                self.tags[name] = TAG_STR
            else:
                self.tags[name] = TAG_SEQ

    def fresh(self, tag: str) -> str:
        name = f"!w{next(self.counter)}"
        self.tags[name] = tag
        return name

    def const_var(self, value: str, tag: str) -> str:
        key = (value, tag)
        if key not in self.const_vars:
            v = self.fresh(tag)
            self.atoms.append(XConst(v, value))
            self.const_vars[key] = v
        return self.const_vars[key]

    def data_var(self, t: fe.Term) -> str:
        """Variable naming the (encoded) value of a Str/Seq term."""
        if isinstance(t, fe.Var):
            return t.name
        if isinstance(t, fe.StrConst):
            return self.const_var(t.value, TAG_STR)
        if isinstance(t, fe.SeqConst):
            return self.const_var(enc_value(t.elements), TAG_SEQ)
        raise TypeError(f"normalized scripts apply operations to variables only: {t!r}")

    def lin(self, t: fe.Term) -> lia.LinTerm:
        if isinstance(t, fe.IntConst):
            return lia.const(t.value)
        if isinstance(t, fe.Var):
            self.int_vars.add(t.name)
            return lia.var(t.name)
        if isinstance(t, fe.IntAdd):
            return self.lin(t.left) + self.lin(t.right)
        if isinstance(t, fe.IntSub):
            return self.lin(t.left) - self.lin(t.right)
        if isinstance(t, fe.StrLen):
            if isinstance(t.arg, fe.StrConst):
                return lia.const(len(t.arg.value))
            return lia.var(self.len_var("strlen", t.arg.name))
        if isinstance(t, fe.SeqLen):
            if isinstance(t.arg, fe.SeqConst):
                return lia.const(len(t.arg.elements))
            return lia.var(self.len_var("seqlen", t.arg.name)) - 1
        raise TypeError(f"not an integer term: {t!r}")

    def len_var(self, kind: str, name: str) -> str:
        key = (kind, name)
        if key not in self.len_vars:
            k = f"!i{next(self.counter)}"
            self.int_vars.add(k)
            self.len_vars[key] = k
            if kind == "strlen":
                self.atoms.append(XStrlen(k, name))
            else:
                self.atoms.append(XSeqlen(k, name))
        return self.len_vars[key]

    # --- assertions ---

    def atom(self, a):
        if isinstance(a, fe.IntCmp):
            left, right = self.lin(a.left), self.lin(a.right)
            builder = {
                "=": lia.eq,
                "!=": lia.ne,
                "<": lia.lt,
                "<=": lia.le,
                ">": lia.gt,
                ">=": lia.ge,
            }[a.op]
            self.atoms.append(XLia(builder(left, right)))
            return
        if isinstance(a, fe.MemberAtom):
            regex = a.regex if a.positive else rx.Complement(a.regex)
            if isinstance(a.arg, fe.StrConst):
                from .interp import regex_matches

                if not regex_matches(regex, a.arg.value):
                    self.atoms.append(XLia(lia.FALSE))
                return
            self.atoms.append(XMember(a.arg.name, regex))
            return
        if isinstance(a, fe.EqAtom):
            self.equality(a)
            return
        raise TypeError(f"not an atom: {a!r}")

    def equality(self, a: fe.EqAtom):
        x = a.left.name
        rhs = a.right
        if isinstance(rhs, fe.Var):
            self.atoms.append(XVarEq(x, rhs.name))
        elif isinstance(rhs, fe.StrConst):
            self.atoms.append(XConst(x, rhs.value))
        elif isinstance(rhs, fe.SeqConst):
            self.atoms.append(XConst(x, enc_value(rhs.elements)))
        elif isinstance(rhs, fe.StrConcat):
            self.atoms.append(XConcat(x, self.data_var(rhs.left), self.data_var(rhs.right)))
        elif isinstance(rhs, fe.SeqConcat):
            # enc(s1 . s2) = enc(s1) . tail(enc(s2)): never duplicate the junction
            if isinstance(rhs.right, fe.SeqConst):
                tail_value = enc_value(rhs.right.elements)[1:]
                if isinstance(rhs.left, fe.SeqConst):
                    self.atoms.append(XConst(x, enc_value(rhs.left.elements) + tail_value))
                    return
                tail = self.const_var(tail_value, TAG_TAIL)
            else:
                tail = self.fresh(TAG_TAIL)
                self.atoms.append(XTransduce(tail, ("tail",), self.data_var(rhs.right)))
            self.atoms.append(XConcat(x, self.data_var(rhs.left), tail))
        elif isinstance(rhs, fe.SeqUnit):
            if isinstance(rhs.element, fe.StrConst):
                self.atoms.append(XConst(x, enc_value((rhs.element.value,))))
                return
            dagger = self.const_var(SEP_CHAR, TAG_SEQ)
            mid = self.fresh(TAG_TAIL)
            self.atoms.append(XConcat(mid, self.data_var(rhs.element), dagger))
            self.atoms.append(XConcat(x, dagger, mid))
        elif isinstance(rhs, fe.SeqNth):
            self.atoms.append(XElem(x, self.data_var(rhs.seq), self.lin(rhs.index) + 1))
        elif isinstance(rhs, fe.SeqJoin):
            self.atoms.append(XTransduce(x, ("join", rhs.separator), self.data_var(rhs.seq)))
        elif isinstance(rhs, fe.SeqWrite):
            self.atoms.append(
                XWrite(x, self.data_var(rhs.seq), self.lin(rhs.index) + 1, self.data_var(rhs.value))
            )
        elif isinstance(rhs, fe.SeqFilter):
            self.atoms.append(XTransduce(x, ("filter", rhs.regex), self.data_var(rhs.seq)))
        elif isinstance(rhs, fe.SeqExtract):
            self.atoms.append(
                XSubseq(x, self.data_var(rhs.seq), self.lin(rhs.start) + 1, self.lin(rhs.length))
            )
        elif isinstance(rhs, fe.StrSplit):
            self.atoms.append(XTransduce(x, ("splitstr", rhs.regex), self.data_var(rhs.arg)))
        elif isinstance(rhs, fe.StrMatchAll):
            self.atoms.append(XTransduce(x, ("matchallstr", rhs.regex), self.data_var(rhs.arg)))
        else:
            raise TypeError(f"unexpected right-hand side {rhs!r}")


def enc_formula(script: fe.Script) -> XScript:
    """Translate a normalized straight-line script; shapes are preserved."""
    enc = _Encoder(script)
    for a in script.atoms:
        enc.atom(a)
    return XScript(enc.tags, enc.atoms, enc.int_vars)
