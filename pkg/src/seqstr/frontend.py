"""Input language: SMT-LIB flavored scripts over integers, strings, and string
sequences, plus normalization and the straight-line check.

The accepted surface is a deliberately small SMT-LIB 2.6 subset.  Sequence
sort is written `(Seq String)`.  Nonstandard operators: `str.splitre`,
`str.matchall`, `seq.join`/`seq.joinw` (join with a literal separator word),
`seq.filterre`, `seq.update`, `seq.extract` (start, length), `seq.nth`,
`seq.len`, `seq.++`, `seq.unit`.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import regexes as rx
from .regexes import Regex
from .sexpr import SexprAtom, SexprList, SexprString, SexprError, position, read_all

INT = "Int"
STR = "Str"
SEQ = "Seq"


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


class SortError(ParseError):
    pass


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class IntConst(Term):
    value: int


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: str


@dataclass(frozen=True)
class IntAdd(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class IntSub(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class StrLen(Term):
    arg: Term


@dataclass(frozen=True)
class SeqLen(Term):
    arg: Term


@dataclass(frozen=True)
class StrConst(Term):
    value: str


@dataclass(frozen=True)
class StrConcat(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class SeqNth(Term):
    seq: Term
    index: Term


@dataclass(frozen=True)
class SeqJoin(Term):
    seq: Term
    separator: str


@dataclass(frozen=True)
class SeqConst(Term):
    elements: tuple


@dataclass(frozen=True)
class SeqConcat(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class SeqUnit(Term):
    element: Term


@dataclass(frozen=True)
class SeqWrite(Term):
    seq: Term
    index: Term
    value: Term


@dataclass(frozen=True)
class SeqFilter(Term):
    regex: Regex
    seq: Term


@dataclass(frozen=True)
class SeqExtract(Term):
    seq: Term
    start: Term
    length: Term


@dataclass(frozen=True)
class StrSplit(Term):
    regex: Regex
    arg: Term


@dataclass(frozen=True)
class StrMatchAll(Term):
    regex: Regex
    arg: Term


# ---------------------------------------------------------------------------
# Atoms and scripts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntCmp:
    op: str  # one of = != < <= > >=
    left: Term
    right: Term


@dataclass(frozen=True)
class EqAtom:
    sort: str  # STR or SEQ
    left: Term
    right: Term


@dataclass(frozen=True)
class MemberAtom:
    arg: Term
    regex: Regex
    positive: bool


@dataclass(frozen=True)
class Script:
    decls: tuple  # ordered (name, sort) pairs
    atoms: tuple
    has_check_sat: bool = False
    has_get_model: bool = False

    def sort_of(self, name: str) -> str:
        for n, s in self.decls:
            if n == name:
                return s
        raise KeyError(name)

    def decl_map(self) -> dict:
        return dict(self.decls)


def sort_of_term(t: Term) -> str:
    if isinstance(t, (IntConst, IntAdd, IntSub, StrLen, SeqLen)):
        return INT
    if isinstance(t, (StrConst, StrConcat, SeqNth, SeqJoin)):
        return STR
    if isinstance(t, (SeqConst, SeqConcat, SeqUnit, SeqWrite, SeqFilter, SeqExtract, StrSplit, StrMatchAll)):
        return SEQ
    if isinstance(t, Var):
        return t.sort
    raise TypeError(f"not a term: {t!r}")


def _children(t: Term):
    if isinstance(t, (IntAdd, IntSub, StrConcat, SeqConcat)):
        return (t.left, t.right)
    if isinstance(t, (StrLen, SeqLen)):
        return (t.arg,)
    if isinstance(t, SeqNth):
        return (t.seq, t.index)
    if isinstance(t, SeqJoin):
        return (t.seq,)
    if isinstance(t, SeqUnit):
        return (t.element,)
    if isinstance(t, SeqWrite):
        return (t.seq, t.index, t.value)
    if isinstance(t, (SeqFilter,)):
        return (t.seq,)
    if isinstance(t, SeqExtract):
        return (t.seq, t.start, t.length)
    if isinstance(t, (StrSplit, StrMatchAll)):
        return (t.arg,)
    return ()


def term_variables(t: Term, only_data: bool = False) -> set:
    """Free variables; with only_data, skip anything inside integer subterms."""
    out = set()

    def go(t):
        if isinstance(t, Var):
            out.add(t.name)
            return
        if only_data and sort_of_term(t) == INT:
            return
        for c in _children(t):
            go(c)

    go(t)
    return out


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_SORT_NAMES = {"Int": INT, "String": STR}


def _parse_sort(sx):
    if isinstance(sx, SexprAtom):
        if sx.value in _SORT_NAMES:
            return _SORT_NAMES[sx.value]
    elif (
        isinstance(sx, SexprList)
        and len(sx) == 2
        and isinstance(sx[0], SexprAtom)
        and sx[0].value == "Seq"
        and isinstance(sx[1], SexprAtom)
        and sx[1].value == "String"
    ):
        return SEQ
    line, col = position(sx)
    raise ParseError(f"unsupported sort {_show(sx)}", line, col)


def _show(sx) -> str:
    if isinstance(sx, SexprAtom):
        return sx.value
    if isinstance(sx, SexprString):
        return '"' + sx.value.replace('"', '""') + '"'
    return "(" + " ".join(_show(x) for x in sx) + ")"


class _ScriptBuilder:
    def __init__(self):
        self.decls = []
        self.sorts = {}
        self.atoms = []
        self.has_check_sat = False
        self.has_get_model = False

    def err(self, sx, msg):
        line, col = position(sx)
        raise ParseError(msg, line, col)

    def sort_err(self, sx, msg):
        line, col = position(sx)
        raise SortError(msg, line, col)

    def declare(self, name_sx, sort_sx):
        name = name_sx.value
        if name in self.sorts:
            self.err(name_sx, f"variable {name} declared twice")
        sort = _parse_sort(sort_sx)
        self.sorts[name] = sort
        self.decls.append((name, sort))

    # --- terms ---

    def term(self, sx) -> Term:
        if isinstance(sx, SexprString):
            if rx.SEPARATOR_CHAR in sx.value:
                self.err(sx, "string literals may not contain the reserved separator")
            return StrConst(sx.value)
        if isinstance(sx, SexprAtom):
            v = sx.value
            if v.lstrip("-").isdigit() and v not in self.sorts:
                return IntConst(int(v))
            if v in self.sorts:
                return Var(v, self.sorts[v])
            self.err(sx, f"unknown symbol {v!r}")
        if not isinstance(sx, SexprList) or not sx:
            self.err(sx, "expected a term")
        head = sx[0]
        if isinstance(head, SexprAtom) and head.value == "as":
            # (as seq.empty (Seq String))
            if len(sx) == 3 and isinstance(sx[1], SexprAtom) and sx[1].value == "seq.empty":
                return SeqConst(())
            self.err(sx, "unsupported 'as' term")
        if not isinstance(head, SexprAtom):
            self.err(sx, "expected an operator")
        op = head.value
        args = sx[1:]
        return self._apply(sx, op, args)

    def _expect(self, sx, op, args, n):
        if len(args) != n:
            self.sort_err(sx, f"{op} expects {n} arguments, got {len(args)}")

    def _typed(self, sx, op, arg_sx, want) -> Term:
        t = self.term(arg_sx)
        got = sort_of_term(t)
        if got != want:
            self.sort_err(sx, f"{op}: expected a {want} argument, got {got}")
        return t

    def _fold(self, sx, op, args, want, ctor):
        if not args:
            self.sort_err(sx, f"{op} needs at least one argument")
        terms = [self._typed(sx, op, a, want) for a in args]
        out = terms[0]
        for t in terms[1:]:
            out = ctor(out, t)
        return out

    def _regex(self, sx):
        try:
            return rx.regex_from_sexpr(sx)
        except rx.RegexError as exc:
            self.err(sx, str(exc))

    def _apply(self, sx, op, args) -> Term:
        if op == "+":
            return self._fold(sx, op, args, INT, IntAdd)
        if op == "-":
            if len(args) == 1:
                return IntSub(IntConst(0), self._typed(sx, op, args[0], INT))
            return self._fold(sx, op, args, INT, IntSub)
        if op == "str.len":
            self._expect(sx, op, args, 1)
            return StrLen(self._typed(sx, op, args[0], STR))
        if op == "seq.len":
            self._expect(sx, op, args, 1)
            return SeqLen(self._typed(sx, op, args[0], SEQ))
        if op == "str.++":
            return self._fold(sx, op, args, STR, StrConcat)
        if op == "seq.++":
            return self._fold(sx, op, args, SEQ, SeqConcat)
        if op == "seq.unit":
            self._expect(sx, op, args, 1)
            return SeqUnit(self._typed(sx, op, args[0], STR))
        if op == "seq.nth":
            self._expect(sx, op, args, 2)
            return SeqNth(self._typed(sx, op, args[0], SEQ), self._typed(sx, op, args[1], INT))
        if op in ("seq.join", "seq.joinw"):
            self._expect(sx, op, args, 2)
            seq = self._typed(sx, op, args[0], SEQ)
            if not isinstance(args[1], SexprString):
                self.sort_err(sx, f"{op}: separator must be a string literal")
            if rx.SEPARATOR_CHAR in args[1].value:
                self.err(sx, "separator word may not contain the reserved separator")
            return SeqJoin(seq, args[1].value)
        if op == "seq.update":
            self._expect(sx, op, args, 3)
            return SeqWrite(
                self._typed(sx, op, args[0], SEQ),
                self._typed(sx, op, args[1], INT),
                self._typed(sx, op, args[2], STR),
            )
        if op == "seq.extract":
            self._expect(sx, op, args, 3)
            return SeqExtract(
                self._typed(sx, op, args[0], SEQ),
                self._typed(sx, op, args[1], INT),
                self._typed(sx, op, args[2], INT),
            )
        if op == "seq.filterre":
            self._expect(sx, op, args, 2)
            return SeqFilter(self._regex(args[1]), self._typed(sx, op, args[0], SEQ))
        if op == "str.splitre":
            self._expect(sx, op, args, 2)
            return StrSplit(self._regex(args[1]), self._typed(sx, op, args[0], STR))
        if op == "str.matchall":
            self._expect(sx, op, args, 2)
            return StrMatchAll(self._regex(args[1]), self._typed(sx, op, args[0], STR))
        self.sort_err(sx, f"unknown operator {op!r}")

    # --- assertions ---

    def assertion(self, sx):
        self.atoms.append(self._formula(sx, positive=True))

    def _formula(self, sx, positive: bool):
        if not isinstance(sx, SexprList) or not sx or not isinstance(sx[0], SexprAtom):
            self.err(sx, "expected an atom")
        op = sx[0].value
        args = sx[1:]
        if op == "not":
            self._expect(sx, op, args, 1)
            return self._formula(args[0], not positive)
        if op == "str.in_re":
            self._expect(sx, op, args, 2)
            arg = self._typed(sx, op, args[0], STR)
            return MemberAtom(arg, self._regex(args[1]), positive)
        if op in ("<", "<=", ">", ">="):
            self._expect(sx, op, args, 2)
            left = self._typed(sx, op, args[0], INT)
            right = self._typed(sx, op, args[1], INT)
            if not positive:
                op = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}[op]
            return IntCmp(op, left, right)
        if op in ("=", "distinct"):
            self._expect(sx, op, args, 2)
            left = self.term(args[0])
            right = self.term(args[1])
            ls, rs = sort_of_term(left), sort_of_term(right)
            if ls != rs:
                self.sort_err(sx, f"=: sides have different sorts {ls} and {rs}")
            negated = (op == "distinct") != (not positive)
            if ls == INT:
                return IntCmp("!=" if negated else "=", left, right)
            if negated:
                self.err(
                    sx,
                    "string/sequence disequalities are outside the conjunctive "
                    "fragment this solver accepts; rewrite them away by hand",
                )
            return EqAtom(ls, left, right)
        self.err(sx, f"unsupported assertion {op!r}")


def parse_script(src: str) -> Script:
    """Parse a script; raises ParseError (with position) on bad input."""
    try:
        nodes = read_all(src)
    except SexprError as exc:
        raise ParseError(str(exc)) from exc
    b = _ScriptBuilder()
    for node in nodes:
        if not isinstance(node, SexprList) or not node or not isinstance(node[0], SexprAtom):
            b.err(node, "expected a command")
        cmd = node[0].value
        if cmd in ("set-logic", "set-info", "set-option", "exit", "echo"):
            continue
        if cmd == "declare-const":
            if len(node) != 3 or not isinstance(node[1], SexprAtom):
                b.err(node, "declare-const expects a name and a sort")
            b.declare(node[1], node[2])
        elif cmd == "declare-fun":
            if (
                len(node) != 4
                or not isinstance(node[1], SexprAtom)
                or not isinstance(node[2], SexprList)
                or len(node[2]) != 0
            ):
                b.err(node, "only nullary declare-fun is supported")
            b.declare(node[1], node[3])
        elif cmd == "assert":
            if len(node) != 2:
                b.err(node, "assert expects one formula")
            b.assertion(node[1])
        elif cmd == "check-sat":
            b.has_check_sat = True
        elif cmd == "get-model":
            b.has_get_model = True
        else:
            b.err(node, f"unsupported command {cmd!r}")
    return Script(tuple(b.decls), tuple(b.atoms), b.has_check_sat, b.has_get_model)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def _is_simple(t: Term) -> bool:
    return isinstance(t, (Var, IntConst, StrConst, SeqConst))


def _int_simple(t: Term) -> bool:
    """Integer terms are left nested, but strlen/seqlen args must be variables."""
    if isinstance(t, (IntConst,)):
        return True
    if isinstance(t, Var):
        return True
    if isinstance(t, (IntAdd, IntSub)):
        return _int_simple(t.left) and _int_simple(t.right)
    if isinstance(t, (StrLen, SeqLen)):
        return isinstance(t.arg, (Var, StrConst, SeqConst))
    return False


class _Normalizer:
    def __init__(self, script: Script):
        self.sorts = dict(script.decls)
        self.decls = list(script.decls)
        self.out = []
        self.counter = 0

    def fresh(self, sort: str) -> Var:
        while True:
            name = f"!v{self.counter}"
            self.counter += 1
            if name not in self.sorts:
                break
        self.sorts[name] = sort
        self.decls.append((name, sort))
        return Var(name, sort)

    def define(self, term: Term) -> Var:
        v = self.fresh(sort_of_term(term))
        self.out.append(EqAtom(self.sorts[v.name], v, term))
        return v

    def flat_arg(self, t: Term) -> Term:
        """Reduce to a variable or constant, introducing definitions as needed."""
        if _is_simple(t):
            return t
        return self.define(self.shallow(t))

    def flat_int(self, t: Term) -> Term:
        if isinstance(t, (IntConst, Var)):
            return t
        if isinstance(t, IntAdd):
            return IntAdd(self.flat_int(t.left), self.flat_int(t.right))
        if isinstance(t, IntSub):
            return IntSub(self.flat_int(t.left), self.flat_int(t.right))
        if isinstance(t, StrLen):
            return StrLen(self.flat_arg(t.arg))
        if isinstance(t, SeqLen):
            return SeqLen(self.flat_arg(t.arg))
        raise TypeError(f"not an integer term: {t!r}")

    def shallow(self, t: Term) -> Term:
        """One operation applied to variables/constants (integer args flattened)."""
        if _is_simple(t):
            return t
        if isinstance(t, StrConcat):
            return StrConcat(self.flat_arg(t.left), self.flat_arg(t.right))
        if isinstance(t, SeqConcat):
            return SeqConcat(self.flat_arg(t.left), self.flat_arg(t.right))
        if isinstance(t, SeqUnit):
            return SeqUnit(self.flat_arg(t.element))
        if isinstance(t, SeqNth):
            return SeqNth(self.flat_arg(t.seq), self.flat_int(t.index))
        if isinstance(t, SeqJoin):
            return SeqJoin(self.flat_arg(t.seq), t.separator)
        if isinstance(t, SeqWrite):
            return SeqWrite(self.flat_arg(t.seq), self.flat_int(t.index), self.flat_arg(t.value))
        if isinstance(t, SeqFilter):
            return SeqFilter(t.regex, self.flat_arg(t.seq))
        if isinstance(t, SeqExtract):
            return SeqExtract(self.flat_arg(t.seq), self.flat_int(t.start), self.flat_int(t.length))
        if isinstance(t, StrSplit):
            return StrSplit(t.regex, self.flat_arg(t.arg))
        if isinstance(t, StrMatchAll):
            return StrMatchAll(t.regex, self.flat_arg(t.arg))
        if isinstance(t, (IntAdd, IntSub, StrLen, SeqLen)):
            return self.flat_int(t)
        raise TypeError(f"not a term: {t!r}")

    def atom(self, a):
        if isinstance(a, IntCmp):
            self.out.append(IntCmp(a.op, self.flat_int(a.left), self.flat_int(a.right)))
        elif isinstance(a, MemberAtom):
            arg = a.arg if isinstance(a.arg, (Var, StrConst)) else self.flat_arg(a.arg)
            self.out.append(MemberAtom(arg, a.regex, a.positive))
        elif isinstance(a, EqAtom):
            left, right = a.left, a.right
            if isinstance(right, Var) and not isinstance(left, Var):
                left, right = right, left
            if isinstance(left, Var):
                self.out.append(EqAtom(a.sort, left, self.shallow(right)))
            else:
                lv = self.define(self.shallow(left))
                rv = self.define(self.shallow(right))
                self.out.append(EqAtom(a.sort, lv, rv))
        else:
            raise TypeError(f"not an atom: {a!r}")


def _atom_is_normal(a) -> bool:
    if isinstance(a, IntCmp):
        return _int_simple(a.left) and _int_simple(a.right)
    if isinstance(a, MemberAtom):
        return isinstance(a.arg, (Var, StrConst))
    if isinstance(a, EqAtom):
        if not isinstance(a.left, Var):
            return False
        rhs = a.right
        if _is_simple(rhs):
            return True
        if isinstance(rhs, (StrConcat, SeqConcat)):
            return _is_simple(rhs.left) and _is_simple(rhs.right)
        if isinstance(rhs, SeqUnit):
            return _is_simple(rhs.element)
        if isinstance(rhs, SeqNth):
            return _is_simple(rhs.seq) and _int_simple(rhs.index)
        if isinstance(rhs, SeqJoin):
            return _is_simple(rhs.seq)
        if isinstance(rhs, SeqWrite):
            return _is_simple(rhs.seq) and _int_simple(rhs.index) and _is_simple(rhs.value)
        if isinstance(rhs, SeqFilter):
            return _is_simple(rhs.seq)
        if isinstance(rhs, SeqExtract):
            return _is_simple(rhs.seq) and _int_simple(rhs.start) and _int_simple(rhs.length)
        if isinstance(rhs, (StrSplit, StrMatchAll)):
            return _is_simple(rhs.arg)
        return False
    return False


def normalize(script: Script) -> Script:
    """Equisatisfiable script where every Str/Seq equality has a variable LHS
    and every operation is applied to variables or constants."""
    if all(_atom_is_normal(a) for a in script.atoms):
        return script
    n = _Normalizer(script)
    for a in script.atoms:
        n.atom(a)
    return Script(tuple(n.decls), tuple(n.out), script.has_check_sat, script.has_get_model)


# ---------------------------------------------------------------------------
# Dependency graph and straight-line check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DependencyGraph:
    vertices: frozenset
    edges: frozenset  # (lhs, rhs-occurring variable)


def dependency_graph(script: Script) -> DependencyGraph:
    """Edges lhs -> v for every defining equality; integer subterms add none."""
    vertices = {n for n, s in script.decls if s in (STR, SEQ)}
    edges = set()
    for a in script.atoms:
        if isinstance(a, EqAtom) and isinstance(a.left, Var):
            for v in term_variables(a.right, only_data=True):
                edges.add((a.left.name, v))
    return DependencyGraph(frozenset(vertices), frozenset(edges))


@dataclass(frozen=True)
class StraightLineViolation:
    reason: str
    variables: tuple

    def __str__(self):
        return self.reason


def check_straight_line(script: Script):
    """None when the script is straight-line, else a violation report."""
    defined = {}
    for idx, a in enumerate(script.atoms):
        if isinstance(a, EqAtom) and isinstance(a.left, Var):
            name = a.left.name
            if name in defined:
                return StraightLineViolation(
                    f"variable {name} is defined by assertions "
                    f"{defined[name] + 1} and {idx + 1}",
                    (name,),
                )
            defined[name] = idx
    graph = dependency_graph(script)
    succ = {}
    for a, b in graph.edges:
        succ.setdefault(a, set()).add(b)
    color = {}

    def visit(v, trail):
        color[v] = 1
        for w in succ.get(v, ()):
            if color.get(w) == 1:
                cycle = trail[trail.index(w):] + [w] if w in trail else [v, w]
                return cycle
            if color.get(w) != 2:
                found = visit(w, trail + [w])
                if found:
                    return found
        color[v] = 2
        return None

    for v in sorted(graph.vertices):
        if color.get(v) != 2:
            cycle = visit(v, [v])
            if cycle:
                return StraightLineViolation(
                    "definition dependencies form a cycle: " + " -> ".join(cycle),
                    tuple(dict.fromkeys(cycle)),
                )
    return None
