"""Reference semantics for every operation, plus a brute-force oracle.

This module is deliberately naive: direct evaluation over concrete values,
with regex matching done by automaton membership.  It exists to verify models
and to serve as the independent baseline the solver is tested against.

Undefined (out-of-range nth, bad extract bounds) is a value, not an
exception; any atom that touches Undefined evaluates to false.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import frontend as fe
from . import regexes as rx
from .automata import Nfa, compile_regex

UNDEF = object()


class _RegexCache:
    def __init__(self):
        self.table = {}

    def nfa(self, e: rx.Regex) -> Nfa:
        if e not in self.table:
            self.table[e] = compile_regex(e)
        return self.table[e]


_cache = _RegexCache()


def regex_nfa(e: rx.Regex) -> Nfa:
    return _cache.nfa(e)


def regex_matches(e: rx.Regex, w: str) -> bool:
    return regex_nfa(e).accepts(w)


def _longest_match_at(nfa: Nfa, u: str, i: int) -> int | None:
    """Length of the longest match of the automaton starting at u[i], or None."""
    cur = nfa.initial
    best = 0 if cur & nfa.final else None
    for j in range(i, len(u)):
        cur = nfa.step(cur, ord(u[j]))
        if not cur:
            break
        if cur & nfa.final:
            best = j - i + 1
    return best


def leftmost_longest_scan(e: rx.Regex, u: str):
    """Decompose u into (segments, matches) under leftmost-longest semantics.

    segments has one more entry than matches: u = seg[0] m[0] seg[1] m[1] ...
    An empty match (nullable e at a position with no nonempty match) is
    emitted and the scan advances one character; no match is emitted at the
    end-of-string position.
    """
    nfa = regex_nfa(e)
    segments = []
    matches = []
    seg_start = 0
    i = 0
    while i < len(u):
        m = _longest_match_at(nfa, u, i)
        if m is None:
            i += 1
            continue
        segments.append(u[seg_start:i])
        if m == 0:
            # empty match: emit it, the skipped char starts the next segment
            matches.append("")
            seg_start = i
            i += 1
        else:
            matches.append(u[i : i + m])
            i += m
            seg_start = i
    segments.append(u[seg_start:])
    return segments, matches


def split_value(e: rx.Regex, u: str) -> tuple:
    segments, _ = leftmost_longest_scan(e, u)
    return tuple(segments)


def match_all_value(e: rx.Regex, u: str) -> tuple:
    _, matches = leftmost_longest_scan(e, u)
    return tuple(matches)


def replace_all_value(e: rx.Regex, u: str, rep: str) -> str:
    segments, matches = leftmost_longest_scan(e, u)
    out = [segments[0]]
    for seg in segments[1:]:
        out.append(rep)
        out.append(seg)
    return "".join(out)


def eval_term(t: fe.Term, m: dict):
    """Exact operation semantics; returns an int, str, tuple, or UNDEF."""
    if isinstance(t, fe.IntConst):
        return t.value
    if isinstance(t, fe.StrConst):
        return t.value
    if isinstance(t, fe.SeqConst):
        return t.elements
    if isinstance(t, fe.Var):
        if t.name not in m:
            return UNDEF
        return m[t.name]

    if isinstance(t, (fe.IntAdd, fe.IntSub)):
        left = eval_term(t.left, m)
        right = eval_term(t.right, m)
        if left is UNDEF or right is UNDEF:
            return UNDEF
        return left + right if isinstance(t, fe.IntAdd) else left - right
    if isinstance(t, fe.StrLen):
        arg = eval_term(t.arg, m)
        return UNDEF if arg is UNDEF else len(arg)
    if isinstance(t, fe.SeqLen):
        arg = eval_term(t.arg, m)
        return UNDEF if arg is UNDEF else len(arg)

    if isinstance(t, fe.StrConcat):
        left = eval_term(t.left, m)
        right = eval_term(t.right, m)
        if left is UNDEF or right is UNDEF:
            return UNDEF
        return left + right
    if isinstance(t, fe.SeqConcat):
        left = eval_term(t.left, m)
        right = eval_term(t.right, m)
        if left is UNDEF or right is UNDEF:
            return UNDEF
        return left + right
    if isinstance(t, fe.SeqUnit):
        el = eval_term(t.element, m)
        return UNDEF if el is UNDEF else (el,)
    if isinstance(t, fe.SeqNth):
        s = eval_term(t.seq, m)
        i = eval_term(t.index, m)
        if s is UNDEF or i is UNDEF:
            return UNDEF
        if 0 <= i <= len(s) - 1:
            return s[i]
        return UNDEF
    if isinstance(t, fe.SeqJoin):
        s = eval_term(t.seq, m)
        if s is UNDEF:
            return UNDEF
        return t.separator.join(s)
    if isinstance(t, fe.SeqWrite):
        s = eval_term(t.seq, m)
        i = eval_term(t.index, m)
        u = eval_term(t.value, m)
        if s is UNDEF or i is UNDEF or u is UNDEF:
            return UNDEF
        if 0 <= i <= len(s) - 1:
            return s[:i] + (u,) + s[i + 1 :]
        return s  # out-of-range write leaves the sequence unchanged
    if isinstance(t, fe.SeqFilter):
        s = eval_term(t.seq, m)
        if s is UNDEF:
            return UNDEF
        nfa = regex_nfa(t.regex)
        return tuple(u for u in s if nfa.accepts(u))
    if isinstance(t, fe.SeqExtract):
        s = eval_term(t.seq, m)
        i = eval_term(t.start, m)
        j = eval_term(t.length, m)
        if s is UNDEF or i is UNDEF or j is UNDEF:
            return UNDEF
        if not (0 <= i <= len(s) - 1) or j < 0:
            return UNDEF
        if j == 0:
            return ()
        return s[i : min(i + j - 1, len(s) - 1) + 1]
    if isinstance(t, fe.StrSplit):
        u = eval_term(t.arg, m)
        if u is UNDEF:
            return UNDEF
        return split_value(t.regex, u)
    if isinstance(t, fe.StrMatchAll):
        u = eval_term(t.arg, m)
        if u is UNDEF:
            return UNDEF
        return match_all_value(t.regex, u)
    raise TypeError(f"not a term: {t!r}")


_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_atom(a, m: dict) -> bool:
    if isinstance(a, fe.IntCmp):
        left = eval_term(a.left, m)
        right = eval_term(a.right, m)
        if left is UNDEF or right is UNDEF:
            return False
        return _CMP[a.op](left, right)
    if isinstance(a, fe.EqAtom):
        left = eval_term(a.left, m)
        right = eval_term(a.right, m)
        if left is UNDEF or right is UNDEF:
            return False
        return left == right
    if isinstance(a, fe.MemberAtom):
        arg = eval_term(a.arg, m)
        if arg is UNDEF:
            return False
        return regex_matches(a.regex, arg) == a.positive
    raise TypeError(f"not an atom: {a!r}")


def check_model(script: fe.Script, m: dict) -> bool:
    """True iff every assertion holds; missing or Undefined values fail."""
    return all(eval_atom(a, m) for a in script.atoms)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def _strings_up_to(alpha: str, max_len: int):
    for n in range(max_len + 1):
        for tup in itertools.product(alpha, repeat=n):
            yield "".join(tup)


def _sequences_up_to(alpha: str, max_len: int, max_seq: int):
    strings = list(_strings_up_to(alpha, max_len))
    for n in range(max_seq + 1):
        for tup in itertools.product(strings, repeat=n):
            yield tuple(tup)


def _int_candidates(bound: int):
    yield 0
    for v in range(1, bound + 1):
        yield v
        yield -v


def derived_int_bound(script: fe.Script, max_len: int, max_seq: int) -> int:
    biggest = 0

    def scan_term(t):
        nonlocal biggest
        if isinstance(t, fe.IntConst):
            biggest = max(biggest, abs(t.value))
        for c in fe._children(t):
            scan_term(c)

    for a in script.atoms:
        if isinstance(a, fe.IntCmp):
            scan_term(a.left)
            scan_term(a.right)
        elif isinstance(a, fe.EqAtom):
            scan_term(a.left)
            scan_term(a.right)
    return max_len * (max_seq + 1) + max_seq + biggest + 2


def _definitions(script: fe.Script):
    """Forward-evaluable definitions (single def per var, acyclic), or None."""
    if fe.check_straight_line(script) is not None:
        return None
    defs = {}
    for a in script.atoms:
        if isinstance(a, fe.EqAtom) and isinstance(a.left, fe.Var):
            defs[a.left.name] = a.right
    order = []
    state = {}

    def visit(v):
        if state.get(v) == 2:
            return
        state[v] = 1
        if v in defs:
            for w in fe.term_variables(defs[v]):
                visit(w)
        state[v] = 2
        order.append(v)

    for v in defs:
        visit(v)
    return defs, [v for v in order if v in defs]


def brute_force_sat(
    script: fe.Script,
    max_len: int,
    max_seq: int,
    alpha: str,
    int_bound: int | None = None,
):
    """First model found within the bounds, or None (no model within bounds).

    Straight-line scripts enumerate only source variables and forward-evaluate
    the defined ones; anything else falls back to full enumeration.
    """
    if int_bound is None:
        int_bound = derived_int_bound(script, max_len, max_seq)
    plan = _definitions(script)
    defs, order = plan if plan is not None else ({}, [])
    names = [n for n, _ in script.decls]
    sorts = dict(script.decls)
    sources = [n for n in names if n not in defs]

    def domain(name):
        sort = sorts[name]
        if sort == fe.INT:
            return list(_int_candidates(int_bound))
        if sort == fe.STR:
            return list(_strings_up_to(alpha, max_len))
        return list(_sequences_up_to(alpha, max_len, max_seq))

    domains = [domain(n) for n in sources]
    for combo in itertools.product(*domains):
        m = dict(zip(sources, combo))
        ok = True
        for v in order:
            value = eval_term(defs[v], m)
            if value is UNDEF:
                ok = False
                break
            m[v] = value
        if ok and check_model(script, m):
            return m
    return None
