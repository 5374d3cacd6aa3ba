"""Transducers realizing the element-level string operations.

filter keeps the separator-delimited elements matching a regex; matchAll and
replaceAll implement leftmost-longest matching with a three-mode state machine
(no-match / in-match / match-just-ended) whose states also track the set of
automaton states that must never reach acceptance (a reachable accepting
"noreach" state would certify a missed or extendable match, so any transition
producing one is dropped); splitstr is replaceAll with separators wrapped
around the whole output; join rewrites the separators back into a word.

Empty-match behaviour mirrors the reference interpreter: when the regex is
nullable and no nonempty match starts at a position, an empty match is
emitted and the character is passed through.
"""

from __future__ import annotations

from . import regexes as rx
from .automata import (
    COPY,
    Nfa,
    Nft,
    SEP,
    SEP_RANGE,
    SIGMA,
    atomic_ranges,
    compile_regex,
    nfa_complement,
)

SEP_CHAR = rx.SEPARATOR_CHAR


def _sigma_atoms(nfa: Nfa):
    """Atomic intervals covering the user alphabet, split at nfa boundaries."""
    return atomic_ranges([[(lo, hi) for _, lo, hi, _ in nfa.transitions], SIGMA])


def _stepper(nfa: Nfa):
    by_src = {}
    for src, lo, hi, dst in nfa.transitions:
        by_src.setdefault(src, []).append((lo, hi, dst))

    def step(states, cp):
        out = set()
        for q in states:
            for lo, hi, dst in by_src.get(q, ()):
                if lo <= cp <= hi:
                    out.add(dst)
        return frozenset(out)

    return step


# ---------------------------------------------------------------------------
# filter
# ---------------------------------------------------------------------------


def filter_nft(e: rx.Regex) -> Nft:
    """On a well-formed encoding, outputs the encoding of the kept elements."""
    pos = compile_regex(e, SIGMA)
    neg = nfa_complement(pos, SIGMA)
    QN, QB, QF, QT = "qn", "qb", "qf", "qt"
    states = {QN, QB, QF, QT}
    transitions = set()
    dag = SEP_RANGE
    out_dag = (SEP_CHAR,)

    for tag, auto in (("+", pos), ("-", neg)):
        for q in auto.states:
            states.add((tag, q))
        copy_out = (COPY,) if tag == "+" else ()
        for src, lo, hi, dst in auto.transitions:
            transitions.add(((tag, src), (lo, hi), (tag, dst), copy_out))

    # begin a matching element / a mismatching element
    for q in pos.initial:
        transitions.add((QB, None, ("+", q), ()))
    for q in neg.initial:
        transitions.add((QF, None, ("-", q), ()))

    enders = [("+", q) for q in pos.final] + [("-", q) for q in neg.final]
    transitions.add((QN, dag, QB, out_dag))
    transitions.add((QN, dag, QF, ()))
    transitions.add((QN, dag, QT, out_dag))
    for st in enders:
        transitions.add((st, dag, QB, out_dag))
        transitions.add((st, dag, QF, ()))
        transitions.add((st, dag, QT, out_dag))

    return Nft(
        frozenset(states),
        frozenset(transitions),
        frozenset([QN]),
        frozenset([QT]),
    )._trim()


# ---------------------------------------------------------------------------
# leftmost-longest scan machine (matchAll / replaceAll)
# ---------------------------------------------------------------------------


class _ScanOutputs:
    """Output policy for the scan machine.

    skip: character outside any match; start: first character of a match;
    inside: later characters of a match; finish: emitted on termination;
    empty: emitted for an empty match (nullable regex, no nonempty match).
    """

    def __init__(self, skip, start, inside, finish, empty):
        self.skip = skip
        self.start = start
        self.inside = inside
        self.finish = finish
        self.empty = empty


def _scan_machine(e: rx.Regex, outs: _ScanOutputs, state_limit: int = 100_000) -> Nft:
    nfa = compile_regex(e, SIGMA)
    step = _stepper(nfa)
    atoms = _sigma_atoms(nfa)
    initial = frozenset(nfa.initial)
    final = frozenset(nfa.final)
    nullable = nfa.accepts("")

    skip_out = outs.skip if not nullable else outs.empty + outs.skip

    NM, M, EM = 0, 1, 2
    start_state = (NM, frozenset(), frozenset())
    QEND = "end"
    transitions = set()
    seen = {start_state}
    frontier = [start_state]
    while frontier:
        st = frontier.pop()
        mode, cur, nr = st
        if len(seen) > state_limit:
            raise RuntimeError("scan machine exploded; regex too large")

        def emit(nxt, label, out):
            if nxt[2] & final:
                return  # a pending no-reach state certified a better match
            transitions.add((st, label, nxt, out))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)

        for lo, hi in atoms:
            cp = lo
            nxt_I = step(initial, cp)
            if mode == NM:
                emit((NM, frozenset(), step(nr | initial, cp)), (lo, hi), skip_out)
                if nxt_I:
                    emit((M, nxt_I, step(nr, cp)), (lo, hi), outs.start)
                if nxt_I & final:
                    emit((EM, nxt_I, step(nr, cp)), (lo, hi), outs.start)
            elif mode == M:
                nxt_cur = step(cur, cp)
                if nxt_cur:
                    emit((M, nxt_cur, step(nr, cp)), (lo, hi), outs.inside)
                if nxt_cur & final:
                    emit((EM, nxt_cur, step(nr, cp)), (lo, hi), outs.inside)
            else:  # EM
                emit((NM, frozenset(), step(cur | nr | initial, cp)), (lo, hi), skip_out)
                if nxt_I:
                    emit((M, nxt_I, step(cur | nr, cp)), (lo, hi), outs.start)
                if nxt_I & final:
                    emit((EM, nxt_I, step(cur | nr, cp)), (lo, hi), outs.start)
    # termination: only no-match and ended-match states may accept
    states = set(seen) | {QEND}
    for st in seen:
        if st[0] in (NM, EM):
            transitions.add((st, None, QEND, outs.finish))
    return Nft(
        frozenset(states),
        frozenset(transitions),
        frozenset([start_state]),
        frozenset([QEND]),
    )._trim()


def match_all_nft(e: rx.Regex) -> Nft:
    """Outputs the separator-delimited leftmost-longest matches of e."""
    return _scan_machine(
        e,
        _ScanOutputs(
            skip=(),
            start=(SEP_CHAR, COPY),
            inside=(COPY,),
            finish=(SEP_CHAR,),
            empty=(SEP_CHAR,),
        ),
    )


def replace_all_nft(e: rx.Regex, rep: str) -> Nft:
    """Replaces every leftmost-longest match of e by rep."""
    return _scan_machine(
        e,
        _ScanOutputs(
            skip=(COPY,),
            start=(rep,) if rep else (),
            inside=(),
            finish=(),
            empty=(rep,) if rep else (),
        ),
    )


def splitstr_nft(e: rx.Regex) -> Nft:
    """Separator-wrapped replaceAll: the encoding of the split of the input."""
    inner = replace_all_nft(e, SEP_CHAR)
    pre = "pre!"
    post = "post!"
    transitions = set(inner.transitions)
    for q in inner.initial:
        transitions.add((pre, None, q, (SEP_CHAR,)))
    for q in inner.final:
        transitions.add((q, None, post, (SEP_CHAR,)))
    return Nft(
        frozenset(inner.states) | {pre, post},
        frozenset(transitions),
        frozenset([pre]),
        frozenset([post]),
    )._trim()


# ---------------------------------------------------------------------------
# join and encoding helpers
# ---------------------------------------------------------------------------


def join_nft(u: str) -> Nft:
    """On encodings: drops the outer separators and joins elements with u."""
    transitions = {
        (0, SEP_RANGE, 1, ()),
        (0, SEP_RANGE, 2, ()),  # the single-separator (empty sequence) case
        (1, SEP_RANGE, 2, ()),
    }
    if u:
        transitions.add((1, SEP_RANGE, 1, (u,)))
    else:
        transitions.add((1, SEP_RANGE, 1, ()))
    for lo, hi in SIGMA:
        transitions.add((1, (lo, hi), 1, (COPY,)))
    return Nft(
        frozenset([0, 1, 2]),
        frozenset(transitions),
        frozenset([0]),
        frozenset([2]),
    )


def seq_tail_nft() -> Nft:
    """Drops the leading separator of an encoding and copies the rest.

    Used to encode sequence concatenation without duplicating the junction
    separator: enc(s1 . s2) = enc(s1) . tail(enc(s2)).
    """
    transitions = {(0, SEP_RANGE, 1, ()), (1, SEP_RANGE, 1, (SEP_CHAR,))}
    for lo, hi in SIGMA:
        transitions.add((1, (lo, hi), 1, (COPY,)))
    return Nft(
        frozenset([0, 1]),
        frozenset(transitions),
        frozenset([0]),
        frozenset([1]),
    )
