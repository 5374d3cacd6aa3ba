"""Pre-image computation: given a CEFA constraint on the output of a string
operation, produce CEFA constraints on its arguments plus arithmetic bindings.

Each operation yields a list of alternatives (a union of products); an
alternative carries one CEFA per string argument, substitution terms that
rebuild the output registers from fresh register copies, and a side formula
binding index/length arguments to fresh counting registers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import lia
from .automata import Nft, SEP, SIGMA, COPY
from .cefa import Cefa, cefa_from_nfa, cefa_intersect_nfa, cefa_reduce, cefa_rename_registers
from .encode import format_automata, tail_format_automaton

_fresh_registers = itertools.count()


def fresh_register(stem: str = "r") -> str:
    return f"!{stem}{next(_fresh_registers)}"


@dataclass
class PreimageAlternative:
    args: tuple  # one Cefa per string argument
    subst: tuple  # one LinTerm per register of the source CEFA
    side: lia.Formula = field(default_factory=lambda: lia.TRUE)


def _fresh_copy(a: Cefa) -> Cefa:
    mapping = {r: fresh_register() for r in a.registers}
    return cefa_rename_registers(a, mapping)


def _split_sep(lo: int, hi: int):
    """Split a label range into its separator part and plain parts."""
    has_sep = lo <= SEP <= hi
    plain = []
    if lo <= SEP - 1:
        plain.append((lo, min(hi, SEP - 1)))
    if hi >= SEP + 1:
        plain.append((max(lo, SEP + 1), hi))
    return has_sep, plain


_A0, _A1 = format_automata()
_A0_CEFA = cefa_from_nfa(_A0)
_A1_CEFA = cefa_from_nfa(_A1)


def epsilon_only_cefa() -> Cefa:
    return Cefa((), frozenset([0]), frozenset(), frozenset([0]), frozenset([0]))


def separator_count_cefa(reg: str) -> Cefa:
    """Single state; the register counts separator occurrences."""
    transitions = {(0, SEP, SEP, 0, (1,))}
    for lo, hi in SIGMA:
        transitions.add((0, lo, hi, 0, (0,)))
    return Cefa((reg,), frozenset([0]), frozenset(transitions), frozenset([0]), frozenset([0]))


def strlen_cefa(reg: str) -> Cefa:
    """Single state; the register counts every symbol."""
    transitions = {(0, SEP, SEP, 0, (1,))}
    for lo, hi in SIGMA:
        transitions.add((0, lo, hi, 0, (1,)))
    return Cefa((reg,), frozenset([0]), frozenset(transitions), frozenset([0]), frozenset([0]))


seqlen_cefa = separator_count_cefa


# ---------------------------------------------------------------------------
# concatenation
# ---------------------------------------------------------------------------


def pre_concat(a: Cefa) -> list:
    """One alternative per pivot state m: run a to m on the left part and
    from m on the right part; output registers are the componentwise sums."""
    a = a.trim()
    out = []
    for m in sorted(a.states, key=repr):
        left = _fresh_copy(Cefa(a.registers, a.states, a.transitions, a.initial, frozenset([m])))
        right = _fresh_copy(Cefa(a.registers, a.states, a.transitions, frozenset([m]), a.final))
        left = left.trim()
        right = right.trim()
        if left.is_empty() or right.is_empty():
            continue
        subst = tuple(
            lia.var(l) + lia.var(r) for l, r in zip(left.registers, right.registers)
        )
        out.append(PreimageAlternative((left, right), subst))
    return out


# ---------------------------------------------------------------------------
# transducer application
# ---------------------------------------------------------------------------


def _run_tokens(a: Cefa, state, label, tokens):
    """All (end state, narrowed label, summed updates) of a over the tokens.

    COPY tokens consume the transducer's input character, so they narrow the
    composite label by the automaton transition's range.
    """
    k = len(a.registers)
    configs = {(state, label): {(0,) * k}}
    for tok in tokens:
        nxt = {}
        if tok is COPY:
            for (q, rng), sums in configs.items():
                for lo, hi, dst, upd in a._by_src.get(q, ()):
                    nlo, nhi = max(lo, rng[0]), min(hi, rng[1])
                    if nlo > nhi:
                        continue
                    bucket = nxt.setdefault((dst, (nlo, nhi)), set())
                    for s in sums:
                        bucket.add(tuple(x + u for x, u in zip(s, upd)))
        else:
            for ch in tok:
                cp = ord(ch)
                nxt = {}
                for (q, rng), sums in configs.items():
                    for lo, hi, dst, upd in a._by_src.get(q, ()):
                        if lo <= cp <= hi:
                            bucket = nxt.setdefault((dst, rng), set())
                            for s in sums:
                                bucket.add(tuple(x + u for x, u in zip(s, upd)))
                configs = nxt
            continue
        configs = nxt
    for (q, rng), sums in configs.items():
        for s in sums:
            yield q, rng, s


def pre_nft(t: Nft, eps_outputs, a: Cefa) -> list:
    """Pre-image of L(a) under a spontaneous-free transducer.

    The main alternative runs a over the transducer outputs while consuming
    the transducer's input labels.  Nonempty outputs on empty input are not
    expressible by a product automaton (an empty run always costs zero), so
    each gets a constant alternative accepting only the empty string.
    """
    a = a.trim()
    copy = _fresh_copy(a)
    ids = {}

    def pid(p):
        if p not in ids:
            ids[p] = len(ids)
        return ids[p]

    transitions = set()
    start = [(tq, aq) for tq in t.initial for aq in copy.initial]
    for p in start:
        pid(p)
    seen = set(start)
    frontier = list(start)
    while frontier:
        tq, aq = frontier.pop()
        for label, tdst, toks in t._by_src.get(tq, ()):
            assert label is not None, "pre_nft needs a spontaneous-free transducer"
            for adst, rng, sums in _run_tokens(copy, aq, label, toks):
                nxt = (tdst, adst)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
                transitions.add((pid((tq, aq)), rng[0], rng[1], pid(nxt), sums))
    finals = frozenset(
        i for (tq, aq), i in ids.items() if tq in t.final and aq in copy.final
    )
    initials = frozenset(pid(p) for p in start)
    if ids:
        main = Cefa(copy.registers, frozenset(ids.values()), frozenset(transitions), initials, finals)
    else:
        main = Cefa(copy.registers, frozenset([0]), frozenset(), frozenset([0]), frozenset())
    main = cefa_reduce(main)
    out = []
    if not main.is_empty():
        out.append(PreimageAlternative((main,), tuple(lia.var(r) for r in main.registers)))
    for u0 in sorted(eps_outputs):
        for cost in sorted(a.accepts_with_cost(u0)):
            out.append(
                PreimageAlternative(
                    (epsilon_only_cefa(),),
                    tuple(lia.const(c) for c in cost),
                )
            )
    return out


# ---------------------------------------------------------------------------
# write
# ---------------------------------------------------------------------------

PRE, IDLE, POST = 0, 1, 2


def write_pairs(a: Cefa) -> list:
    """State pairs (p, q) eligible for the write pre-image: a separator
    transition enters p, one leaves q, and q is reachable from p."""
    a = a.trim()
    sep_in = set()
    sep_out = set()
    for src, lo, hi, dst, _ in a.transitions:
        if lo <= SEP <= hi:
            sep_in.add(dst)
            sep_out.add(src)
    out = []
    for p in sorted(sep_in, key=repr):
        reach = a.reachable([p])
        for q in sorted(sep_out, key=repr):
            if q in reach:
                out.append((p, q))
    return out


def pre_write(a: Cefa, index_term: lia.LinTerm) -> list:
    """The in-range write pre-image: the written input pauses the output
    automaton over the replaced element; the element runs the p..q segment."""
    a = a.trim()
    k = len(a.registers)
    out = []
    for p, q in write_pairs(a):
        regs = tuple(fresh_register() for _ in range(k))
        pos_reg = fresh_register("ix")
        transitions = set()
        for src, lo, hi, dst, upd in a.transitions:
            has_sep, plain = _split_sep(lo, hi)
            for plo, phi in plain:
                transitions.add(((src, PRE), plo, phi, (dst, PRE), upd + (0,)))
                transitions.add(((src, POST), plo, phi, (dst, POST), upd + (0,)))
            if has_sep:
                transitions.add(((src, PRE), SEP, SEP, (dst, PRE), upd + (1,)))
                transitions.add(((src, POST), SEP, SEP, (dst, POST), upd + (0,)))
                if dst == p:
                    transitions.add(((src, PRE), SEP, SEP, (p, IDLE), upd + (1,)))
                if src == q:
                    transitions.add(((p, IDLE), SEP, SEP, (dst, POST), upd + (0,)))
        zero = (0,) * k
        for lo, hi in SIGMA:
            transitions.add(((p, IDLE), lo, hi, (p, IDLE), zero + (0,)))
        states = {s for s, _, _, _, _ in transitions} | {d for _, _, _, d, _ in transitions}
        states |= {(s, PRE) for s in a.initial} | {(s, POST) for s in a.final}
        holder = Cefa(
            regs + (pos_reg,),
            frozenset(states),
            frozenset(transitions),
            frozenset((s, PRE) for s in a.initial),
            frozenset((s, POST) for s in a.final),
        )
        holder = cefa_reduce(cefa_intersect_nfa(holder, _A0))
        element = _fresh_copy(
            Cefa(a.registers, a.states, a.transitions, frozenset([p]), frozenset([q]))
        )
        element = cefa_reduce(cefa_intersect_nfa(element, _A1))
        if holder.is_empty() or element.is_empty():
            continue
        subst = tuple(
            lia.var(h) + lia.var(e) for h, e in zip(holder.registers[:k], element.registers)
        )
        side = lia.eq(lia.var(holder.registers[k]), index_term)
        out.append(PreimageAlternative((holder, element), subst, side))
    return out


def pre_write_total(a: Cefa, index_term: lia.LinTerm) -> list:
    """write made total per the sequence semantics: out-of-range leaves the
    input unchanged.  The extra alternative copies the constraint and binds
    the index outside [1, separators - 1]; the element is unconstrained."""
    alts = pre_write(a, index_term)
    copy = _fresh_copy(a)
    count = fresh_register("n")
    from .cefa import cefa_product

    counted = cefa_reduce(cefa_product(copy, separator_count_cefa(count)))
    if not counted.is_empty():
        side = lia.disj(
            lia.le(index_term, 0),
            lia.ge(index_term, lia.var(count)),
        )
        alts.append(
            PreimageAlternative(
                (counted, _A1_CEFA),
                tuple(lia.var(r) for r in counted.registers[: len(a.registers)]),
                side,
            )
        )
    return alts


# ---------------------------------------------------------------------------
# subseq
# ---------------------------------------------------------------------------


def _subseq_base(a: Cefa, clamp_to_end: bool):
    k = len(a.registers)
    regs = tuple(fresh_register() for _ in range(k))
    start_reg = fresh_register("ix")
    len_reg = fresh_register("ln")
    PREQ, POSTQ = "pre!", "post!"
    zero = (0,) * k
    transitions = set()
    for lo, hi in SIGMA:
        transitions.add((PREQ, lo, hi, PREQ, zero + (0, 0)))
        if not clamp_to_end:
            transitions.add((POSTQ, lo, hi, POSTQ, zero + (0, 0)))
    transitions.add((PREQ, SEP, SEP, PREQ, zero + (1, 0)))
    if not clamp_to_end:
        transitions.add((POSTQ, SEP, SEP, POSTQ, zero + (0, 0)))
    for src, lo, hi, dst, upd in a.transitions:
        has_sep, plain = _split_sep(lo, hi)
        for plo, phi in plain:
            transitions.add((src, plo, phi, dst, upd + (0, 0)))
        if has_sep:
            transitions.add((src, SEP, SEP, dst, upd + (0, 1)))
            if dst in a.final:
                transitions.add((src, SEP, SEP, POSTQ, upd + (0, 1)))
            if src in a.initial:
                transitions.add((PREQ, SEP, SEP, dst, upd + (1, 0)))
    states = set(a.states) | {PREQ, POSTQ}
    return Cefa(
        regs + (start_reg, len_reg),
        frozenset(states),
        frozenset(transitions),
        frozenset([PREQ]),
        frozenset([POSTQ]),
    ), (start_reg, len_reg)


def pre_subseq(a: Cefa, start_term: lia.LinTerm, length_term: lia.LinTerm) -> list:
    """Three branch families: exact length, clamped at the end of the input,
    and the empty-subsequence (length 0) case."""
    a = a.trim()
    out = []
    exact, (sreg, lreg) = _subseq_base(a, clamp_to_end=False)
    exact = cefa_reduce(cefa_intersect_nfa(exact, _A0))
    if not exact.is_empty():
        out.append(
            PreimageAlternative(
                (exact,),
                tuple(lia.var(r) for r in exact.registers[: len(a.registers)]),
                lia.conj(
                    lia.eq(lia.var(sreg), start_term),
                    lia.eq(lia.var(lreg), length_term),
                ),
            )
        )
    clamped, (sreg2, lreg2) = _subseq_base(a, clamp_to_end=True)
    clamped = cefa_reduce(cefa_intersect_nfa(clamped, _A0))
    if not clamped.is_empty():
        out.append(
            PreimageAlternative(
                (clamped,),
                tuple(lia.var(r) for r in clamped.registers[: len(a.registers)]),
                lia.conj(
                    lia.eq(lia.var(sreg2), start_term),
                    lia.le(lia.var(lreg2), length_term),
                ),
            )
        )
    # length 0: output is the empty-sequence encoding; start must be in range
    sep = chr(SEP)
    for cost in sorted(a.accepts_with_cost(sep)):
        count = fresh_register("n")
        counted = cefa_reduce(cefa_intersect_nfa(separator_count_cefa(count), _A0))
        side = lia.conj(
            lia.eq(length_term, 0),
            lia.ge(start_term, 1),
            lia.le(start_term, lia.var(count) - 1),
        )
        out.append(
            PreimageAlternative(
                (counted,),
                tuple(lia.const(c) for c in cost),
                side,
            )
        )
    return out


# ---------------------------------------------------------------------------
# elem
# ---------------------------------------------------------------------------


def pre_elem(a: Cefa, index_term: lia.LinTerm) -> list:
    """The element between the index-th and next separators must run a."""
    a = a.trim()
    k = len(a.registers)
    copy = _fresh_copy(a)
    pos_reg = fresh_register("ix")
    PREQ, POSTQ = "pre!", "post!"
    zero = (0,) * k
    transitions = set()
    for lo, hi in SIGMA:
        transitions.add((PREQ, lo, hi, PREQ, zero + (0,)))
        transitions.add((POSTQ, lo, hi, POSTQ, zero + (0,)))
    transitions.add((PREQ, SEP, SEP, PREQ, zero + (1,)))
    transitions.add((POSTQ, SEP, SEP, POSTQ, zero + (0,)))
    for p in copy.initial:
        transitions.add((PREQ, SEP, SEP, p, zero + (1,)))
    for src, lo, hi, dst, upd in copy.transitions:
        _, plain = _split_sep(lo, hi)
        for plo, phi in plain:
            transitions.add((src, plo, phi, dst, upd + (0,)))
    for q in copy.final:
        transitions.add((q, SEP, SEP, POSTQ, zero + (0,)))
    states = set(copy.states) | {PREQ, POSTQ}
    b = Cefa(
        copy.registers + (pos_reg,),
        frozenset(states),
        frozenset(transitions),
        frozenset([PREQ]),
        frozenset([POSTQ]),
    )
    b = cefa_reduce(cefa_intersect_nfa(b, _A0))
    if b.is_empty():
        return []
    side = lia.eq(lia.var(b.registers[k]), index_term)
    return [
        PreimageAlternative(
            (b,),
            tuple(lia.var(r) for r in b.registers[:k]),
            side,
        )
    ]
