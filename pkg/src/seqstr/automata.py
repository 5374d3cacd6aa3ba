"""Finite automata and transducers over codepoint-interval labels.

States are small integers.  A transition label is an inclusive codepoint
interval, so boolean operations scale with the number of distinct interval
boundaries rather than the alphabet size.  Transducer outputs are tuples of
tokens: literal strings, or COPY (emit the consumed input character), which
keeps transducers over character classes finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from . import regexes as rx
from .regexes import (
    Complement,
    Concat,
    Empty,
    Epsilon,
    Range,
    Regex,
    Star,
    Union,
    normalize_ranges,
    sigma_ranges,
    subtract_ranges,
)

SIGMA = sigma_ranges()
SIGMA_SEP = ((0, rx.MAX_CODEPOINT),)
SEP = rx.SEPARATOR
SEP_RANGE = (SEP, SEP)


class OutputOverflow(RuntimeError):
    """More transducer outputs than the caller allowed."""


def atomic_ranges(range_sets) -> list[tuple[int, int]]:
    """Split the union of the given interval sets into maximal atomic pieces.

    Every returned interval is either disjoint from or contained in each input
    interval, so per-interval behaviour is uniform inside an atom.
    """
    points = set()
    covered = []
    for rs in range_sets:
        for lo, hi in rs:
            points.add(lo)
            points.add(hi + 1)
            covered.append((lo, hi))
    covered = normalize_ranges(covered)
    bounds = sorted(points)
    out = []
    for lo, nxt in zip(bounds, bounds[1:]):
        piece = (lo, nxt - 1)
        if any(c[0] <= piece[0] and piece[1] <= c[1] for c in covered):
            out.append(piece)
    return out


# ---------------------------------------------------------------------------
# NFA
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic finite automaton; transitions are (src, lo, hi, dst)."""

    states: frozenset
    transitions: frozenset
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        for src, lo, hi, dst in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError(f"transition endpoint not a declared state: {(src, lo, hi, dst)}")
            if lo > hi:
                raise ValueError(f"empty label range on {(src, lo, hi, dst)}")

    @cached_property
    def _by_src(self):
        table = {}
        for src, lo, hi, dst in self.transitions:
            table.setdefault(src, []).append((lo, hi, dst))
        return table

    def step(self, states, cp: int) -> frozenset:
        out = set()
        for q in states:
            for lo, hi, dst in self._by_src.get(q, ()):
                if lo <= cp <= hi:
                    out.add(dst)
        return frozenset(out)

    def accepts(self, w: str) -> bool:
        cur = self.initial
        for ch in w:
            cur = self.step(cur, ord(ch))
            if not cur:
                return False
        return bool(cur & self.final)

    def reachable(self, start=None) -> frozenset:
        frontier = list(self.initial if start is None else start)
        seen = set(frontier)
        while frontier:
            q = frontier.pop()
            for _, _, dst in self._by_src.get(q, ()):
                if dst not in seen:
                    seen.add(dst)
                    frontier.append(dst)
        return frozenset(seen)

    def co_reachable(self) -> frozenset:
        rev = {}
        for src, _, _, dst in self.transitions:
            rev.setdefault(dst, set()).add(src)
        frontier = list(self.final)
        seen = set(frontier)
        while frontier:
            q = frontier.pop()
            for src in rev.get(q, ()):
                if src not in seen:
                    seen.add(src)
                    frontier.append(src)
        return frozenset(seen)

    def is_empty(self) -> bool:
        return not (self.reachable() & self.final)

    def trim(self) -> "Nfa":
        live = self.reachable() & self.co_reachable()
        if not live:
            return Nfa(frozenset([0]), frozenset(), frozenset([0]), frozenset())
        ids = {q: i for i, q in enumerate(sorted(live, key=repr))}
        return Nfa(
            frozenset(ids.values()),
            frozenset(
                (ids[s], lo, hi, ids[d])
                for s, lo, hi, d in self.transitions
                if s in live and d in live
            ),
            frozenset(ids[q] for q in self.initial if q in live),
            frozenset(ids[q] for q in self.final if q in live),
        )

    def dump(self) -> str:
        """Line-based debug format: one `src lo-hi dst` per transition."""
        lines = [
            f"initial {' '.join(map(str, sorted(self.initial, key=repr)))}",
            f"final {' '.join(map(str, sorted(self.final, key=repr)))}",
        ]
        for src, lo, hi, dst in sorted(self.transitions, key=repr):
            lines.append(f"{src} {lo}-{hi} {dst}")
        return "\n".join(lines)


def nfa_universal(ranges=SIGMA_SEP) -> Nfa:
    return Nfa(
        frozenset([0]),
        frozenset((0, lo, hi, 0) for lo, hi in ranges),
        frozenset([0]),
        frozenset([0]),
    )


def nfa_empty() -> Nfa:
    return Nfa(frozenset([0]), frozenset(), frozenset([0]), frozenset())


def nfa_epsilon() -> Nfa:
    return Nfa(frozenset([0]), frozenset(), frozenset([0]), frozenset([0]))


# --- construction from regexes (via an internal epsilon-NFA builder) -------


class _EpsBuilder:
    def __init__(self):
        self.n = 0
        self.edges = []  # (src, label or None, dst)

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def edge(self, src, label, dst):
        self.edges.append((src, label, dst))

    def build(self, initial, final) -> Nfa:
        eps = {}
        for src, label, dst in self.edges:
            if label is None:
                eps.setdefault(src, set()).add(dst)

        def closure(qs):
            out = set(qs)
            stack = list(qs)
            while stack:
                q = stack.pop()
                for nxt in eps.get(q, ()):
                    if nxt not in out:
                        out.add(nxt)
                        stack.append(nxt)
            return out

        closures = {q: closure([q]) for q in range(self.n)}
        consuming = {}
        for src, label, dst in self.edges:
            if label is not None:
                consuming.setdefault(src, []).append((label, dst))
        transitions = set()
        for q in range(self.n):
            for mid in closures[q]:
                for label, dst in consuming.get(mid, ()):
                    transitions.add((q, label[0], label[1], dst))
        finals = {q for q in range(self.n) if closures[q] & set(final)}
        return Nfa(
            frozenset(range(self.n)),
            frozenset(transitions),
            frozenset(initial),
            frozenset(finals),
        ).trim()


def compile_regex(e: Regex, universe=SIGMA) -> Nfa:
    """Thompson-style compilation; Complement determinizes over `universe`."""
    b = _EpsBuilder()

    def go(e) -> tuple[int, int]:
        start, end = b.state(), b.state()
        if isinstance(e, Empty):
            pass
        elif isinstance(e, Epsilon):
            b.edge(start, None, end)
        elif isinstance(e, Range):
            b.edge(start, (e.lo, e.hi), end)
        elif isinstance(e, Union):
            for sub in (e.left, e.right):
                s, t = go(sub)
                b.edge(start, None, s)
                b.edge(t, None, end)
        elif isinstance(e, Concat):
            s1, t1 = go(e.left)
            s2, t2 = go(e.right)
            b.edge(start, None, s1)
            b.edge(t1, None, s2)
            b.edge(t2, None, end)
        elif isinstance(e, Star):
            s, t = go(e.inner)
            b.edge(start, None, end)
            b.edge(start, None, s)
            b.edge(t, None, s)
            b.edge(t, None, end)
        elif isinstance(e, Complement):
            inner = compile_regex(e.inner, universe)
            comp = nfa_complement(inner, universe)
            offset = {}
            for q in comp.states:
                offset[q] = b.state()
            for src, lo, hi, dst in comp.transitions:
                b.edge(offset[src], (lo, hi), offset[dst])
            for q in comp.initial:
                b.edge(start, None, offset[q])
            for q in comp.final:
                b.edge(offset[q], None, end)
        else:
            raise TypeError(f"not a regex: {e!r}")
        return start, end

    start, end = go(e)
    return b.build([start], [end])


def nfa_intersect(a: Nfa, b: Nfa) -> Nfa:
    """Product automaton; labels intersect as intervals."""
    pairs = {}

    def pid(p):
        if p not in pairs:
            pairs[p] = len(pairs)
        return pairs[p]

    transitions = set()
    frontier = [(p, q) for p in a.initial for q in b.initial]
    for p in frontier:
        pid(p)
    seen = set(frontier)
    while frontier:
        p, q = frontier.pop()
        for lo1, hi1, d1 in a._by_src.get(p, ()):
            for lo2, hi2, d2 in b._by_src.get(q, ()):
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if lo > hi:
                    continue
                nxt = (d1, d2)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
                transitions.add((pid((p, q)), lo, hi, pid(nxt)))
    states = frozenset(pairs.values()) or frozenset([0])
    return Nfa(
        states | frozenset([0]),
        frozenset(transitions),
        frozenset(pid((p, q)) for p in a.initial for q in b.initial),
        frozenset(i for (p, q), i in pairs.items() if p in a.final and q in b.final),
    ).trim()


def nfa_union(a: Nfa, b: Nfa) -> Nfa:
    off = max(a.states, default=-1) + 1
    states = set(a.states) | {q + off for q in b.states}
    transitions = set(a.transitions) | {
        (s + off, lo, hi, d + off) for s, lo, hi, d in b.transitions
    }
    return Nfa(
        frozenset(states),
        frozenset(transitions),
        frozenset(a.initial) | frozenset(q + off for q in b.initial),
        frozenset(a.final) | frozenset(q + off for q in b.final),
    )


def determinize(a: Nfa, universe=SIGMA) -> Nfa:
    """Subset construction with range-boundary splitting; complete over `universe`."""
    atoms = atomic_ranges([[(lo, hi) for _, lo, hi, _ in a.transitions], universe])
    atoms = [r for r in atoms if any(lo <= r[0] and r[1] <= hi for lo, hi in normalize_ranges(universe))]
    ids = {}

    def sid(s):
        if s not in ids:
            ids[s] = len(ids)
        return ids[s]

    start = frozenset(a.initial)
    frontier = [start]
    sid(start)
    transitions = set()
    seen = {start}
    while frontier:
        cur = frontier.pop()
        for lo, hi in atoms:
            nxt = a.step(cur, lo)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
            transitions.add((sid(cur), lo, hi, sid(nxt)))
    finals = frozenset(i for s, i in ids.items() if s & a.final)
    return Nfa(frozenset(ids.values()), frozenset(transitions), frozenset([ids[start]]), finals)


def nfa_complement(a: Nfa, universe=SIGMA) -> Nfa:
    """Accepts exactly the strings over `universe` that `a` rejects."""
    det = determinize(a, universe)
    return Nfa(
        det.states,
        det.transitions,
        det.initial,
        frozenset(det.states - det.final),
    ).trim()


# ---------------------------------------------------------------------------
# NFT
# ---------------------------------------------------------------------------


class _Copy:
    __slots__ = ()

    def __repr__(self):
        return "COPY"


COPY = _Copy()


def _norm_out(out) -> tuple:
    """Merge adjacent literals and drop empty ones."""
    toks = []
    for tok in out:
        if tok is COPY:
            toks.append(tok)
        elif tok:
            if toks and isinstance(toks[-1], str):
                toks[-1] = toks[-1] + tok
            else:
                toks.append(tok)
    return tuple(toks)


def _resolve(out, ch: str) -> str:
    return "".join(ch if tok is COPY else tok for tok in out)


@dataclass(frozen=True)
class Nft:
    """Finite transducer; transitions are (src, label, dst, out).

    `label` is an interval or None for a spontaneous transition; `out` is a
    tuple of tokens (str literals and COPY).  Spontaneous transitions never
    carry COPY and never form a cycle with nonempty output.
    """

    states: frozenset
    transitions: frozenset
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        for src, label, dst, out in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError("transition endpoint not a declared state")
            if label is None and any(tok is COPY for tok in out):
                raise ValueError("spontaneous transition cannot COPY input")
        self._check_eps_cycles()

    def _check_eps_cycles(self):
        eps_fwd = {}
        for src, label, dst, out in self.transitions:
            if label is None:
                eps_fwd.setdefault(src, set()).add(dst)

        def eps_reach(q):
            seen = {q}
            stack = [q]
            while stack:
                cur = stack.pop()
                for nxt in eps_fwd.get(cur, ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return seen

        for src, label, dst, out in self.transitions:
            if label is None and _norm_out(out) and src in eps_reach(dst):
                raise ValueError("spontaneous cycle with nonempty output")

    @cached_property
    def _by_src(self):
        table = {}
        for src, label, dst, out in self.transitions:
            table.setdefault(src, []).append((label, dst, _norm_out(out)))
        return table

    def outputs(self, w: str, limit: int = 64) -> set:
        """All outputs of accepting runs on w (OutputOverflow beyond `limit`)."""
        results = set()
        seen = set()
        stack = [(q, 0, "") for q in self.initial]
        while stack:
            q, pos, out = stack.pop()
            key = (q, pos, out)
            if key in seen:
                continue
            seen.add(key)
            if pos == len(w) and q in self.final:
                results.add(out)
                if len(results) > limit:
                    raise OutputOverflow(f"more than {limit} outputs")
            for label, dst, toks in self._by_src.get(q, ()):
                if label is None:
                    stack.append((dst, pos, out + _resolve(toks, "")))
                elif pos < len(w) and label[0] <= ord(w[pos]) <= label[1]:
                    stack.append((dst, pos + 1, out + _resolve(toks, w[pos])))
        return results

    def epsilon_eliminated(self) -> tuple["Nft", frozenset]:
        """Equivalent spontaneous-free NFT plus the outputs on empty input.

        The returned transducer agrees with this one on all nonempty inputs;
        on the empty input it accepts with empty output iff (ε, ε) is in this
        transduction.  All other empty-input outputs are returned separately.
        """
        closure = {}  # state -> set of (state, literal output along an eps path)
        for q in self.states:
            found = {(q, "")}
            stack = [(q, "")]
            while stack:
                cur, out = stack.pop()
                for label, dst, toks in self._by_src.get(cur, ()):
                    if label is None:
                        item = (dst, out + _resolve(toks, ""))
                        if item not in found:
                            found.add(item)
                            stack.append(item)
            closure[q] = found

        # folded consuming transitions: jump over any trailing eps chain
        folded = {}  # src -> list of (label, landing state, out tokens)
        for src, label, dst, toks in self.transitions:
            if label is None:
                continue
            toks = _norm_out(toks)
            for q2, suffix in closure[dst]:
                folded.setdefault(src, []).append((label, q2, _norm_out(toks + (suffix,))))

        new_init = max(self.states, default=-1) + 1
        transitions = set()
        eps_outputs = set()
        init_final = False
        for i in self.initial:
            for q, out in closure[i]:
                if q in self.final:
                    if out:
                        eps_outputs.add(out)
                    else:
                        init_final = True
        for src, entries in folded.items():
            for label, q2, toks in entries:
                transitions.add((src, label, q2, toks))
        # leading eps chains start from the fresh initial state
        for i in self.initial:
            for mid, prefix in closure[i]:
                for label, q2, toks in folded.get(mid, ()):
                    transitions.add((new_init, label, q2, _norm_out((prefix,) + toks)))
        finals = frozenset(self.final) | (frozenset([new_init]) if init_final else frozenset())
        nft = Nft(
            frozenset(self.states) | frozenset([new_init]),
            frozenset(transitions),
            frozenset([new_init]),
            finals,
        )
        return nft._trim(), frozenset(eps_outputs)

    def _trim(self) -> "Nft":
        fwd = {}
        rev = {}
        for src, label, dst, out in self.transitions:
            fwd.setdefault(src, set()).add(dst)
            rev.setdefault(dst, set()).add(src)

        def span(seeds, table):
            seen = set(seeds)
            stack = list(seeds)
            while stack:
                q = stack.pop()
                for nxt in table.get(q, ()):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return seen

        live = span(self.initial, fwd) & span(self.final, rev)
        if not live:
            return Nft(frozenset([0]), frozenset(), frozenset([0]), frozenset())
        ids = {q: i for i, q in enumerate(sorted(live, key=repr))}
        return Nft(
            frozenset(ids.values()),
            frozenset(
                (ids[s], label, ids[d], out)
                for s, label, d, out in self.transitions
                if s in live and d in live
            ),
            frozenset(ids[q] for q in self.initial if q in live),
            frozenset(ids[q] for q in self.final if q in live),
        )

    def dump(self) -> str:
        lines = [
            f"initial {' '.join(map(str, sorted(self.initial, key=repr)))}",
            f"final {' '.join(map(str, sorted(self.final, key=repr)))}",
        ]
        for src, label, dst, out in sorted(self.transitions, key=repr):
            lab = "eps" if label is None else f"{label[0]}-{label[1]}"
            shown = "".join("<copy>" if tok is COPY else tok for tok in out)
            lines.append(f"{src} {lab} {dst} / {shown}")
        return "\n".join(lines)


def nft_identity(ranges=SIGMA_SEP) -> Nft:
    return Nft(
        frozenset([0]),
        frozenset((0, (lo, hi), 0, (COPY,)) for lo, hi in ranges),
        frozenset([0]),
        frozenset([0]),
    )


def nft_outputs(t: Nft, w: str, limit: int = 64) -> set:
    return t.outputs(w, limit)
