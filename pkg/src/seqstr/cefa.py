"""Cost-enriched finite automata: NFAs whose transitions additively update
write-only integer registers.

A CEFA accepts (string, cost-vector) pairs; the cost of a run is the sum of
its transition update vectors (registers start at zero and are never read).
The register image, the set of cost vectors of accepting runs, is exported as
an existential linear arithmetic formula over per-transition count variables
with flow conservation and distance-witness connectivity; witnesses are
rebuilt from a count model via an Eulerian trail.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from . import lia
from .automata import Nfa

_fresh_aux = itertools.count()


class RegisterClash(ValueError):
    pass


class UnknownState(KeyError):
    pass


class NonInjectiveMap(ValueError):
    pass


@dataclass(frozen=True)
class Cefa:
    registers: tuple
    states: frozenset
    transitions: frozenset  # (src, lo, hi, dst, updates)
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        k = len(self.registers)
        for src, lo, hi, dst, upd in self.transitions:
            if src not in self.states or dst not in self.states:
                raise ValueError("transition endpoint not a declared state")
            if len(upd) != k:
                raise ValueError(f"update vector {upd} has wrong arity (want {k})")
            if lo > hi:
                raise ValueError("empty label range")

    @cached_property
    def _by_src(self):
        table = {}
        for src, lo, hi, dst, upd in self.transitions:
            table.setdefault(src, []).append((lo, hi, dst, upd))
        return table

    def accepts_with_cost(self, w: str) -> set:
        """All cost vectors of accepting runs on w."""
        k = len(self.registers)
        zero = (0,) * k
        frontier = {q: {zero} for q in self.initial}
        for ch in w:
            cp = ord(ch)
            nxt = {}
            for q, costs in frontier.items():
                for lo, hi, dst, upd in self._by_src.get(q, ()):
                    if lo <= cp <= hi:
                        bucket = nxt.setdefault(dst, set())
                        for c in costs:
                            bucket.add(tuple(x + u for x, u in zip(c, upd)))
            frontier = nxt
            if not frontier:
                return set()
        out = set()
        for q in self.final:
            out |= frontier.get(q, set())
        return out

    def accepts(self, w: str) -> bool:
        cur = set(self.initial)
        for ch in w:
            cp = ord(ch)
            cur = {
                dst
                for q in cur
                for lo, hi, dst, _ in self._by_src.get(q, ())
                if lo <= cp <= hi
            }
            if not cur:
                return False
        return bool(cur & self.final)

    def reachable(self, seeds=None) -> frozenset:
        frontier = list(self.initial if seeds is None else seeds)
        seen = set(frontier)
        while frontier:
            q = frontier.pop()
            for _, _, dst, _ in self._by_src.get(q, ()):
                if dst not in seen:
                    seen.add(dst)
                    frontier.append(dst)
        return frozenset(seen)

    def co_reachable(self, seeds=None) -> frozenset:
        rev = {}
        for src, _, _, dst, _ in self.transitions:
            rev.setdefault(dst, set()).add(src)
        frontier = list(self.final if seeds is None else seeds)
        seen = set(frontier)
        while frontier:
            q = frontier.pop()
            for src in rev.get(q, ()):
                if src not in seen:
                    seen.add(src)
                    frontier.append(src)
        return frozenset(seen)

    def is_empty(self) -> bool:
        """Emptiness of the underlying string language."""
        return not (self.reachable() & self.final)

    def trim(self) -> "Cefa":
        live = self.reachable() & self.co_reachable()
        if not live:
            return Cefa(self.registers, frozenset([0]), frozenset(), frozenset([0]), frozenset())
        ids = {q: i for i, q in enumerate(sorted(live, key=repr))}
        return Cefa(
            self.registers,
            frozenset(ids.values()),
            frozenset(
                (ids[s], lo, hi, ids[d], upd)
                for s, lo, hi, d, upd in self.transitions
                if s in live and d in live
            ),
            frozenset(ids[q] for q in self.initial if q in live),
            frozenset(ids[q] for q in self.final if q in live),
        )

    def dump(self) -> str:
        lines = [
            f"registers {' '.join(self.registers)}",
            f"initial {' '.join(map(str, sorted(self.initial, key=repr)))}",
            f"final {' '.join(map(str, sorted(self.final, key=repr)))}",
        ]
        for src, lo, hi, dst, upd in sorted(self.transitions, key=repr):
            lines.append(f"{src} {lo}-{hi} {dst} ; updates=({','.join(map(str, upd))})")
        return "\n".join(lines)


def cefa_from_nfa(a: Nfa) -> Cefa:
    """Zero-register lift: same runs, empty cost vectors."""
    return Cefa(
        (),
        a.states,
        frozenset((s, lo, hi, d, ()) for s, lo, hi, d in a.transitions),
        a.initial,
        a.final,
    )


def cefa_product(a: Cefa, b: Cefa) -> Cefa:
    """Pair product: accepts (w, (ca, cb)) iff a accepts (w, ca) and b (w, cb)."""
    dup = set(a.registers) & set(b.registers)
    if dup:
        raise RegisterClash(f"register names overlap: {sorted(dup)}")
    ka, kb = len(a.registers), len(b.registers)
    zeros_a, zeros_b = (0,) * ka, (0,) * kb
    ids = {}

    def pid(p):
        if p not in ids:
            ids[p] = len(ids)
        return ids[p]

    transitions = set()
    frontier = [(p, q) for p in a.initial for q in b.initial]
    for p in frontier:
        pid(p)
    seen = set(frontier)
    while frontier:
        p, q = frontier.pop()
        for lo1, hi1, d1, u1 in a._by_src.get(p, ()):
            for lo2, hi2, d2, u2 in b._by_src.get(q, ()):
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if lo > hi:
                    continue
                nxt = (d1, d2)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
                transitions.add((pid((p, q)), lo, hi, pid(nxt), u1 + u2))
    if not ids:
        return Cefa(a.registers + b.registers, frozenset([0]), frozenset(), frozenset([0]), frozenset())
    return Cefa(
        a.registers + b.registers,
        frozenset(ids.values()),
        frozenset(transitions),
        frozenset(ids[(p, q)] for p in a.initial for q in b.initial),
        frozenset(i for (p, q), i in ids.items() if p in a.final and q in b.final),
    ).trim()


def cefa_intersect_nfa(a: Cefa, b: Nfa) -> Cefa:
    """Restrict a's strings to L(b); registers unchanged."""
    return cefa_product(a, cefa_from_nfa(b))


def _atomized(transitions):
    from .automata import atomic_ranges

    atoms = atomic_ranges([[(lo, hi) for _, lo, hi, _, _ in transitions]])
    out = []
    for src, lo, hi, dst, upd in transitions:
        for alo, ahi in atoms:
            if lo <= alo and ahi <= hi:
                out.append((src, (alo, ahi), dst, upd))
    return out


def cefa_reduce(a: Cefa) -> Cefa:
    """Bisimulation quotient (forward then backward, to a fixpoint).

    Merging bisimilar states preserves the accepted (string, cost) pairs; the
    products and pre-image constructions this package builds collapse well
    under it, which keeps register-image formulas small.
    """
    a = a.trim()
    while True:
        before = len(a.states)
        a = _quotient(a, backward=False)
        a = _quotient(a, backward=True)
        if len(a.states) >= before:
            return a


def _quotient(a: Cefa, backward: bool) -> Cefa:
    atomized = _atomized(a.transitions)
    if backward:
        edges = [(dst, label, src, upd) for src, label, dst, upd in atomized]
        anchor = a.initial
    else:
        edges = atomized
        anchor = a.final
    other = a.initial if not backward else a.final
    classes = {q: (q in anchor, q in other) for q in a.states}
    while True:
        by_src = {}
        for src, label, dst, upd in edges:
            by_src.setdefault(src, set()).add((label, upd, classes[dst]))
        new = {q: (classes[q], frozenset(by_src.get(q, ()))) for q in a.states}
        ids = {}
        renamed = {}
        for q in sorted(a.states, key=repr):
            key = new[q]
            if key not in ids:
                ids[key] = len(ids)
            renamed[q] = ids[key]
        if len(set(renamed.values())) == len(set(classes.values())):
            classes = renamed
            break
        classes = renamed
    return Cefa(
        a.registers,
        frozenset(classes.values()),
        frozenset(
            (classes[s], lo, hi, classes[d], upd) for s, lo, hi, d, upd in a.transitions
        ),
        frozenset(classes[q] for q in a.initial),
        frozenset(classes[q] for q in a.final),
    )


def cefa_sub_automaton(a: Cefa, p, q) -> Cefa:
    if p not in a.states or q not in a.states:
        raise UnknownState(f"{p!r} or {q!r}")
    return Cefa(a.registers, a.states, a.transitions, frozenset([p]), frozenset([q]))


def cefa_rename_registers(a: Cefa, mapping) -> Cefa:
    for r in a.registers:
        if r not in mapping:
            raise NonInjectiveMap(f"mapping does not cover register {r!r}")
    new = tuple(mapping[r] for r in a.registers)
    if len(set(new)) != len(new):
        raise NonInjectiveMap(f"mapping is not injective on {a.registers}")
    return Cefa(new, a.states, a.transitions, a.initial, a.final)


# ---------------------------------------------------------------------------
# Register image and witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImageFormula:
    """Existential LIA formula whose free variables are the register names."""

    formula: lia.Formula
    aux: tuple


def _rep_char(lo: int, hi: int) -> str:
    """A representative character of the range, preferring printable ASCII."""
    if lo <= 0x61 <= hi:
        return "a"
    if lo <= 0x7E and hi >= 0x20:
        return chr(max(lo, 0x20))
    return chr(lo)


def _pair_graph(a: Cefa, i, f):
    """Live multigraph between i and f, with linear chains contracted.

    Edges are [src, dst, updates, representative string]; parallel duplicates
    are merged.  Contraction preserves run multisets, costs and witnesses.
    """
    live = a.reachable([i]) & a.co_reachable([f])
    if i not in live or f not in live:
        return None
    edges = {}
    for src, lo, hi, dst, upd in a.transitions:
        if src in live and dst in live:
            key = (src, dst, upd)
            edges.setdefault(key, _rep_char(lo, hi))
    edge_list = [[src, dst, upd, rep] for (src, dst, upd), rep in sorted(edges.items(), key=repr)]

    changed = True
    while changed:
        changed = False
        indeg = {}
        outdeg = {}
        for e in edge_list:
            outdeg[e[0]] = outdeg.get(e[0], 0) + 1
            indeg[e[1]] = indeg.get(e[1], 0) + 1
        nodes = {e[0] for e in edge_list} | {e[1] for e in edge_list}
        for w in nodes:
            if w in (i, f) or indeg.get(w) != 1 or outdeg.get(w) != 1:
                continue
            incoming = next(e for e in edge_list if e[1] == w)
            outgoing = next(e for e in edge_list if e[0] == w)
            if incoming is outgoing:  # self loop
                continue
            merged = [
                incoming[0],
                outgoing[1],
                tuple(x + y for x, y in zip(incoming[2], outgoing[2])),
                incoming[3] + outgoing[3],
            ]
            edge_list.remove(incoming)
            edge_list.remove(outgoing)
            edge_list.append(merged)
            changed = True
            break
    # dedupe again after contraction
    seen = {}
    for src, dst, upd, rep in edge_list:
        seen.setdefault((src, dst, upd), rep)
    edge_list = [(src, dst, upd, rep) for (src, dst, upd), rep in sorted(seen.items(), key=repr)]
    nodes = {i, f} | {e[0] for e in edge_list} | {e[1] for e in edge_list}
    return nodes, edge_list


def _pair_formula(a: Cefa, i, f, graph):
    nodes, edges = graph
    xvars = [f"!t{next(_fresh_aux)}" for _ in edges]
    zvars = {q: f"!z{next(_fresh_aux)}" for q in nodes}
    parts = []
    for x in xvars:
        parts.append(lia.ge(lia.var(x), 0))
    # flow conservation with a unit of flow from i to f
    for q in nodes:
        balance = lia.const(0)
        for x, (src, dst, _, _) in zip(xvars, edges):
            if dst == q:
                balance = balance + lia.var(x)
            if src == q:
                balance = balance - lia.var(x)
        want = (1 if q == f else 0) - (1 if q == i else 0)
        parts.append(lia.eq(balance, want))
    # registers are linear in the edge counts
    for idx, r in enumerate(a.registers):
        total = lia.const(0)
        for x, (_, _, upd, _) in zip(xvars, edges):
            if upd[idx]:
                total = total + lia.var(x).scale(upd[idx])
        parts.append(lia.eq(lia.var(r), total))
    # connectivity: used states carry a strictly increasing distance from i
    parts.append(lia.eq(lia.var(zvars[i]), 1))
    for q in nodes:
        if q == i:
            continue
        incident = lia.const(0)
        for x, (src, dst, _, _) in zip(xvars, edges):
            if src == q or dst == q:
                incident = incident + lia.var(x)
        unused = lia.conj(lia.eq(lia.var(zvars[q]), 0), lia.eq(incident, 0))
        certs = [unused]
        for x, (src, dst, _, _) in zip(xvars, edges):
            if dst == q and src != q:
                certs.append(
                    lia.conj(
                        lia.ge(lia.var(x), 1),
                        lia.ge(lia.var(zvars[src]), 1),
                        lia.eq(lia.var(zvars[q]), lia.var(zvars[src]) + 1),
                    )
                )
        parts.append(lia.disj(*certs))
    aux = tuple(xvars) + tuple(zvars.values())
    return lia.conj(*parts), aux, xvars


def cefa_register_image(a: Cefa) -> ImageFormula:
    """Formula satisfiable at register values c iff some accepting run costs c."""
    a = a.trim()
    branches = []
    aux = []
    for i in sorted(a.initial, key=repr):
        for f in sorted(a.final, key=repr):
            graph = _pair_graph(a, i, f)
            if graph is None:
                continue
            formula, pair_aux, _ = _pair_formula(a, i, f, graph)
            branches.append(formula)
            aux.extend(pair_aux)
    return ImageFormula(lia.disj(*branches), tuple(aux))


def _eulerian_string(edges, counts, i, f) -> str:
    """Expand an edge-count model into a concrete accepted string."""
    adj = {}
    for (src, dst, _, rep), n in zip(edges, counts):
        for _ in range(n):
            adj.setdefault(src, []).append((dst, rep))
    stack = [(i, None)]
    pieces = []
    while stack:
        q, via = stack[-1]
        if adj.get(q):
            stack.append(adj[q].pop())
        else:
            stack.pop()
            if via is not None:
                pieces.append(via)
    assert sum(len(v) for v in adj.values()) == 0, "disconnected count model"
    return "".join(reversed(pieces))


def cefa_witness(a: Cefa, cost) -> str | None:
    """Some w with cost in a(w), or None when cost is outside the image."""
    cost = tuple(cost)
    if len(cost) != len(a.registers):
        raise ValueError("cost arity does not match the register vector")
    a = a.trim()
    pins = [lia.eq(lia.var(r), c) for r, c in zip(a.registers, cost)]
    for i in sorted(a.initial, key=repr):
        for f in sorted(a.final, key=repr):
            graph = _pair_graph(a, i, f)
            if graph is None:
                continue
            formula, _, xvars = _pair_formula(a, i, f, graph)
            model = lia.check_sat(lia.conj(formula, *pins))
            if model is None:
                continue
            counts = [model[x] for x in xvars]
            return _eulerian_string(graph[1], counts, i, f)
    return None
