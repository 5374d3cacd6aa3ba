"""The straight-line decision procedure.

Defining equalities are processed in an order where every variable's
definition comes before the definitions of whatever it depends on; processing
an equality replaces the CEFA constraints on its left-hand side by pre-image
constraints on the arguments (a depth-first search over the finitely many
alternatives).  Once no equalities remain, the state is a conjunction of CEFA
memberships and integer arithmetic; each variable's automata are multiplied
out, their register images are conjoined with the arithmetic pool, and the
verdict comes from the arithmetic solver.  Sat verdicts are turned into
concrete values via register-image witnesses plus forward evaluation, and the
model is re-checked against the original script before being returned.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from . import encode as enc
from . import frontend as fe
from . import interp
from . import lia
from . import preimage as pre
from . import transducers as tr
from .cefa import Cefa, cefa_from_nfa, cefa_product, cefa_reduce, cefa_register_image, cefa_witness
from .encode import (
    TAG_SEQ,
    TAG_STR,
    TAG_TAIL,
    XConcat,
    XConst,
    XElem,
    XLia,
    XMember,
    XScript,
    XSeqlen,
    XStrlen,
    XSubseq,
    XTransduce,
    XVarEq,
    XWrite,
    argument_vars,
    defined_var,
    dec_value,
    enc_formula,
    format_automata,
    tail_format_automaton,
)


class InternalInconsistency(RuntimeError):
    """A sat model failed verification: an implementation bug, surfaced loudly."""


class _ResourceLimit(Exception):
    pass


@dataclass
class SolveOptions:
    timeout_ms: int | None = None
    max_product_states: int = 40_000
    lia_node_limit: int = 400_000
    verify_models: bool = True


@dataclass
class Verdict:
    status: str  # "sat" | "unsat" | "unknown"
    model: dict | None = None
    reason: str | None = None
    unknown_kind: str | None = None  # "fragment" | "resource"

    @property
    def is_sat(self):
        return self.status == "sat"


_A0, _A1 = format_automata()
_FORMATS = {
    TAG_SEQ: cefa_from_nfa(_A0),
    TAG_STR: cefa_from_nfa(_A1),
    TAG_TAIL: cefa_from_nfa(tail_format_automaton()),
}

_nft_cache: dict = {}


def _transducer(spec):
    """Spontaneous-free transducer and empty-input outputs for an atom spec."""
    if spec not in _nft_cache:
        kind = spec[0]
        if kind == "filter":
            raw = tr.filter_nft(spec[1])
        elif kind == "splitstr":
            raw = tr.splitstr_nft(spec[1])
        elif kind == "matchallstr":
            raw = tr.match_all_nft(spec[1])
        elif kind == "join":
            raw = tr.join_nft(spec[1])
        elif kind == "tail":
            raw = tr.seq_tail_nft()
        else:
            raise ValueError(f"unknown transducer spec {spec!r}")
        _nft_cache[spec] = raw.epsilon_eliminated()
    return _nft_cache[spec]


class _Engine:
    def __init__(self, x: XScript, opts: SolveOptions):
        self.x = x
        self.opts = opts
        self.deadline = (
            time.monotonic() + opts.timeout_ms / 1000.0 if opts.timeout_ms else None
        )
        self.constraints = {v: [_FORMATS[tag]] for v, tag in x.tags.items()}
        self.pool = []
        defining = {}
        for atom in x.atoms:
            lhs = defined_var(atom)
            if lhs is not None:
                defining[lhs] = atom
                continue
            if isinstance(atom, XLia):
                self.pool.append(atom.formula)
            elif isinstance(atom, XMember):
                nfa = interp.regex_nfa(atom.regex)
                self.constraints[atom.x].append(cefa_from_nfa(nfa))
            elif isinstance(atom, XStrlen):
                reg = pre.fresh_register("len")
                self.constraints[atom.x].append(pre.strlen_cefa(reg))
                self.pool.append(lia.eq(lia.var(reg), lia.var(atom.k)))
            elif isinstance(atom, XSeqlen):
                reg = pre.fresh_register("len")
                self.constraints[atom.x].append(pre.seqlen_cefa(reg))
                self.pool.append(lia.eq(lia.var(reg), lia.var(atom.k)))
            else:
                raise TypeError(f"unexpected atom {atom!r}")
        self.worklist = self._order(defining)

    def _order(self, defining):
        """Each definition before the definitions of variables it depends on."""
        indeg = {v: 0 for v in defining}
        succ = {v: [] for v in defining}
        for v, atom in defining.items():
            for w in argument_vars(atom):
                if w in defining:
                    succ[v].append(w)
                    indeg[w] += 1
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(defining[v])
            for w in sorted(succ[v]):
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
                    ready.sort()
        if len(order) != len(defining):
            raise AssertionError("definition graph has a cycle past the fragment check")
        return order

    # --- resource guards ---

    def _tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _ResourceLimit("timeout")

    def _capped(self, cefa: Cefa) -> Cefa:
        if len(cefa.states) > self.opts.max_product_states:
            raise _ResourceLimit(
                f"product automaton exceeded {self.opts.max_product_states} states"
            )
        return cefa

    def _product(self, cefas) -> Cefa:
        out = cefas[0]
        for other in cefas[1:]:
            self._tick()
            out = self._capped(cefa_product(out, other))
        if len(cefas) > 1:
            out = cefa_reduce(out)
        return out

    # --- search ---

    def run(self):
        return self._search(0, self.constraints, tuple(self.pool))

    def _search(self, index, constraints, pool):
        self._tick()
        if index == len(self.worklist):
            return self._final(constraints, pool)
        atom = self.worklist[index]
        lhs = defined_var(atom)
        target = self._product(constraints[lhs])
        if target.is_empty():
            return None
        alternatives = self._alternatives(atom, target)
        alternatives.sort(key=lambda alt: sum(len(c.states) for c in alt.args))
        args = argument_vars(atom)
        for alt in alternatives:
            self._tick()
            if any(c.is_empty() for c in alt.args):
                continue
            for c in alt.args:
                self._capped(c)
            new_constraints = dict(constraints)
            del new_constraints[lhs]
            for var, cefa in zip(args, alt.args):
                new_constraints[var] = new_constraints[var] + [cefa]
            bindings = tuple(
                lia.eq(lia.var(r), t) for r, t in zip(target.registers, alt.subst)
            )
            result = self._search(index + 1, new_constraints, pool + bindings + (alt.side,))
            if result is not None:
                return result
        return None

    def _alternatives(self, atom, target: Cefa):
        if isinstance(atom, XConst):
            return [
                pre.PreimageAlternative((), tuple(lia.const(c) for c in cost))
                for cost in sorted(target.accepts_with_cost(atom.value))
            ]
        if isinstance(atom, XVarEq):
            copy = pre._fresh_copy(target)
            return [
                pre.PreimageAlternative((copy,), tuple(lia.var(r) for r in copy.registers))
            ]
        if isinstance(atom, XConcat):
            return pre.pre_concat(target)
        if isinstance(atom, XTransduce):
            efree, eps_outs = _transducer(atom.spec)
            return pre.pre_nft(efree, eps_outs, target)
        if isinstance(atom, XWrite):
            return pre.pre_write_total(target, atom.index)
        if isinstance(atom, XSubseq):
            return pre.pre_subseq(target, atom.start, atom.length)
        if isinstance(atom, XElem):
            return pre.pre_elem(target, atom.index)
        raise TypeError(f"not a defining atom: {atom!r}")

    # --- final check ---

    def _final(self, constraints, pool):
        self._tick()
        products = {}
        for var in sorted(constraints):
            product = self._product(constraints[var])
            if product.is_empty():
                return None
            products[var] = product
        formula = lia.conj(*pool, *(cefa_register_image(p).formula for p in products.values()))
        try:
            model = lia.check_sat(formula, node_limit=self.opts.lia_node_limit)
        except lia.LiaBudgetExceeded as exc:
            raise _ResourceLimit(str(exc)) from exc
        if model is None:
            return None
        return products, model


def _decode(tag: str, w: str):
    if tag == TAG_SEQ:
        return dec_value(w)
    return w


def extract_model(x: XScript, products, lia_model, normalized: fe.Script) -> dict:
    """Concrete values: witnesses for source variables, forward evaluation for
    defined ones, integers straight from the arithmetic model."""
    values = {}
    for var, product in products.items():
        cost = tuple(lia_model.get(r, 0) for r in product.registers)
        witness = cefa_witness(product, cost)
        if witness is None:
            raise InternalInconsistency(
                f"no witness for {var} at register values {cost}"
            )
        if x.tags[var] == TAG_SEQ:
            values[var] = dec_value(witness)
        else:
            values[var] = witness
    assignment = {}
    for name, sort in normalized.decls:
        if sort == fe.INT:
            assignment[name] = lia_model.get(name, 0)
        elif name in values:
            assignment[name] = values[name]
    plan = interp._definitions(normalized)
    if plan is None:
        raise InternalInconsistency("normalized script is not straight-line")
    defs, order = plan
    for v in order:
        value = interp.eval_term(defs[v], assignment)
        if value is interp.UNDEF:
            raise InternalInconsistency(f"defined variable {v} evaluated to undefined")
        assignment[v] = value
    return assignment


def solve(source, opts: SolveOptions | None = None) -> Verdict:
    """Decide a script (text or parsed); sat verdicts carry a verified model."""
    opts = opts or SolveOptions()
    script = fe.parse_script(source) if isinstance(source, str) else source
    normalized = fe.normalize(script)
    violation = fe.check_straight_line(normalized)
    if violation is not None:
        return Verdict("unknown", reason=str(violation), unknown_kind="fragment")
    x = enc_formula(normalized)
    engine = _Engine(x, opts)
    try:
        outcome = engine.run()
    except _ResourceLimit as exc:
        return Verdict("unknown", reason=str(exc), unknown_kind="resource")
    if outcome is None:
        return Verdict("unsat")
    products, lia_model = outcome
    assignment = extract_model(x, products, lia_model, normalized)
    model = {name: assignment[name] for name, _ in script.decls}
    if opts.verify_models and not interp.check_model(script, model):
        raise InternalInconsistency("sat model failed verification on the input script")
    return Verdict("sat", model=model)
