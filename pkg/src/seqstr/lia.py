"""Quantifier-free linear integer arithmetic: terms, formulas, and a decider.

Terms are kept in normalized linear form (integer coefficients plus constant),
which is closed under addition, subtraction and constant multiplication.
Satisfiability is decided by DPLL-style splitting over disjunctions, integer
equality elimination (gcd test, unit substitution, coefficient reduction with
a fresh quotient variable), gcd bound tightening on inequalities, and an exact
rational simplex with branch-and-bound.  All pivot arithmetic uses Fractions,
so verdicts are never subject to rounding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd


class UnboundVariable(KeyError):
    pass


class LiaBudgetExceeded(RuntimeError):
    """The branch-and-bound node budget ran out (resource limit, not a verdict)."""


# ---------------------------------------------------------------------------
# Terms and formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinTerm:
    """Sum of coeff*var plus an integer constant; coeffs sorted by name."""

    coeffs: tuple
    const: int

    @staticmethod
    def of(value) -> "LinTerm":
        if isinstance(value, LinTerm):
            return value
        if isinstance(value, int):
            return LinTerm((), value)
        if isinstance(value, str):
            return LinTerm(((value, 1),), 0)
        raise TypeError(f"cannot coerce {value!r} to a linear term")

    @staticmethod
    def _make(coeffs: dict, const: int) -> "LinTerm":
        items = tuple(sorted((v, c) for v, c in coeffs.items() if c != 0))
        return LinTerm(items, const)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, other):
        other = LinTerm.of(other)
        coeffs = self.as_dict()
        for v, c in other.coeffs:
            coeffs[v] = coeffs.get(v, 0) + c
        return LinTerm._make(coeffs, self.const + other.const)

    __radd__ = __add__

    def __sub__(self, other):
        return self + LinTerm.of(other).scale(-1)

    def __rsub__(self, other):
        return LinTerm.of(other) + self.scale(-1)

    def scale(self, k: int) -> "LinTerm":
        if not isinstance(k, int):
            raise TypeError("terms are linear: only integer scaling is allowed")
        return LinTerm._make({v: c * k for v, c in self.coeffs}, self.const * k)

    def __neg__(self):
        return self.scale(-1)

    def variables(self) -> set:
        return {v for v, _ in self.coeffs}

    def eval(self, model) -> int:
        total = self.const
        for v, c in self.coeffs:
            if v not in model:
                raise UnboundVariable(v)
            total += c * model[v]
        return total

    def __str__(self):
        parts = [f"{c}*{v}" for v, c in self.coeffs]
        parts.append(str(self.const))
        return " + ".join(parts)


def var(name: str) -> LinTerm:
    return LinTerm(((name, 1),), 0)


def const(value: int) -> LinTerm:
    return LinTerm((), value)


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Cmp(Formula):
    """Atomic comparison `term op 0` with op in {"<=", "==", "!="}."""

    op: str
    term: LinTerm

    def __post_init__(self):
        if self.op not in ("<=", "==", "!="):
            raise ValueError(f"bad comparison op {self.op!r}")


@dataclass(frozen=True)
class Conj(Formula):
    parts: tuple


@dataclass(frozen=True)
class Disj(Formula):
    parts: tuple


TRUE = Conj(())
FALSE = Disj(())


def _diff(a, b) -> LinTerm:
    return LinTerm.of(a) - LinTerm.of(b)


def eq(a, b) -> Formula:
    return Cmp("==", _diff(a, b))


def ne(a, b) -> Formula:
    return Cmp("!=", _diff(a, b))


def le(a, b) -> Formula:
    return Cmp("<=", _diff(a, b))


def lt(a, b) -> Formula:
    # strict over the integers: a < b iff a - b <= -1
    return Cmp("<=", _diff(a, b) + 1)


def ge(a, b) -> Formula:
    return le(b, a)


def gt(a, b) -> Formula:
    return lt(b, a)


def conj(*parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, Conj):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return Conj(tuple(flat))


def disj(*parts) -> Formula:
    flat = []
    for p in parts:
        if isinstance(p, Disj):
            flat.extend(p.parts)
        else:
            flat.append(p)
    return Disj(tuple(flat))


def lnot(atom: Cmp) -> Formula:
    """Negate an atomic comparison (negation exists only on atoms)."""
    if atom.op == "==":
        return Cmp("!=", atom.term)
    if atom.op == "!=":
        return Cmp("==", atom.term)
    # not(t <= 0) == t >= 1 == -t + 1 <= 0
    return Cmp("<=", atom.term.scale(-1) + 1)


def formula_variables(f: Formula) -> set:
    if isinstance(f, Cmp):
        return f.term.variables()
    out = set()
    for p in f.parts:
        out |= formula_variables(p)
    return out


def eval_formula(f: Formula, model) -> bool:
    """Standard semantics; raises UnboundVariable on a missing assignment."""
    if isinstance(f, Cmp):
        v = f.term.eval(model)
        if f.op == "<=":
            return v <= 0
        if f.op == "==":
            return v == 0
        return v != 0
    if isinstance(f, Conj):
        return all(eval_formula(p, model) for p in f.parts)
    if isinstance(f, Disj):
        return any(eval_formula(p, model) for p in f.parts)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Exact rational simplex (phase-1 feasibility)
# ---------------------------------------------------------------------------


def _lp_feasible(rows):
    """Feasibility of `sum(coeffs) <= bound` rows over the rationals.

    rows: list of (coeffs: dict var->int, bound: int).  Returns var->Fraction
    or None.  Two-phase is avoided: every row gets a slack, rows with negative
    bound get an artificial, and phase 1 minimizes the artificial sum with
    Bland's rule.
    """
    variables = sorted({v for coeffs, _ in rows for v in coeffs})
    nv = len(variables)
    vid = {v: i for i, v in enumerate(variables)}
    # columns: 2*i (positive part), 2*i+1 (negative part), then slacks, artificials
    ncols = 2 * nv + len(rows)
    tab = []
    rhs = []
    basis = []
    art_cols = []
    for r, (coeffs, bound) in enumerate(rows):
        row = {}
        for v, c in coeffs.items():
            if c:
                row[2 * vid[v]] = Fraction(c)
                row[2 * vid[v] + 1] = Fraction(-c)
        slack = 2 * nv + r
        row[slack] = Fraction(1)
        b = Fraction(bound)
        if b < 0:
            row = {c: -val for c, val in row.items()}
            b = -b
            art = ncols + len(art_cols)
            art_cols.append(art)
            row[art] = Fraction(1)
            basis.append(art)
        else:
            basis.append(slack)
        tab.append(row)
        rhs.append(b)

    if not art_cols:
        model = {v: Fraction(0) for v in variables}
        _read_basic(model, tab, rhs, basis, vid, variables)
        return model

    art_set = set(art_cols)
    # objective: minimize sum of artificials; reduced-cost row
    obj = {}
    obj_rhs = Fraction(0)
    for r, b in enumerate(basis):
        if b in art_set:
            for c, val in tab[r].items():
                obj[c] = obj.get(c, Fraction(0)) - val
            obj_rhs -= rhs[r]
    for a in art_cols:
        obj[a] = obj.get(a, Fraction(0)) + 1

    while True:
        entering = None
        for c in sorted(obj):
            if obj[c] < 0 and c not in art_set:
                entering = c
                break
        if entering is None:
            break
        leaving = None
        best = None
        for r in range(len(tab)):
            a = tab[r].get(entering)
            if a and a > 0:
                ratio = rhs[r] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leaving]):
                    best = ratio
                    leaving = r
        if leaving is None:
            break  # unbounded direction cannot reduce a bounded-below objective
        _pivot(tab, rhs, obj, basis, leaving, entering)

    total = Fraction(0)
    for r, b in enumerate(basis):
        if b in art_set:
            total += rhs[r]
    if total != 0:
        return None
    model = {v: Fraction(0) for v in variables}
    _read_basic(model, tab, rhs, basis, vid, variables)
    return model


def _pivot(tab, rhs, obj, basis, leaving, entering):
    prow = tab[leaving]
    pval = prow[entering]
    new_prow = {c: v / pval for c, v in prow.items() if v}
    new_rhs = rhs[leaving] / pval
    tab[leaving] = new_prow
    rhs[leaving] = new_rhs
    basis[leaving] = entering
    for r in range(len(tab)):
        if r == leaving:
            continue
        factor = tab[r].get(entering)
        if factor:
            row = tab[r]
            for c, v in new_prow.items():
                nv_ = row.get(c, Fraction(0)) - factor * v
                if nv_:
                    row[c] = nv_
                else:
                    row.pop(c, None)
            rhs[r] -= factor * new_rhs
    factor = obj.get(entering)
    if factor:
        for c, v in new_prow.items():
            nv_ = obj.get(c, Fraction(0)) - factor * v
            if nv_:
                obj[c] = nv_
            else:
                obj.pop(c, None)


def _read_basic(model, tab, rhs, basis, vid, variables):
    for r, b in enumerate(basis):
        if b < 2 * len(variables):
            v = variables[b // 2]
            if b % 2 == 0:
                model[v] += rhs[r]
            else:
                model[v] -= rhs[r]


# ---------------------------------------------------------------------------
# Integer decision: equality elimination + tightening + branch and bound
# ---------------------------------------------------------------------------

_fresh_quotient = itertools.count()


def _symmetric_mod(a: int, m: int) -> int:
    r = a % m
    return r - m if r > m - r else r  # in (-m/2, m/2]


def _eliminate_equalities(eqs, ineqs):
    """Returns (ineqs', substitutions) or None when integer-infeasible.

    substitutions is a list of (var, LinTerm) in elimination order; applying
    them in reverse extends a model of the reduced system.
    """
    eqs = list(eqs)
    ineqs = list(ineqs)
    subs = []

    def substitute(term: LinTerm, v: str, repl: LinTerm) -> LinTerm:
        coeffs = term.as_dict()
        c = coeffs.pop(v, 0)
        base = LinTerm._make(coeffs, term.const)
        return base + repl.scale(c) if c else base

    while eqs:
        t = eqs.pop()
        if not t.coeffs:
            if t.const != 0:
                return None
            continue
        g = 0
        for _, c in t.coeffs:
            g = gcd(g, abs(c))
        if t.const % g != 0:
            return None
        if g > 1:
            t = LinTerm(tuple((v, c // g) for v, c in t.coeffs), t.const // g)
        unit = next(((v, c) for v, c in t.coeffs if abs(c) == 1), None)
        if unit is None:
            # coefficient reduction: define the quotient of t modulo m
            v0, a0 = min(t.coeffs, key=lambda vc: abs(vc[1]))
            m = abs(a0) + 1
            sigma = f"!s{next(_fresh_quotient)}"
            reduced = LinTerm._make(
                {v: _symmetric_mod(c, m) for v, c in t.coeffs} | {sigma: -m},
                _symmetric_mod(t.const, m),
            )
            eqs.append(t)
            eqs.append(reduced)
            continue
        v, c = unit
        # c*v + rest = 0  =>  v = -(rest)/c
        rest = LinTerm._make({u: k for u, k in t.coeffs if u != v}, t.const)
        repl = rest.scale(-c)  # c in {1,-1} so -(rest)/c == rest * (-c)
        subs.append((v, repl))
        eqs = [substitute(e, v, repl) for e in eqs]
        ineqs = [substitute(i, v, repl) for i in ineqs]
    return ineqs, subs


def _tighten(ineqs):
    """gcd bound tightening; returns None on a constant violation."""
    out = []
    for t in ineqs:
        if not t.coeffs:
            if t.const > 0:
                return None
            continue
        g = 0
        for _, c in t.coeffs:
            g = gcd(g, abs(c))
        if g > 1:
            # sum(a*x) + k <= 0  <=>  sum((a/g)*x) <= floor(-k/g)
            bound = (-t.const) // g
            out.append(LinTerm(tuple((v, c // g) for v, c in t.coeffs), -bound))
        else:
            out.append(t)
    return out


def _solve_conjunction(atoms, budget):
    eqs = []
    ineqs = []
    for a in atoms:
        if a.op == "==":
            eqs.append(a.term)
        elif a.op == "<=":
            ineqs.append(a.term)
        else:
            raise AssertionError("disequalities are split before reaching the core")
    seen_vars = set()
    for t in eqs + ineqs:
        seen_vars |= t.variables()
    reduced = _eliminate_equalities(eqs, ineqs)
    if reduced is None:
        return None
    ineqs, subs = reduced
    for v, repl in subs:
        seen_vars.add(v)
        seen_vars |= repl.variables()
    for t in ineqs:
        seen_vars |= t.variables()
    ineqs = _tighten(ineqs)
    if ineqs is None:
        return None

    base_rows = [(t.as_dict(), -t.const) for t in ineqs]
    stack = [[]]
    while stack:
        budget[0] -= 1
        if budget[0] < 0:
            raise LiaBudgetExceeded("branch-and-bound node budget exhausted")
        extra = stack.pop()
        sol = _lp_feasible(base_rows + extra)
        if sol is None:
            continue
        frac = None
        for v in sorted(sol):
            if sol[v].denominator != 1:
                if frac is None or abs(sol[v] - round(sol[v])) > abs(sol[frac] - round(sol[frac])):
                    frac = v
        if frac is None:
            model = {v: int(val) for v, val in sol.items()}
            for v in seen_vars:
                model.setdefault(v, 0)
            for v, repl in reversed(subs):
                model[v] = repl.eval(model)
            return model
        value = sol[frac]
        lo = floor(value)
        hi = ceil(value)
        below = extra + [({frac: 1}, lo)]
        above = extra + [({frac: -1}, -hi)]
        if value - lo <= Fraction(1, 2):
            stack.append(above)
            stack.append(below)
        else:
            stack.append(below)
            stack.append(above)
    return None


def _split_pending(pending):
    atoms = []
    disjs = []
    stack = list(pending)
    while stack:
        f = stack.pop()
        if isinstance(f, Cmp):
            if f.op == "!=":
                # t != 0  splits into  t <= -1  or  -t <= -1
                disjs.append(
                    Disj((Cmp("<=", f.term + 1), Cmp("<=", f.term.scale(-1) + 1)))
                )
            else:
                atoms.append(f)
        elif isinstance(f, Conj):
            stack.extend(f.parts)
        elif isinstance(f, Disj):
            disjs.append(f)
        else:
            raise TypeError(f"not a formula: {f!r}")
    return atoms, disjs


def _dpll(atoms, disjs, budget):
    if disjs:
        rows = [(a.term.as_dict(), -a.term.const) for a in atoms if a.op == "<="]
        for a in atoms:
            if a.op == "==":
                rows.append((a.term.as_dict(), -a.term.const))
                neg = a.term.scale(-1)
                rows.append((neg.as_dict(), -neg.const))
        budget[0] -= 1
        if budget[0] < 0:
            raise LiaBudgetExceeded("branch-and-bound node budget exhausted")
        if _lp_feasible(rows) is None:
            return None
        smallest = min(disjs, key=lambda d: len(d.parts))
        rest = [d for d in disjs if d is not smallest]
        for branch in smallest.parts:
            new_atoms, new_disjs = _split_pending([branch])
            res = _dpll(atoms + new_atoms, rest + new_disjs, budget)
            if res is not None:
                return res
        return None
    return _solve_conjunction(atoms, budget)


def check_sat(f: Formula, node_limit: int = 200_000):
    """Sound and complete satisfiability check; returns a model dict or None.

    Raises LiaBudgetExceeded when the node budget runs out.
    """
    atoms, disjs = _split_pending([f])
    budget = [node_limit]
    model = _dpll(atoms, disjs, budget)
    if model is None:
        return None
    for v in formula_variables(f):
        model.setdefault(v, 0)
    assert eval_formula(f, model), "internal error: model fails its own formula"
    return model
