"""Shared test helpers: random regexes, CEFAs, and straight-line scripts."""

from __future__ import annotations

import itertools
import random

from seqstr import regexes as rx
from seqstr.cefa import Cefa
from seqstr.automata import SEP


def random_regex(rng: random.Random, depth: int, alphabet: str = "ab") -> rx.Regex:
    if depth == 0:
        choices = [rx.Range(ord(c), ord(c)) for c in alphabet] + [rx.Epsilon()]
        return rng.choice(choices)
    roll = rng.random()
    if roll < 0.35:
        return rx.Concat(random_regex(rng, depth - 1, alphabet), random_regex(rng, depth - 1, alphabet))
    if roll < 0.70:
        return rx.Union(random_regex(rng, depth - 1, alphabet), random_regex(rng, depth - 1, alphabet))
    return rx.Star(random_regex(rng, depth - 1, alphabet))


def random_cefa(rng: random.Random, max_states: int = 4, registers: int = 1) -> Cefa:
    """Small CEFA over {a, b, separator} with one register by default."""
    n = rng.randint(1, max_states)
    labels = [(ord("a"), ord("a")), (ord("b"), ord("b")), (SEP, SEP)]
    transitions = set()
    for _ in range(rng.randint(1, 2 * n + 2)):
        src = rng.randrange(n)
        dst = rng.randrange(n)
        lo, hi = rng.choice(labels)
        upd = tuple(rng.randint(-2, 2) for _ in range(registers))
        transitions.add((src, lo, hi, dst, upd))
    regs = tuple(f"g{i}" for i in range(registers))
    initial = frozenset([0])
    final = frozenset(rng.sample(range(n), rng.randint(1, n)))
    return Cefa(regs, frozenset(range(n)), frozenset(transitions), initial, final)


def words_up_to(alphabet: str, n: int):
    for k in range(n + 1):
        for tup in itertools.product(alphabet, repeat=k):
            yield "".join(tup)


def accepted_with_costs(cefa: Cefa, alphabet: str, max_len: int):
    """Enumerate (word, cost) pairs accepted up to the length bound."""
    for w in words_up_to(alphabet, max_len):
        for c in cefa.accepts_with_cost(w):
            yield w, c


# ---------------------------------------------------------------------------
# Random straight-line scripts
# ---------------------------------------------------------------------------


def _regex_sexpr(e: rx.Regex) -> str:
    if isinstance(e, rx.Empty):
        return "re.none"
    if isinstance(e, rx.Epsilon):
        return '(str.to_re "")'
    if isinstance(e, rx.Range):
        if e.lo == e.hi:
            return f'(str.to_re "{chr(e.lo)}")'
        return f'(re.range "{chr(e.lo)}" "{chr(e.hi)}")'
    if isinstance(e, rx.Union):
        return f"(re.union {_regex_sexpr(e.left)} {_regex_sexpr(e.right)})"
    if isinstance(e, rx.Concat):
        return f"(re.++ {_regex_sexpr(e.left)} {_regex_sexpr(e.right)})"
    if isinstance(e, rx.Star):
        return f"(re.* {_regex_sexpr(e.inner)})"
    if isinstance(e, rx.Complement):
        return f"(re.comp {_regex_sexpr(e.inner)})"
    raise TypeError(e)


def random_script(rng: random.Random, alphabet: str = "ab") -> str:
    """A small straight-line script over strings/sequences of {a,b}."""
    lines = []
    str_vars = []
    seq_vars = []
    counter = itertools.count()

    def new_str():
        v = f"x{next(counter)}"
        lines.append(f"(declare-const {v} String)")
        str_vars.append(v)
        return v

    def new_seq():
        v = f"s{next(counter)}"
        lines.append(f"(declare-const {v} (Seq String))")
        seq_vars.append(v)
        return v

    def lit():
        n = rng.randint(0, 2)
        return '"' + "".join(rng.choice(alphabet) for _ in range(n)) + '"'

    # a few sources
    for _ in range(rng.randint(1, 2)):
        new_str()
    for _ in range(rng.randint(1, 2)):
        new_seq()

    defined = set()
    for _ in range(rng.randint(1, 4)):
        kind = rng.choice(
            ["split", "join", "nth", "update", "extract", "concat", "sconcat",
             "filter", "matchall", "unit"]
        )
        e = random_regex(rng, rng.randint(0, 2), alphabet)
        re_s = _regex_sexpr(e)
        if kind == "split":
            u = rng.choice(str_vars)
            v = new_seq()
            lines.append(f"(assert (= {v} (str.splitre {u} {re_s})))")
        elif kind == "matchall":
            u = rng.choice(str_vars)
            v = new_seq()
            lines.append(f"(assert (= {v} (str.matchall {u} {re_s})))")
        elif kind == "join":
            s = rng.choice(seq_vars)
            v = new_str()
            sep = rng.choice(['""', '"a"', '","'])
            lines.append(f"(assert (= {v} (seq.join {s} {sep})))")
        elif kind == "nth":
            s = rng.choice(seq_vars)
            v = new_str()
            lines.append(f"(assert (= {v} (seq.nth {s} {rng.randint(0, 3)})))")
        elif kind == "update":
            s = rng.choice(seq_vars)
            u = rng.choice(str_vars + [lit()])
            v = new_seq()
            lines.append(f"(assert (= {v} (seq.update {s} {rng.randint(0, 3)} {u})))")
        elif kind == "extract":
            s = rng.choice(seq_vars)
            v = new_seq()
            lines.append(
                f"(assert (= {v} (seq.extract {s} {rng.randint(0, 2)} {rng.randint(0, 3)})))"
            )
        elif kind == "concat":
            a, b = rng.choice(str_vars), rng.choice(str_vars + [lit()])
            v = new_str()
            lines.append(f"(assert (= {v} (str.++ {a} {b})))")
        elif kind == "sconcat":
            a, b = rng.choice(seq_vars), rng.choice(seq_vars)
            v = new_seq()
            lines.append(f"(assert (= {v} (seq.++ {a} {b})))")
        elif kind == "unit":
            u = rng.choice(str_vars + [lit()])
            v = new_seq()
            lines.append(f"(assert (= {v} (seq.unit {u})))")
        defined.add(lines[-1])

    # memberships and length constraints
    for _ in range(rng.randint(0, 3)):
        roll = rng.random()
        if roll < 0.4 and str_vars:
            u = rng.choice(str_vars)
            e = random_regex(rng, rng.randint(0, 2), alphabet)
            neg = "" if rng.random() < 0.7 else "not "
            body = f"(str.in_re {u} {_regex_sexpr(e)})"
            lines.append(f"(assert ({neg}{body}))" if neg else f"(assert {body})")
        elif roll < 0.7 and seq_vars:
            s = rng.choice(seq_vars)
            op = rng.choice(["=", "<", "<=", ">", ">="])
            lines.append(f"(assert ({op} (seq.len {s}) {rng.randint(0, 3)}))")
        elif str_vars:
            u = rng.choice(str_vars)
            op = rng.choice(["=", "<", "<="])
            lines.append(f"(assert ({op} (str.len {u}) {rng.randint(0, 3)}))")
    lines.append("(check-sat)")
    return "\n".join(lines)
