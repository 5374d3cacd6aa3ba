"""seqstr: a decision procedure for straight-line string-sequence constraints.

Sequences of strings are encoded as separator-delimited strings; constraints
are propagated backwards through the defining equalities as cost-enriched
automaton memberships, and the residual arithmetic goes to a built-in linear
integer arithmetic solver.
"""

__all__ = ["solve", "SolveOptions", "Verdict"]


def __getattr__(name):
    if name in __all__:
        from . import engine

        return getattr(engine, name)
    raise AttributeError(name)
