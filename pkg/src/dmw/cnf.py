"""Tseitin translation of primitive formulas over a finite (possibly symbolic) structure."""

from __future__ import annotations

from pysat.card import CardEnc, EncType
from pysat.solvers import Solver

from .formula import And, Bottom, BoxH, BoxV, Diag, Not, Var, expand_derived

SOLVER = "cadical153"


class CNF:
    def __init__(self):
        self.nvars = 1
        self.clauses = [[1]]
        self.TRUE = 1
        self.FALSE = -1

    def new(self):
        self.nvars += 1
        return self.nvars

    def add(self, clause):
        self.clauses.append(list(clause))

    def and_(self, lits):
        lits = [l for l in lits if l != self.TRUE]
        if any(l == self.FALSE for l in lits):
            return self.FALSE
        lits = list(dict.fromkeys(lits))
        if not lits:
            return self.TRUE
        if len(lits) == 1:
            return lits[0]
        x = self.new()
        for l in lits:
            self.add([-x, l])
        self.add([x] + [-l for l in lits])
        return x

    def or_(self, lits):
        return -self.and_([-l for l in lits])

    def atmost(self, lits, k):
        lits = [l for l in lits if l != self.FALSE]
        if len(lits) <= k:
            return
        enc = CardEnc.atmost(lits=lits, bound=k, top_id=self.nvars, encoding=EncType.seqcounter)
        self.nvars = max(self.nvars, enc.nv)
        for c in enc.clauses:
            self.add(c)

    def atleast1(self, lits):
        self.add(lits)

    def solve(self, assumptions=()):
        with Solver(name=SOLVER, bootstrap_with=self.clauses) as s:
            ok = s.solve(assumptions=list(assumptions))
            return s.get_model() if ok else None


class Structure:
    """Symbolic description of a finite 3-modal structure.

    ``h_edges[w]`` / ``v_edges[w]`` list (edge literal, target) pairs, where the
    literal may be ``cnf.TRUE`` for fixed edges.  ``diag[w]`` is a literal and
    ``var(name, w)`` returns the literal of a propositional variable.
    """

    def __init__(self, cnf, worlds, h_edges, v_edges, diag, var):
        self.cnf = cnf
        self.worlds = worlds
        self.h_edges = h_edges
        self.v_edges = v_edges
        self.diag = diag
        self.var = var
        self.memo = {}

    def lit(self, f, w):
        """Literal equivalent to truth of primitive ``f`` at ``w``."""
        key = (f, w)
        if key in self.memo:
            return self.memo[key]
        c = self.cnf
        if isinstance(f, Var):
            out = self.var(f.name, w)
        elif isinstance(f, Diag):
            out = self.diag[w]
        elif isinstance(f, Bottom):
            out = c.FALSE
        elif isinstance(f, Not):
            out = -self.lit(f.child, w)
        elif isinstance(f, And):
            a = self.lit(f.left, w)
            out = c.FALSE if a == c.FALSE else c.and_([a, self.lit(f.right, w)])
        elif isinstance(f, (BoxH, BoxV)):
            edges = self.h_edges[w] if isinstance(f, BoxH) else self.v_edges[w]
            terms = []
            for e, t in edges:
                if e == c.FALSE:
                    continue
                body = self.lit(f.child, t)
                terms.append(body if e == c.TRUE else c.or_([-e, body]))
            out = c.and_(terms)
        else:
            raise TypeError(f"not primitive: {f!r}")
        self.memo[key] = out
        return out


def primitive(f):
    return expand_derived(f)
