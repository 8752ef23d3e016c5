"""Compile counter machines (and formula pairs) into grid-style encoding formulas."""

from __future__ import annotations

from dataclasses import dataclass

from .counter_machine import validate_machine
from .formula import (And, Bottom, BoxH, BoxHPlus, BoxV, BoxVPlus, DiaH, DiaHPlus, DiaV, DiaVPlus, Diag,
                      Iff, Implies, Not, Or, Var, conj, disj, uses_diag, variables)

FORWARD = "forward"
FINITARY = "finitary"
BACKWARD = "backward"
LINEAR = "linear"
STYLES = (FORWARD, FINITARY, BACKWARD, LINEAR)

TICK = "tick"
PFRESH = "pfresh"
STOP = "stop"
FRESH_P = "P"


@dataclass(frozen=True)
class EncodingStyle:
    style: str
    q_fin: str | None = None
    q_r: str | None = None

    def __post_init__(self):
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}")
        if (self.q_fin is not None) != (self.style == FINITARY):
            raise ValueError("q_fin is required for the finitary style and only there")
        if self.q_r is not None and self.style != LINEAR:
            raise ValueError("a recurrence state only applies to the linear style")


def as_style(style):
    if isinstance(style, EncodingStyle):
        return style.style
    return style


# ---------------------------------------------------------------- naming

def S(q):
    return Var(f"S_{q}")


def Cl(i):
    return Var(f"Cl_{i}")


def Ce(i):
    return Var(f"Ce_{i}")


def Inl(i):
    return Var(f"Inl_{i}")


def Outl(i):
    return Var(f"Outl_{i}")


def Ine(i):
    return Var(f"Ine_{i}")


def Oute(i):
    return Var(f"Oute_{i}")


D = Diag()


def state_formula(q, states):
    states = list(states)
    if q not in states:
        raise ValueError(f"{q!r} is not a state")
    return conj([S(q)] + [Not(S(p)) for p in states if p != q])


# ---------------------------------------------------------------- grids

def grid_formula(style):
    style = as_style(style)
    hgen = BoxVPlus(DiaH(D))
    if style == FORWARD:
        return And(hgen, BoxH(DiaV(And(DiaH(D), BoxH(D)))))
    if style == FINITARY:
        p = Var(PFRESH)
        inf = BoxH(BoxVPlus(Implies(Or(p, D), BoxH(And(p, Not(D))))))
        vfin = BoxH(DiaV(Or(Var(STOP), And(DiaH(D), BoxH(D)))))
        return conj([hgen, inf, vfin])
    if style == BACKWARD:
        return conj([
            DiaV(DiaH(And(D, BoxH(Bottom())))),
            BoxV(Implies(DiaH(D), DiaH(conj([Not(D), DiaH(D), BoxH(D)])))),
            BoxH(DiaV(D)),
        ])
    if style == LINEAR:
        return And(D, BoxHPlus(DiaV(And(DiaH(D), BoxH(BoxH(Not(D)))))))
    raise ValueError(f"unknown style {style!r}")


# ---------------------------------------------------------------- counting formulas

def _fwd_lossy(kind, i):
    c = Cl(i)
    if kind == "fix":
        return BoxVPlus(Implies(BoxH(c), c))
    if kind == "inc":
        return BoxVPlus(Implies(BoxH(c), Or(c, D)))
    if kind == "dec":
        return And(BoxVPlus(Implies(BoxH(c), c)), DiaVPlus(And(c, BoxH(Not(c)))))
    if kind == "test":
        return BoxVPlus(BoxH(Not(c)))
    raise ValueError(kind)


def _fwd_ierr(kind, i):
    c = Ce(i)
    fix = BoxVPlus(Implies(c, BoxH(c)))
    if kind == "fix":
        return fix
    if kind == "inc":
        return And(fix, DiaVPlus(And(Not(c), BoxH(c))))
    if kind == "dec":
        return BoxVPlus(Implies(c, Or(BoxH(c), D)))
    if kind == "test":
        return BoxVPlus(Not(c))
    raise ValueError(kind)


def _bw_lossy(kind, i):
    c = Cl(i)
    fix = BoxVPlus(Implies(c, BoxH(c)))
    if kind == "fix":
        return fix
    if kind == "inc":
        return BoxVPlus(Implies(c, Or(BoxH(c), D)))
    if kind == "dec":
        return And(fix, DiaVPlus(And(Not(c), BoxH(c))))
    if kind == "test":
        return BoxVPlus(Not(c))
    raise ValueError(kind)


def _bw_ierr(kind, i):
    c = Ce(i)
    fix = BoxVPlus(Implies(BoxH(c), c))
    if kind == "fix":
        return fix
    if kind == "inc":
        return And(fix, DiaVPlus(And(c, BoxH(Not(c)))))
    if kind == "dec":
        return BoxVPlus(Implies(BoxH(c), Or(c, D)))
    if kind == "test":
        return BoxVPlus(BoxH(Not(c)))
    raise ValueError(kind)


def _lin_lossy(kind, i):
    inn, out = Inl(i), Outl(i)
    fix = BoxVPlus(Implies(BoxH(inn), inn))
    if kind == "fix":
        return fix
    if kind == "inc":
        return BoxVPlus(Implies(BoxH(inn), Or(inn, D)))
    if kind == "dec":
        return And(fix, DiaVPlus(conj([inn, Not(out), BoxH(out)])))
    if kind == "test":
        return BoxVPlus(Implies(BoxH(inn), BoxH(out)))
    raise ValueError(kind)


def _lin_ierr(kind, i):
    inn, out = Ine(i), Oute(i)
    fix = BoxVPlus(Implies(BoxH(out), out))
    if kind == "fix":
        return fix
    if kind == "inc":
        return And(fix, DiaVPlus(conj([Not(inn), Not(out), BoxH(inn)])))
    if kind == "dec":
        return BoxVPlus(Implies(BoxH(out), Or(out, D)))
    if kind == "test":
        return BoxVPlus(Implies(inn, out))
    raise ValueError(kind)


_TABLE = {
    (FORWARD, "lossy"): _fwd_lossy, (FORWARD, "ierr"): _fwd_ierr,
    (FINITARY, "lossy"): _fwd_lossy, (FINITARY, "ierr"): _fwd_ierr,
    (BACKWARD, "lossy"): _bw_lossy, (BACKWARD, "ierr"): _bw_ierr,
    (LINEAR, "lossy"): _lin_lossy, (LINEAR, "ierr"): _lin_ierr,
}


def counting_formula(kind, i, flavor, style):
    """One of the fix/inc/dec/test building blocks for counter i."""
    return _TABLE[(as_style(style), flavor)](kind, i)


def do_formula(op, flavor, style, counters=2):
    """The block for op on its counter conjoined with fix-blocks for all other counters."""
    if op.counter >= counters:
        raise ValueError(f"counter {op.counter} out of range for {counters} counters")
    block = _TABLE[(as_style(style), flavor)]
    return conj([block(op.kind, op.counter)] + [block("fix", j) for j in range(counters) if j != op.counter])


# ---------------------------------------------------------------- machine formulas

def _check_machine(m):
    errs = validate_machine(m)
    if errs:
        raise ValueError("malformed machine: " + "; ".join(errs))


def machine_formula(m, style):
    """The machine-specific conjunction for the given style (an EncodingStyle)."""
    if not isinstance(style, EncodingStyle):
        style = EncodingStyle(style)
    _check_machine(m)
    st = lambda q: state_formula(q, m.states)
    N = m.counters
    running = m.running_states()
    s = style.style
    if s in (FORWARD, FINITARY):
        mini = BoxH(Implies(D, And(st(m.init), BoxVPlus(conj([And(Not(Cl(i)), Not(Ce(i))) for i in range(N)])))))
        mstep = BoxH(conj([
            Implies(st(q), disj([conj([BoxH(st(t)), do_formula(op, "lossy", s, N), do_formula(op, "ierr", s, N)])
                                 for op, t in m.instructions(q)]))
            for q in running]))
        if s == FORWARD:
            return conj([mini, mstep, BoxH(disj([st(q) for q in running]))])
        if style.q_fin not in m.states:
            raise ValueError(f"q_fin {style.q_fin!r} is not a state")
        fin_states = [q for q in m.states if q not in m.halting or q == style.q_fin]
        minf = BoxH(disj([st(q) for q in fin_states]))
        return conj([mini, mstep, minf, BoxH(Implies(DiaV(Var(STOP)), st(style.q_fin)))])
    if s == BACKWARD:
        mini = BoxH(Implies(BoxH(Bottom()), And(st(m.init), BoxVPlus(conj([And(Not(Cl(i)), Not(Ce(i))) for i in range(N)])))))
        mstep = BoxH(conj([
            Implies(DiaH(st(q)), disj([conj([st(t), do_formula(op, "lossy", s, N), do_formula(op, "ierr", s, N)])
                                       for op, t in m.instructions(q)]))
            for q in running]))
        return conj([mini, mstep, BoxH(disj([st(q) for q in running]))])
    # linear
    xi = conj([BoxHPlus(BoxVPlus(conj([Implies(v, BoxH(v)) for v in (Inl(i), Outl(i), Ine(i), Oute(i))])))
               for i in range(N)])
    mini = And(st(m.init), BoxVPlus(conj([conj([Not(Inl(i)), Not(Outl(i)), Not(Ine(i)), Not(Oute(i))]) for i in range(N)])))
    nextcol = And(DiaH(D), BoxH(BoxH(Not(D))))
    mstep = BoxHPlus(conj([
        Implies(DiaVPlus(st(q)), disj([
            conj([do_formula(op, "lossy", s, N), do_formula(op, "ierr", s, N),
                  BoxVPlus(Implies(nextcol, BoxH(Implies(D, st(t)))))])
            for op, t in m.instructions(q)]))
        for q in running]))
    minf = BoxHPlus(BoxVPlus(Implies(D, disj([st(q) for q in running]))))
    parts = [xi, mini, mstep, minf]
    if style.q_r is not None:
        if style.q_r not in m.states:
            raise ValueError(f"q_r {style.q_r!r} is not a state")
        parts.append(recurrence_formula(m, style.q_r))
    return conj(parts)


def recurrence_formula(m, q_r):
    return BoxH(DiaH(DiaV(And(D, state_formula(q_r, m.states)))))


def encoding(m, style):
    """grid & machine formula, the formula whose satisfiability mirrors the machine problem."""
    if not isinstance(style, EncodingStyle):
        style = EncodingStyle(style)
    return And(grid_formula(style), machine_formula(m, style))


# ---------------------------------------------------------------- tick trick

def tick_box(f):
    t = Var(TICK)
    return And(Implies(t, BoxH(Implies(Not(t), f))), Implies(Not(t), BoxH(Implies(t, f))))


def tick_axiom():
    t = Var(TICK)
    return BoxH(And(Iff(t, BoxV(t)), Iff(Not(t), BoxV(Not(t)))))


def tick_transform(f):
    """Replace every horizontal box by its tick-guarded version; also return the tick axiom."""
    if TICK in variables(f):
        raise ValueError("formula already uses the tick variable")
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, BoxH):
            out = tick_box(go(g.child))
        elif isinstance(g, DiaH):
            out = Not(tick_box(Not(go(g.child))))
        elif isinstance(g, BoxHPlus):
            c = go(g.child)
            out = And(c, tick_box(c))
        elif isinstance(g, DiaHPlus):
            c = go(g.child)
            out = Or(c, Not(tick_box(Not(c))))
        elif isinstance(g, (Var, Diag, Bottom)):
            out = g
        else:
            out = type(g)(*[go(c) for c in g.children()])
        memo[g] = out
        return out

    return go(f), tick_axiom()


# ---------------------------------------------------------------- global reduction

def univ_delta():
    return conj([BoxH(DiaV(D)), BoxH(BoxH(DiaV(D))), BoxV(DiaH(D)), BoxV(BoxV(DiaH(D)))])


def global_reduction(phi, psi, variant="plain", fresh=FRESH_P):
    """A formula valid in the delta-product class iff psi globally follows from phi."""
    if uses_diag(phi) or uses_diag(psi):
        raise ValueError("global reduction needs diag-free formulas")
    if variant == "plain":
        return Implies(And(univ_delta(), BoxH(BoxV(phi))), BoxH(BoxV(psi)))
    if variant == "reflexive":
        if fresh in variables(phi) | variables(psi):
            raise ValueError(f"variable {fresh} is not fresh")
        P = Var(fresh)
        return Implies(conj([univ_delta(), BoxH(P), BoxV(P), BoxH(BoxV(Implies(Not(P), phi)))]),
                       BoxH(BoxV(Implies(Not(P), psi))))
    raise ValueError(f"unknown variant {variant!r}")
