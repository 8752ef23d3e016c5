"""Truth, global truth, satisfiability and validity over finite delta-frames."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import formula as F
from .frames import DeltaFrame, delta_frame_from_json, delta_frame_to_json, sort_worlds, world_from_json, world_to_json


class BudgetExceeded(Exception):
    """Search stopped at its budget before reaching a verdict."""


@dataclass(frozen=True)
class Model:
    frame: DeltaFrame
    valuation: dict

    def __init__(self, frame, valuation=None):
        ws = set(frame.worlds)
        val = {}
        for name, ext in (valuation or {}).items():
            ext = frozenset(ext)
            if not ext <= ws:
                raise ValueError(f"valuation of {name} leaves the frame")
            val[name] = ext
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "valuation", val)

    def __hash__(self):
        return hash((self.frame, tuple(sorted((k, tuple(sorted(map(repr, v)))) for k, v in self.valuation.items()))))


class Evaluator:
    """Computes extensions as bitmasks over the frame's world order."""

    def __init__(self, model):
        self.model = model
        df = model.frame
        self.worlds = df.worlds
        self.index = {w: i for i, w in enumerate(df.worlds)}
        n = len(df.worlds)
        self.full = (1 << n) - 1
        self.hsucc = [0] * n
        self.vsucc = [0] * n
        for a, b in df.rh:
            self.hsucc[self.index[a]] |= 1 << self.index[b]
        for a, b in df.rv:
            self.vsucc[self.index[a]] |= 1 << self.index[b]
        self.diag = self._mask(df.diag)
        self.vals = {k: self._mask(v) for k, v in model.valuation.items()}
        self.memo = {}

    def _mask(self, ws):
        m = 0
        for w in ws:
            m |= 1 << self.index[w]
        return m

    def _box(self, succ, ext):
        out = 0
        bad = self.full & ~ext
        for i, s in enumerate(succ):
            if not (s & bad):
                out |= 1 << i
        return out

    def _dia(self, succ, ext):
        out = 0
        for i, s in enumerate(succ):
            if s & ext:
                out |= 1 << i
        return out

    def extension(self, f):
        for g in F.subformulas(f):
            if g not in self.memo:
                self.memo[g] = self._step(g)
        return self.memo[f]

    def _step(self, g):
        m = self.memo
        full = self.full
        if isinstance(g, F.Var):
            return self.vals.get(g.name, 0)
        if isinstance(g, F.Diag):
            return self.diag
        if isinstance(g, F.Bottom):
            return 0
        if isinstance(g, F.Not):
            return full & ~m[g.child]
        if isinstance(g, F.And):
            return m[g.left] & m[g.right]
        if isinstance(g, F.Or):
            return m[g.left] | m[g.right]
        if isinstance(g, F.Implies):
            return (full & ~m[g.left]) | m[g.right]
        if isinstance(g, F.Iff):
            return full & ~(m[g.left] ^ m[g.right])
        c = m[g.child]
        if isinstance(g, F.BoxH):
            return self._box(self.hsucc, c)
        if isinstance(g, F.BoxV):
            return self._box(self.vsucc, c)
        if isinstance(g, F.DiaH):
            return self._dia(self.hsucc, c)
        if isinstance(g, F.DiaV):
            return self._dia(self.vsucc, c)
        if isinstance(g, F.BoxHPlus):
            return c & self._box(self.hsucc, c)
        if isinstance(g, F.BoxVPlus):
            return c & self._box(self.vsucc, c)
        if isinstance(g, F.DiaHPlus):
            return c | self._dia(self.hsucc, c)
        if isinstance(g, F.DiaVPlus):
            return c | self._dia(self.vsucc, c)
        raise TypeError(f"unknown node {g!r}")

    def check_at(self, w, f):
        if w not in self.index:
            raise KeyError(f"unknown world {w!r}")
        return bool(self.extension(f) >> self.index[w] & 1)

    def truth_set(self, f):
        e = self.extension(f)
        return [w for i, w in enumerate(self.worlds) if e >> i & 1]


def check_at(m, w, f):
    return Evaluator(m).check_at(w, f)


def holds_globally(m, f):
    ev = Evaluator(m)
    return ev.extension(f) == ev.full


def truth_set(m, f):
    return Evaluator(m).truth_set(f)


# ---------------------------------------------------------------- valuation search

def _enumerate_witness(df, f, budget):
    names = sorted(F.variables(f))
    worlds = df.worlds
    nbits = len(names) * len(worlds)
    total = 1 << nbits
    limit = total if budget is None else min(total, budget)
    for code in range(limit):
        val = {}
        for k, name in enumerate(names):
            base = k * len(worlds)
            val[name] = [w for i, w in enumerate(worlds) if code >> (base + i) & 1]
        m = Model(df, val)
        ext = Evaluator(m).extension(f)
        if ext:
            i = (ext & -ext).bit_length() - 1
            return m, worlds[i]
    if limit < total:
        raise BudgetExceeded(f"valuation budget {budget} < search space {total}")
    return None


def _sat_witness(df, f):
    from .cnf import CNF, Structure

    cnf = CNF()
    worlds = df.worlds
    idx = {w: i for i, w in enumerate(worlds)}
    h = {w: [] for w in worlds}
    v = {w: [] for w in worlds}
    for a, b in df.rh:
        h[a].append((cnf.TRUE, b))
    for a, b in df.rv:
        v[a].append((cnf.TRUE, b))
    diag = {w: (cnf.TRUE if w in df.diag else cnf.FALSE) for w in worlds}
    names = sorted(F.variables(f))
    pv = {(n, w): cnf.new() for n in names for w in worlds}
    st = Structure(cnf, worlds, h, v, diag, lambda n, w: pv[(n, w)])
    g = F.expand_derived(f)
    roots = [st.lit(g, w) for w in worlds]
    cnf.add(roots)
    model = cnf.solve()
    if model is None:
        return None
    pos = set(l for l in model if l > 0)
    val = {n: [w for w in worlds if pv[(n, w)] in pos] for n in names}
    m = Model(df, val)
    ev = Evaluator(m)
    ext = ev.extension(f)
    assert ext, "solver witness failed to re-verify"
    i = (ext & -ext).bit_length() - 1
    return m, worlds[i]


def satisfiable_in_frame(df, f, budget=1 << 16, engine="enumerate"):
    """A (model, world) satisfying f over frame df, or None.

    ``engine='enumerate'`` walks valuations of f's variables in a fixed order and
    raises BudgetExceeded when more than ``budget`` valuations would be needed.
    ``engine='sat'`` is exact and complete with no budget.
    """
    if engine == "sat":
        return _sat_witness(df, f)
    if engine != "enumerate":
        raise ValueError(f"unknown engine {engine!r}")
    return _enumerate_witness(df, f, budget)


def valid_in_frame(df, f, budget=1 << 16, engine="enumerate"):
    return satisfiable_in_frame(df, F.Not(f), budget, engine) is None


# ---------------------------------------------------------------- JSON

def model_to_json(m, designated=None):
    out = delta_frame_to_json(m.frame)
    out["valuation"] = {k: [world_to_json(w) for w in sort_worlds(v)] for k, v in sorted(m.valuation.items())}
    if designated is not None:
        out["designated"] = world_to_json(designated)
    return out


def model_from_json(obj):
    df = delta_frame_from_json(obj)
    val = {k: [world_from_json(w) for w in v] for k, v in obj.get("valuation", {}).items()}
    des = world_from_json(obj["designated"]) if "designated" in obj else None
    return Model(df, val), des
