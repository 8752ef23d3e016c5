"""Models built from reliable runs, and faulty runs read back off satisfying models."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import formula as F
from .counter_machine import (IERR, LOSSY, RELIABLE, Config, Run, first_invalid_step, run_reliable)
from .encodings import (FINITARY, FORWARD, LINEAR, PFRESH, STOP, Ce, Cl, EncodingStyle, Ine, Inl, Oute, Outl,
                        S, counting_formula, do_formula, encoding, grid_formula, machine_formula, state_formula)
from .frames import Frame, delta_product, disjoint_union_with_spy, linear_order, make_fan, make_spy_chain, sort_worlds
from .semantics import Evaluator, Model


class BuildError(ValueError):
    pass


class ExtractionError(ValueError):
    def __init__(self, msg, step=None):
        super().__init__(msg if step is None else f"step {step}: {msg}")
        self.step = step


# ---------------------------------------------------------------- valuations

@dataclass
class FaultyValuations:
    style: str
    steps: int
    counters: int
    # sets[name][n][i]; Forward names: "Cl", "Ce"; Linear: "Inl", "Outl", "Ine", "Oute"
    sets: dict
    lambdas: list   # per counter, ascending steps k with alpha_{k+1} = dec i
    xis: list       # per counter, ascending steps k with alpha_{k+1} = inc i

    def get(self, name, n, i):
        return self.sets[name][n][i]

    def delta(self, flavor, n, i):
        """Linear counter representation In - Out."""
        if flavor == LOSSY:
            return self.get("Inl", n, i) - self.get("Outl", n, i)
        return self.get("Ine", n, i) - self.get("Oute", n, i)


def _enumerations(tau, N):
    lambdas = [[k for k, (op, _) in enumerate(tau) if op.kind == "dec" and op.counter == i] for i in range(N)]
    xis = [[k for k, (op, _) in enumerate(tau) if op.kind == "inc" and op.counter == i] for i in range(N)]
    return lambdas, xis


def _fresh_min(s):
    n = 0
    while n in s:
        n += 1
    return n


def _ierr_insert(tau, n, i, lambdas, xis, cur):
    """Point added to the insertion-error set at an increment of counter i at step n."""
    m = xis[i].index(n)
    if m < len(lambdas[i]):
        return lambdas[i][m]
    return _fresh_min(cur)


def build_faulty_valuations(m, tau, reliable, style=FORWARD):
    tau = list(tau)
    if reliable is None or run_reliable(m, tau) != reliable.with_flavor(RELIABLE):
        raise BuildError("tau has no reliable run matching the given run")
    N = m.counters
    B = len(tau)
    lambdas, xis = _enumerations(tau, N)
    for i in range(N):
        for lam, xi in zip(lambdas[i], xis[i]):
            if not lam > xi:
                raise BuildError(f"decrement at {lam} precedes its increment at {xi}")
    empty = tuple(frozenset() for _ in range(N))
    if style == FORWARD:
        names = ("Cl", "Ce")
    elif style == LINEAR:
        names = ("Inl", "Outl", "Ine", "Oute")
    else:
        raise ValueError(f"unsupported style {style!r}")
    sets = {k: [empty] for k in names}
    for n, (op, _) in enumerate(tau):
        for k in names:
            sets[k].append(list(sets[k][n]))
        i = op.counter
        if style == FORWARD:
            lo, hi = sets["Cl"][n][i], sets["Ce"][n][i]
            if op.kind == "inc":
                sets["Cl"][n + 1][i] = lo | {n}
                sets["Ce"][n + 1][i] = hi | {_ierr_insert(tau, n, i, lambdas, xis, hi)}
            elif op.kind == "dec":
                sets["Cl"][n + 1][i] = lo - {min(lo)}
                sets["Ce"][n + 1][i] = hi - {n}
        else:
            inl, outl, ine, oute = (sets[k][n][i] for k in names)
            if op.kind == "inc":
                sets["Inl"][n + 1][i] = inl | {n}
                sets["Ine"][n + 1][i] = ine | {_ierr_insert(tau, n, i, lambdas, xis, ine)}
            elif op.kind == "dec":
                sets["Outl"][n + 1][i] = outl | {min(inl - outl)}
                sets["Oute"][n + 1][i] = oute | {n}
        for k in names:
            sets[k][n + 1] = tuple(frozenset(s) for s in sets[k][n + 1])
    fv = FaultyValuations(style, B, N, sets, lambdas, xis)
    _check_valuations(fv, tau, reliable)
    return fv


def _check_valuations(fv, tau, reliable):
    for n in range(fv.steps + 1):
        c = reliable.configs[n].counters
        for i in range(fv.counters):
            if fv.style == FORWARD:
                sizes = (len(fv.get("Cl", n, i)), len(fv.get("Ce", n, i)))
            else:
                sizes = (len(fv.delta(LOSSY, n, i)), len(fv.delta(IERR, n, i)))
            if sizes != (c[i], c[i]):
                raise BuildError(f"counter {i} at step {n}: set sizes {sizes} != {c[i]}")
    for n, (op, _) in enumerate(tau):
        if op.kind == "dec":
            held = fv.get("Ce", n, op.counter) if fv.style == FORWARD else fv.get("Ine", n, op.counter)
            if n not in held:
                raise BuildError(f"decrement at step {n + 1} finds {n} missing from the insertion-error set")


# ---------------------------------------------------------------- finitary model

def _enabled(op, counters):
    if op.kind == "dec":
        return counters[op.counter] > 0
    if op.kind == "test":
        return counters[op.counter] == 0
    return True


JUNK_OFFSET = 2


def build_grid_model(m, tau, reliable, junk_instr=None, fv=None):
    """Valuation over (spy chain on columns 0..k) x (fan on rows 0..k).

    Returns (model, designated world, column list).  ``junk_instr`` adds an extra
    horizontal successor of the last column that discharges its step obligation.
    """
    tau = list(tau)
    k = len(tau)
    if fv is None:
        fv = build_faulty_valuations(m, tau, reliable, FORWARD)
    spy = k + 1
    hframe = make_spy_chain(k + 1)
    rows = list(range(k + 1))
    fh = hframe
    junk = None
    if junk_instr is not None:
        junk = k + JUNK_OFFSET
        fh = Frame(list(hframe.worlds) + [junk], list(hframe.rel) + [(k, junk)])
    fv_frame = make_fan(k + 1)
    df = delta_product(fh, fv_frame)
    val = {}
    for q in m.states:
        val[S(q).name] = [(n, 0) for n in range(k + 1) if reliable.configs[n].state == q]
    for i in range(m.counters):
        val[Cl(i).name] = [(n, w) for n in range(k + 1) for w in fv.get("Cl", n, i)]
        val[Ce(i).name] = [(n, w) for n in range(k + 1) for w in fv.get("Ce", n, i)]
    val[PFRESH] = [(c, w) for c in range(k + 1) for w in rows if c > w]
    val[STOP] = [(k, w) for w in rows if w >= 1]
    if junk is not None:
        op, target = junk_instr
        val[S(target).name].append((junk, 0))
        for i in range(m.counters):
            val[Ce(i).name] += [(junk, w) for w in rows]
        val[PFRESH] += [(junk, w) for w in rows]
    return Model(df, val), (spy, 0), list(range(k + 1))


def build_finitary_model(m, tau, reliable, q_fin=None):
    """Self-verified finite model of the finitary encoding from a run ending in q_fin."""
    tau = list(tau)
    k = len(tau)
    if k < 1:
        raise BuildError("need at least one step")
    last = reliable.configs[-1]
    if q_fin is None:
        q_fin = last.state
    if last.state != q_fin:
        raise BuildError(f"run ends in {last.state}, not in q_fin {q_fin}")
    junk_instr = None
    if q_fin not in m.halting:
        for ins in m.instructions(q_fin):
            if _enabled(ins[0], last.counters):
                junk_instr = ins
                break
        else:
            raise BuildError(f"no instruction at {q_fin} can be discharged at the last column")
    model, des, _ = build_grid_model(m, tau, reliable, junk_instr)
    style = EncodingStyle(FINITARY, q_fin=q_fin)
    ev = Evaluator(model)
    for part in F.flatten_and(encoding(m, style)):
        if not ev.check_at(des, part):
            raise BuildError(f"construction fails conjunct {F.render(part)[:200]}")
    return model, des


# ---------------------------------------------------------------- extraction

@dataclass
class ExtractedRuns:
    tau: list
    lossy: Run
    ierr: Run
    columns: list
    onsets_lossy: list      # [n][i] -> frozenset of rows
    onsets_ierr: list
    ambiguities: list = field(default_factory=list)


def discover_columns(model, designated, max_steps=10_000, ev=None):
    """Follow the unique diagonal witnesses from the designated world's column."""
    ev = ev or Evaluator(model)
    df = model.frame
    x0 = designated[1]
    vsucc = {}
    for (a, b) in df.rv:
        if a[0] == designated[0]:
            vsucc.setdefault(a[1], set()).add(b[1])
    witness = F.And(F.DiaH(F.Diag()), F.BoxH(F.Diag()))
    stopping = F.DiaV(F.Var(STOP))
    cols = [x0]
    while len(cols) <= max_steps:
        x = cols[-1]
        if (x, x0) in ev.index and ev.check_at((x, x0), stopping):
            break
        nxt = [w for w in sort_worlds(vsucc.get(x0, ())) if (x, w) in ev.index and ev.check_at((x, w), witness)]
        if not nxt:
            raise ExtractionError("no grid successor column", step=len(cols))
        cols.append(nxt[0])
    return cols


def _reach_plus(df, h, x0):
    out = {x0}
    for a, b in df.rv:
        if a == (h, x0):
            out.add(b[1])
    return out


def extract_runs(model, m, designated, columns=None, style=FINITARY, q_fin=None, check=True):
    """Read tau and a lossy/insertion-error run pair off a model of the encoding."""
    ev = Evaluator(model)
    if check and style == FINITARY:
        if q_fin is None:
            raise ValueError("finitary extraction needs q_fin")
        if not ev.check_at(designated, encoding(m, EncodingStyle(FINITARY, q_fin=q_fin))):
            raise ExtractionError("model does not satisfy the encoding at the designated world")
    if columns is None:
        columns = discover_columns(model, designated, ev=ev)
    x0 = columns[0]
    if style == LINEAR:
        return _extract_linear(model, m, columns, ev)
    rows = sort_worlds(_reach_plus(model.frame, columns[0], x0) | {x0})
    N = m.counters

    def onset(var, x):
        return frozenset(w for w in rows if (x, w) in ev.index and ev.check_at((x, w), var))

    def state_at(x, y):
        found = [q for q in m.states if ev.check_at((x, y), state_formula(q, m.states))]
        return found[0] if len(found) == 1 else None

    B = len(columns) - 1
    on_l = [[onset(Cl(i), x) for i in range(N)] for x in columns]
    on_e = [[onset(Ce(i), x) for i in range(N)] for x in columns]
    states = [state_at(x, x0) for x in columns]
    if states[0] != m.init:
        raise ExtractionError(f"column 0 is in state {states[0]}, not {m.init}", step=0)
    tau, amb = [], []
    for n in range(B):
        q = states[n]
        if q is None or q in m.halting:
            raise ExtractionError(f"column {n} has no running state", step=n + 1)
        cands = []
        for op, t in m.instructions(q):
            f = F.conj([F.BoxH(state_formula(t, m.states)), do_formula(op, "lossy", FORWARD, N),
                        do_formula(op, "ierr", FORWARD, N)])
            if ev.check_at((columns[n], x0), f):
                cands.append((op, t))
        if not cands:
            raise ExtractionError(f"no instruction disjunct holds at column {n}", step=n + 1)
        if len(cands) > 1:
            amb.append((n + 1, cands))
        ins = cands[0]
        if states[n + 1] != ins[1]:
            raise ExtractionError(f"column {n + 1} is not in state {ins[1]}", step=n + 1)
        tau.append(ins)
    lossy = Run(LOSSY, [Config(states[n], tuple(len(s) for s in on_l[n])) for n in range(B + 1)])
    ierr = Run(IERR, [Config(states[n], tuple(len(s) for s in on_e[n])) for n in range(B + 1)])
    for run in (lossy, ierr):
        bad = first_invalid_step(run.flavor, m, tau, run)
        if bad is not None:
            raise ExtractionError(f"extracted {run.flavor} run is invalid", step=bad)
    return ExtractedRuns(tau, lossy, ierr, columns, on_l, on_e, amb)


def _extract_linear(model, m, columns, ev):
    x0 = columns[0]
    rows = sort_worlds(_reach_plus(model.frame, columns[0], x0) | {x0})
    N = m.counters

    def dset(inn, out, x):
        return frozenset(w for w in rows if ev.check_at((x, w), F.And(inn, F.Not(out))))

    def state_at(x):
        found = [q for q in m.states if ev.check_at((x, x), state_formula(q, m.states))]
        return found[0] if len(found) == 1 else None

    B = len(columns) - 1
    dl = [[dset(Inl(i), Outl(i), x) for i in range(N)] for x in columns]
    de = [[dset(Ine(i), Oute(i), x) for i in range(N)] for x in columns]
    states = [state_at(x) for x in columns]
    nextcol = F.And(F.DiaH(F.Diag()), F.BoxH(F.BoxH(F.Not(F.Diag()))))
    tau, amb = [], []
    for n in range(B):
        q = states[n]
        if q is None or q in m.halting:
            raise ExtractionError(f"column {n} has no running state", step=n + 1)
        cands = []
        for op, t in m.instructions(q):
            f = F.conj([do_formula(op, "lossy", LINEAR, N), do_formula(op, "ierr", LINEAR, N),
                        F.BoxVPlus(F.Implies(nextcol, F.BoxH(F.Implies(F.Diag(), state_formula(t, m.states)))))])
            if ev.check_at((columns[n], x0), f):
                cands.append((op, t))
        if not cands:
            raise ExtractionError(f"no instruction disjunct holds at column {n}", step=n + 1)
        if len(cands) > 1:
            amb.append((n + 1, cands))
        tau.append(cands[0])
    lossy = Run(LOSSY, [Config(states[n], tuple(len(s) for s in dl[n])) for n in range(B + 1)])
    ierr = Run(IERR, [Config(states[n], tuple(len(s) for s in de[n])) for n in range(B + 1)])
    for run in (lossy, ierr):
        bad = first_invalid_step(run.flavor, m, tau, run)
        if bad is not None:
            raise ExtractionError(f"extracted {run.flavor} run is invalid", step=bad)
    return ExtractedRuns(tau, lossy, ierr, list(columns), dl, de, amb)


# ---------------------------------------------------------------- linear truncation

def build_linear_model(m, tau, reliable, fv=None):
    """Finite truncation: <{0..B}, <> times a fan on rows 0..B+1.

    Row B+1 stands for the rows never touched by the valuation.  Per-column
    checks of the step formulas are exact for columns 0..B-1.
    """
    tau = list(tau)
    B = len(tau)
    if fv is None:
        fv = build_faulty_valuations(m, tau, reliable, LINEAR)
    df = delta_product(linear_order(B + 1), make_fan(B + 2))
    val = {S(q).name: [(n, n) for n in range(B + 1) if reliable.configs[n].state == q] for q in m.states}
    for name, var in (("Inl", Inl), ("Outl", Outl), ("Ine", Ine), ("Oute", Oute)):
        for i in range(m.counters):
            val[var(i).name] = [(n, w) for n in range(B + 1) for w in fv.get(name, n, i)]
    return Model(df, val), (0, 0), list(range(B + 1))


# ---------------------------------------------------------------- counting claims

def _claims(style):
    if style == FORWARD:
        return ("Cl", "Ce")
    return ("lin_l", "lin_e")


def check_counting_claims(model, columns, m, style=FORWARD, upto=None):
    """All six counting claims between consecutive columns; returns violations.

    Hypotheses are model-checked at <x_n, x_0>; conclusions are set assertions
    on the counter representations (OnSets for Forward, In-minus-Out for Linear).
    """
    ev = Evaluator(model)
    x0 = columns[0]
    rows = sort_worlds(_reach_plus(model.frame, columns[0], x0) | {x0})
    N = m.counters
    if style == FORWARD:
        rep_l = lambda i, x: frozenset(w for w in rows if ev.check_at((x, w), Cl(i)))
        rep_e = lambda i, x: frozenset(w for w in rows if ev.check_at((x, w), Ce(i)))
    else:
        rep_l = lambda i, x: frozenset(w for w in rows if ev.check_at((x, w), F.And(Inl(i), F.Not(Outl(i)))))
        rep_e = lambda i, x: frozenset(w for w in rows if ev.check_at((x, w), F.And(Ine(i), F.Not(Oute(i)))))
    last = len(columns) - 1 if upto is None else upto
    out = []
    fired = 0
    for n in range(last):
        x, y = columns[n], columns[n + 1]
        for i in range(N):
            a, b = rep_l(i, x), rep_l(i, y)
            ae, be = rep_e(i, x), rep_e(i, y)
            hyp = lambda kind, flavor: ev.check_at((x, x0), counting_formula(kind, i, flavor, style))
            if hyp("fix", "lossy"):
                fired += 1
                if not b <= a:
                    out.append((n, i, "i"))
            if hyp("inc", "lossy"):
                fired += 1
                if not b <= a | {x}:
                    out.append((n, i, "ii"))
            if hyp("dec", "lossy"):
                fired += 1
                if not any(z in a and b <= a - {z} for z in rows):
                    out.append((n, i, "iii"))
            if hyp("fix", "ierr"):
                fired += 1
                if not be >= ae:
                    out.append((n, i, "iv"))
            if hyp("inc", "ierr"):
                fired += 1
                if not any(z not in ae and be >= ae | {z} for z in rows):
                    out.append((n, i, "v"))
            if hyp("dec", "ierr"):
                fired += 1
                if not be >= ae - {x}:
                    out.append((n, i, "vi"))
    return out, fired


def check_linear_valuation_claims(fv, tau):
    """The six linear counting claims at valuation level, hypotheses taken from tau."""
    out = []
    for n, (op, _) in enumerate(tau):
        for i in range(fv.counters):
            a, b = fv.delta(LOSSY, n, i), fv.delta(LOSSY, n + 1, i)
            ae, be = fv.delta(IERR, n, i), fv.delta(IERR, n + 1, i)
            kind = op.kind if op.counter == i else "fix"
            if kind == "fix":
                if not b <= a:
                    out.append((n, i, "i"))
                if not be >= ae:
                    out.append((n, i, "iv"))
            elif kind == "inc":
                if not b <= a | {n}:
                    out.append((n, i, "ii"))
                cands = (be - ae)
                if not (be >= ae and cands):
                    out.append((n, i, "v"))
            elif kind == "dec":
                if not any(b <= a - {z} for z in a):
                    out.append((n, i, "iii"))
                if not be >= ae - {n}:
                    out.append((n, i, "vi"))
    return out


# ---------------------------------------------------------------- global reduction

def spy_reduction_model(model, spy="r"):
    """Spy-point model over a shared universe from a product model (diag-free use).

    The horizontal component has one copy of F_h per vertical world and the
    vertical one copy of F_v per horizontal world; both universes are identified
    so that every non-spy world is diagonal.
    """
    if model.frame.factors is None:
        raise ValueError("needs a product model with its factors")
    fh, fvf = model.frame.factors
    wh, wv = list(fh.worlds), list(fvf.worlds)
    gh = disjoint_union_with_spy([fh] * len(wv), spy)
    gv = disjoint_union_with_spy([fvf] * len(wh), spy)
    hidx = {x: i for i, x in enumerate(wh)}
    vidx = {y: j for j, y in enumerate(wv)}

    def rename(u):
        if u == spy:
            return spy
        y, i = u
        return (wh[i], vidx[y])

    gv2 = Frame([rename(u) for u in gv.worlds], [(rename(a), rename(b)) for a, b in gv.rel])
    df = delta_product(gh, gv2)
    val = {}
    for name, ext in model.valuation.items():
        val[name] = [((x, a), (wh[b], vidx[y])) for (x, y) in ext for a in range(len(wv)) for b in range(len(wh))]
    return Model(df, val), (spy, spy)
