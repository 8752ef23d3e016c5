"""Satisfiability for the bounded-branching delta-product logics.

Three pieces: selective filtration of a given product model, a brute-force
oracle over all small rooted frames, and a SAT-backed search whose shape
mirrors the filtration (layered worlds, bounded by the filtration sizes).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations, permutations

from . import formula as F
from .cnf import CNF, Structure
from .frames import Frame, delta_product, diag_uniqueness, frame_properties, generated_subframe, sort_worlds
from .semantics import Evaluator, Model, check_at

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


# ---------------------------------------------------------------- logics

@dataclass(frozen=True)
class LogicSpec:
    horizontal: str = "K"     # "K", "Alt" or "S5"
    m: int | None = None      # horizontal branching for Alt
    n: int = 1                # vertical branching
    h_serial: bool = False
    v_serial: bool = False

    def __post_init__(self):
        if self.horizontal not in ("K", "Alt", "S5"):
            raise ValueError(f"unknown horizontal logic {self.horizontal!r}")
        if self.horizontal == "Alt" and (self.m is None or self.m < 1):
            raise ValueError("Alt needs m >= 1")
        if self.n < 1:
            raise ValueError("Alt needs n >= 1")

    def __str__(self):
        if self.horizontal == "Alt":
            h = f"{'D' if self.h_serial else ''}Alt:{self.m}"
        else:
            h = ("D" if self.h_serial and self.horizontal == "K" else "") + self.horizontal
        return f"{h}x{'D' if self.v_serial else ''}Alt:{self.n}"

    def h_ok(self, frame):
        p = frame_properties(frame, alt_ns=(self.m or 1,))
        if self.horizontal == "S5":
            return p.universal
        if self.h_serial and not p.serial:
            return False
        return self.horizontal == "K" or p.alt[self.m]

    def v_ok(self, frame):
        p = frame_properties(frame, alt_ns=(self.n,))
        return p.alt[self.n] and (p.serial or not self.v_serial)


_COMP = re.compile(r"(D?)(K|S5|Alt:(\d+))\Z")


def parse_logic(text):
    """'KxAlt:1', 'Alt:2xDAlt:1', 'S5xAlt:1', 'DKxAlt:2' ..."""
    parts = text.split("x")
    if len(parts) != 2:
        raise ValueError(f"bad logic {text!r}")
    mh, mv = _COMP.match(parts[0]), _COMP.match(parts[1])
    if not mh or not mv or not mv.group(3):
        raise ValueError(f"bad logic {text!r}")
    hname = mh.group(2)
    if hname.startswith("Alt"):
        return LogicSpec("Alt", int(mh.group(3)), int(mv.group(3)), bool(mh.group(1)), bool(mv.group(1)))
    if hname == "S5" and mh.group(1):
        raise ValueError("S5 is already serial")
    return LogicSpec(hname, None, int(mv.group(3)), bool(mh.group(1)), bool(mv.group(1)))


# ---------------------------------------------------------------- results

@dataclass
class SatResult:
    outcome: str
    model: Model | None = None
    world: object = None
    bounds: object = None
    exhaustive: bool = False
    info: dict = field(default_factory=dict)

    @property
    def is_sat(self):
        return self.outcome == SAT


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class FiltrationBounds:
    hd: int
    vd: int
    sub: int
    n: int
    vertical_layers: tuple        # 1 + n + ... + n^k for k <= vd
    vertical_layers_loose: tuple  # 1 + k * n^k
    vertical_bound: int           # bound on |W_v'|
    literal_horizontal_layers: tuple  # (vd * n^vd * |sub|)^m, uncorrected
    horizontal_layers: tuple      # ((1 + vd * n^vd) * |sub|)^m
    horizontal_bound: int
    literal_horizontal_bound: int
    search_layers: tuple          # depth-budgeted layer sizes used by decide_sat
    search_vertical_layers: tuple


def _box_h_depths(e):
    d = F.depths(e)
    return sorted(d[g][0] for g in F.subformulas(e) if isinstance(g, F.BoxH))


def filtration_bounds(f, spec=None):
    spec = spec or LogicSpec()
    e = F.expand_derived(f)
    met = F.metrics(f)
    hd, vd, s, n = met.horizontal_depth, met.vertical_depth, met.subformula_count, spec.n
    vl = tuple(sum(n ** j for j in range(k + 1)) for k in range(vd + 1))
    vloose = tuple(1 + k * n ** k for k in range(vd + 1))
    V = vl[-1]
    literal = tuple((vd * n ** vd * s) ** m for m in range(hd + 1))
    corr = tuple(((1 + vd * n ** vd) * s) ** m for m in range(hd + 1))
    boxes = _box_h_depths(e)
    search_v = tuple(n ** k for k in range(vd + 1))
    if spec.horizontal == "S5":
        layers = (1, V * len(boxes)) if boxes else (1,)
    else:
        layers = [1]
        for m in range(hd):
            b = sum(1 for dd in boxes if dd <= hd - m)
            width = V * b
            if spec.h_serial:
                width = max(width, 1)
            if spec.horizontal == "Alt":
                width = min(width, spec.m)
            layers.append(layers[-1] * width)
        layers = tuple(layers)
    return FiltrationBounds(hd, vd, s, n, vl, vloose, V, literal, corr, sum(corr), sum(literal), layers, search_v)


# ---------------------------------------------------------------- selective filtration

@dataclass
class FiltrationResult:
    model: Model
    root: tuple
    v_layers: list   # U_v^k
    h_layers: list   # U_h^m
    witnesses: dict  # x -> successors kept


def filtrate(m, root, f, prune=False, serial_h=False, serial_v=False):
    """Selective filtration of a product model around ``root`` for ``f``.

    With ``prune`` a world first met at layer j only receives witnesses for
    boxes of horizontal depth at most hd - j (a tighter, still truth-preserving
    variant).  The serial flags add one successor to witness-free worlds and
    make final points reflexive.
    """
    if m.frame.factors is None:
        raise ValueError("selective filtration needs a product model with its factors")
    fh, fv = m.frame.factors
    rh, rv = root
    e = F.expand_derived(f)
    dep = F.depths(e)
    hd, vd = dep[e]
    boxes = sorted((g for g in F.subformulas(e) if isinstance(g, F.BoxH)),
                   key=lambda g: (dep[g][0], F.size(g), F.render(g)))
    ev = Evaluator(m)
    vsucc = fv.succ_map()
    hsucc = fh.succ_map()

    v_layers = [[rv]]
    for k in range(vd):
        nxt = sort_worlds({z for y in v_layers[-1] for z in vsucc[y]})
        v_layers.append(list(nxt))
    wv = sort_worlds({y for layer in v_layers for y in layer})

    first = {rh: 0}
    chosen = {}
    witnesses = {}
    selected = {rh}

    def pick(x, y, chi):
        key = (x, y, chi)
        if key not in chosen:
            cands = [z for z in hsucc[x] if not ev.check_at((z, y), chi)]
            old = [z for z in cands if z in selected]
            chosen[key] = (old or cands)[0]
        return chosen[key]

    h_layers = [[rh]]
    for layer in range(hd):
        nxt = set()
        for x in h_layers[-1]:
            if x not in witnesses:
                budget = hd - first[x] if prune else hd
                ws = []
                for y in wv:
                    for g in boxes:
                        if dep[g][0] <= budget and not ev.check_at((x, y), g):
                            z = pick(x, y, g.child)
                            if z not in ws:
                                ws.append(z)
                            selected.add(z)
                if serial_h and not ws and hsucc[x]:
                    ws.append(hsucc[x][0])
                    selected.add(hsucc[x][0])
                witnesses[x] = ws
            for z in witnesses[x]:
                nxt.add(z)
                first.setdefault(z, layer + 1)
        h_layers.append(list(sort_worlds(nxt)))
    wh = sort_worlds({x for layer in h_layers for x in layer})
    rel_h = {(x, z) for x, ws in witnesses.items() for z in ws}
    wvs = set(wv)
    rel_v = {(a, b) for a, b in fv.rel if a in wvs and b in wvs}
    if serial_h:
        rel_h |= {(x, x) for x in wh if not any(a == x for a, _ in rel_h)}
    if serial_v:
        rel_v |= {(y, y) for y in wv if not any(a == y for a, _ in rel_v)}
    df = delta_product(Frame(wh, rel_h), Frame(wv, rel_v))
    keep = set(df.worlds)
    val = {k: [w for w in ext if w in keep] for k, ext in m.valuation.items()}
    return FiltrationResult(Model(df, val), root, v_layers, h_layers, witnesses)


def selective_filtrate(m, root, f, **kw):
    return filtrate(m, root, f, **kw).model


# ---------------------------------------------------------------- frame enumeration

def _relations(k, pred):
    pairs = [(a, b) for a in range(k) for b in range(k)]
    for bits in range(1 << len(pairs)):
        rel = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        if pred(k, rel):
            yield rel


def _rooted(k, rel):
    succ = [[] for _ in range(k)]
    for a, b in rel:
        succ[a].append(b)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == k


def _deg_ok(k, rel, bound, serial):
    deg = [0] * k
    for a, _ in rel:
        deg[a] += 1
    return all(d <= bound for d in deg) and (not serial or all(d >= 1 for d in deg))


def h_frames(spec, k):
    """Rooted horizontal frames on {0..k-1} within the logic class, in lexicographic bitset order."""
    if spec.horizontal == "S5":
        yield [(a, b) for a in range(k) for b in range(k)]
        return
    bound = spec.m if spec.horizontal == "Alt" else k
    yield from _relations(k, lambda kk, r: _deg_ok(kk, r, bound, spec.h_serial) and _rooted(kk, r))


def v_frames(spec, k):
    yield from _relations(k, lambda kk, r: _deg_ok(kk, r, spec.n, spec.v_serial) and _rooted(kk, r))


def partial_injections(a, b, policy="all"):
    """Matchings between horizontal {0..a-1} and vertical {0..b-1} worlds."""
    if policy == "none":
        yield ()
        return
    if policy == "prefix":
        for o in range(min(a, b) + 1):
            yield tuple((i, i) for i in range(o))
        return
    for o in range(min(a, b) + 1):
        for hs in combinations(range(a), o):
            for vs in permutations(range(b), o):
                yield tuple(zip(hs, vs))


def product_frame(a, hrel, b, vrel, match):
    """Delta-product with horizontal ids 0..a-1 and vertical ids shared per ``match``."""
    vid = {j: a + j for j in range(b)}
    for i, j in match:
        vid[j] = i
    fh = Frame(range(a), hrel)
    fv = Frame([vid[j] for j in range(b)], [(vid[x], vid[y]) for x, y in vrel])
    return delta_product(fh, fv), (0, vid[0])


def vertical_candidates(spec, vcap):
    return [(b, tuple(vrel)) for b in range(1, vcap + 1) for vrel in v_frames(spec, b)]


def keyed_family(spec, caps, policy="all", vpart=None):
    """(order key, delta-frame, root) triples; ``vpart`` restricts to one vertical candidate."""
    hcap, vcap = caps
    vcands = vertical_candidates(spec, vcap)
    for a in range(1, hcap + 1):
        hs = list(h_frames(spec, a))
        for vi, (b, vrel) in enumerate(vcands):
            if vpart is not None and vi != vpart:
                continue
            matches = list(partial_injections(a, b, policy))
            for hi, hrel in enumerate(hs):
                for mi, match in enumerate(matches):
                    df, root = product_frame(a, hrel, b, vrel, match)
                    yield (a, vi, hi, mi), df, root


def frame_family(spec, caps, policy="all"):
    """All (delta-frame, root) pairs of the brute-force search, in deterministic order."""
    for _, df, root in keyed_family(spec, caps, policy):
        yield df, root


# ---------------------------------------------------------------- bit-parallel valuation sweep

BITPARALLEL_LIMIT = 20


def _bit_patterns(nbits):
    """pat[b] has bit v set iff bit b of the valuation code v is set."""
    total = 1 << nbits
    out = []
    for b in range(nbits):
        block = 1 << b
        unit = ((1 << block) - 1) << block
        pat, size = unit, 2 * block
        while size < total:
            pat |= pat << size
            size *= 2
        out.append(pat)
    return out


class _Sweep:
    """Truth masks over all valuations of ``names`` on one frame, at every world."""

    def __init__(self, df, names):
        self.worlds = df.worlds
        self.idx = {w: i for i, w in enumerate(df.worlds)}
        n = len(df.worlds)
        self.names = names
        self.nbits = n * len(names)
        self.full = (1 << (1 << self.nbits)) - 1
        pats = _bit_patterns(self.nbits)
        self.var = {name: [pats[k * n + i] for i in range(n)] for k, name in enumerate(names)}
        self.h = [[] for _ in range(n)]
        self.v = [[] for _ in range(n)]
        for a, b in df.rh:
            self.h[self.idx[a]].append(self.idx[b])
        for a, b in df.rv:
            self.v[self.idx[a]].append(self.idx[b])
        self.diag = [self.full if w in df.diag else 0 for w in df.worlds]
        self.memo = {}

    def masks(self, g):
        """Per-world masks of primitive formula g."""
        if g in self.memo:
            return self.memo[g]
        full = self.full
        if isinstance(g, F.Var):
            out = self.var[g.name]
        elif isinstance(g, F.Diag):
            out = self.diag
        elif isinstance(g, F.Bottom):
            out = [0] * len(self.worlds)
        elif isinstance(g, F.Not):
            out = [full ^ x for x in self.masks(g.child)]
        elif isinstance(g, F.And):
            out = [x & y for x, y in zip(self.masks(g.left), self.masks(g.right))]
        else:
            c = self.masks(g.child)
            succ = self.h if isinstance(g, F.BoxH) else self.v
            out = []
            for s in succ:
                x = full
                for t in s:
                    x &= c[t]
                out.append(x)
        self.memo[g] = out
        return out

    def decode(self, code):
        n = len(self.worlds)
        return {name: [self.worlds[i] for i in range(n) if code >> (k * n + i) & 1]
                for k, name in enumerate(self.names)}


def _first_code(mask):
    return (mask & -mask).bit_length() - 1


def brute_force_sat_many(formulas, spec=None, caps=(3, 3), policy="all", frames=None,
                         valuation_engine="auto", max_frames=None, jobs=1):
    """Brute-force satisfiability of several formulas at once (shared frame sweep).

    A formula is Sat when some frame of the family with some valuation makes it
    true at the frame's root; the first witness in enumeration order is kept.
    ``frames`` may supply an explicit iterable of (delta-frame, root) pairs.
    With ``jobs > 1`` the family is split by vertical frame across processes.
    """
    spec = spec or LogicSpec()
    if jobs > 1 and frames is None and max_frames is None:
        return _parallel(formulas, spec, caps, policy, valuation_engine, jobs)
    if frames is not None:
        family = ((i, df, root) for i, (df, root) in enumerate(frames))
    else:
        family = keyed_family(spec, caps, policy)
    return _sweep(formulas, family, valuation_engine, max_frames, caps)


def _sweep(formulas, family, valuation_engine="auto", max_frames=None, caps=None):
    prims = [F.expand_derived(f) for f in formulas]
    names = sorted(set().union(*[F.variables(p) for p in prims])) if prims else []
    results = [None] * len(prims)
    open_ = list(range(len(prims)))
    count = 0
    for key, df, root in family:
        if not open_:
            break
        count += 1
        if max_frames is not None and count > max_frames:
            for i in open_:
                results[i] = SatResult(UNKNOWN, info={"frames": count - 1, "reason": "frame budget"})
            return results
        nbits = len(df.worlds) * len(names)
        engine = valuation_engine
        if engine == "auto":
            engine = "enumerate" if nbits <= BITPARALLEL_LIMIT else "sat"
        still = []
        if engine == "enumerate":
            sw = _Sweep(df, names)
            r = sw.idx[root]
            for i in open_:
                mask = sw.masks(prims[i])[r]
                if mask:
                    val = sw.decode(_first_code(mask))
                    results[i] = SatResult(SAT, Model(df, val), root, info={"frames": count, "key": key})
                else:
                    still.append(i)
        else:
            for i in open_:
                hit = _sat_at_root(df, root, prims[i])
                if hit is not None:
                    results[i] = SatResult(SAT, hit, root, info={"frames": count, "key": key})
                else:
                    still.append(i)
        open_ = still
    for i in open_:
        results[i] = SatResult(UNSAT, bounds={"caps": caps}, exhaustive=False, info={"frames": count})
    return results


def _partition_job(args):
    formulas, spec, caps, policy, engine, vpart = args
    return _sweep(formulas, keyed_family(spec, caps, policy, vpart), engine, None, caps)


def _parallel(formulas, spec, caps, policy, engine, jobs):
    from concurrent.futures import ProcessPoolExecutor

    parts = range(len(vertical_candidates(spec, caps[1])))
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        per = list(ex.map(_partition_job, [(formulas, spec, caps, policy, engine, v) for v in parts]))
    out = []
    for i in range(len(formulas)):
        hits = [p[i] for p in per if p[i].outcome == SAT]
        frames = sum(p[i].info["frames"] for p in per)
        if hits:
            best = min(hits, key=lambda r: r.info["key"])
            best.info["frames"] = frames
            out.append(best)
        else:
            out.append(SatResult(UNSAT, bounds={"caps": caps}, exhaustive=False, info={"frames": frames}))
    return out


def _sat_at_root(df, root, prim):
    cnf = CNF()
    ws = df.worlds
    h = {w: [] for w in ws}
    v = {w: [] for w in ws}
    for a, b in df.rh:
        h[a].append((cnf.TRUE, b))
    for a, b in df.rv:
        v[a].append((cnf.TRUE, b))
    diag = {w: cnf.TRUE if w in df.diag else cnf.FALSE for w in ws}
    names = sorted(F.variables(prim))
    pv = {(nm, w): cnf.new() for nm in names for w in ws}
    st = Structure(cnf, ws, h, v, diag, lambda nm, w: pv[(nm, w)])
    cnf.add([st.lit(prim, root)])
    sol = cnf.solve()
    if sol is None:
        return None
    pos = {l for l in sol if l > 0}
    return Model(df, {nm: [w for w in ws if pv[(nm, w)] in pos] for nm in names})


def brute_force_sat(f, spec=None, caps=(3, 3), policy="all", frames=None, valuation_engine="auto",
                    max_frames=None, jobs=1):
    return brute_force_sat_many([f], spec, caps, policy, frames, valuation_engine, max_frames, jobs)[0]


# ---------------------------------------------------------------- SAT-backed decision

FEASIBILITY_LIMIT = 40_000   # product worlds in the exhaustive instance


def _layered_instance(prim, spec, hsizes, vsizes):
    """CNF whose models are layered delta-product models of ``prim`` at the root."""
    cnf = CNF()
    hl = [m for m, s in enumerate(hsizes) for _ in range(s)]
    vl = [k for k, s in enumerate(vsizes) for _ in range(s)]
    H, V = len(hl), len(vl)
    last_h, last_v = len(hsizes) - 1, len(vsizes) - 1
    T = cnf.TRUE

    redge = {}
    if spec.horizontal == "S5":
        for a in range(H):
            for b in range(H):
                redge[(a, b)] = T
    else:
        for a in range(H):
            if hl[a] == last_h and not spec.h_serial:
                continue
            for b in range(H):
                if hl[b] <= hl[a] + 1:
                    redge[(a, b)] = cnf.new()
    sedge = {}
    for c in range(V):
        if vl[c] == last_v and not spec.v_serial:
            continue
        for d in range(V):
            if vl[d] <= vl[c] + 1:
                sedge[(c, d)] = cnf.new()

    def out_h(a):
        return [redge[(a, b)] for b in range(H) if (a, b) in redge]

    def out_v(c):
        return [sedge[(c, d)] for d in range(V) if (c, d) in sedge]

    for a in range(H):
        if spec.horizontal == "Alt":
            cnf.atmost(out_h(a), spec.m)
        if spec.h_serial:
            cnf.atleast1(out_h(a))
    for c in range(V):
        cnf.atmost(out_v(c), spec.n)
        if spec.v_serial:
            cnf.atleast1(out_v(c))

    uses_diag = F.uses_diag(prim)
    ediag = {}
    if uses_diag:
        for a in range(H):
            for c in range(V):
                ediag[(a, c)] = cnf.new()
        for a in range(H):
            cnf.atmost([ediag[(a, c)] for c in range(V)], 1)
        for c in range(V):
            cnf.atmost([ediag[(a, c)] for a in range(H)], 1)
    worlds = [(a, c) for a in range(H) for c in range(V)]
    h_edges = {(a, c): [(redge[(a, b)], (b, c)) for b in range(H) if (a, b) in redge] for a, c in worlds}
    v_edges = {(a, c): [(sedge[(c, d)], (a, d)) for d in range(V) if (c, d) in sedge] for a, c in worlds}
    diag = {w: ediag.get(w, cnf.FALSE) for w in worlds}
    names = sorted(F.variables(prim))
    pv = {}

    def var(nm, w):
        if (nm, w) not in pv:
            pv[(nm, w)] = cnf.new()
        return pv[(nm, w)]

    st = Structure(cnf, worlds, h_edges, v_edges, diag, var)
    cnf.add([st.lit(prim, (0, 0))])
    return cnf, H, V, redge, sedge, ediag, pv


def _decode(sol, H, V, redge, sedge, ediag, pv):
    pos = {l for l in sol if l > 0}
    on = lambda lit: lit == 1 or lit in pos
    hrel = [(a, b) for (a, b), l in redge.items() if on(l)]
    vrel = [(c, d) for (c, d), l in sedge.items() if on(l)]
    fh = generated_subframe(Frame(range(H), hrel), 0)
    fv0 = generated_subframe(Frame(range(V), vrel), 0)
    hw = set(fh.worlds)
    vid = {}
    for c in fv0.worlds:
        match = [a for a in range(H) if (a, c) in ediag and ediag[(a, c)] in pos and a in hw]
        vid[c] = match[0] if match else f"v{c}"
    fv = Frame([vid[c] for c in fv0.worlds], [(vid[x], vid[y]) for x, y in fv0.rel])
    df = delta_product(fh, fv)
    val = {}
    for (nm, (a, c)), l in pv.items():
        if l in pos and a in hw and c in vid:
            val.setdefault(nm, []).append((a, vid[c]))
    return Model(df, val), (0, vid[0])


def verify_witness(model, world, f, spec):
    """Checks used on every Sat answer: truth, component classes, diagonal uniqueness."""
    fh, fv = model.frame.factors
    return (check_at(model, world, f) and spec.h_ok(fh) and spec.v_ok(fv)
            and diag_uniqueness(model.frame))


def _schedule(full):
    """Increasing per-layer caps ending with the full layer sizes."""
    top = max(full)
    caps, s = [], 1
    while s < top:
        caps.append(s)
        s *= 2
    caps.append(top)
    return caps


def decide_sat(f, spec=None, mode="exhaustive", budget=64, feasibility=FEASIBILITY_LIMIT):
    """Decide satisfiability of f in the delta-product logic ``spec``.

    Sat answers carry a verified witness.  In exhaustive mode an UNSAT answer is
    only given after the full filtration-shaped instance is refuted.  In budgeted
    mode the search stops once more than ``budget`` horizontal worlds would be
    needed and answers UNKNOWN.
    """
    spec = spec or LogicSpec()
    if mode not in ("exhaustive", "budgeted"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and spec.horizontal == "S5" and spec.n > 1:
        raise ValueError("S5 x Alt(n) for n > 1 is only supported in budgeted mode")
    prim = F.expand_derived(f)
    bounds = filtration_bounds(f, spec)
    hfull, vfull = list(bounds.search_layers), list(bounds.search_vertical_layers)
    if spec.horizontal == "S5":
        hfull = [sum(hfull)]
    caps = _schedule(hfull + vfull)
    tried = []
    for s in caps:
        if spec.horizontal == "S5":
            hs = [min(hfull[0], 1 + s)]
        else:
            hs = [1] + [min(t, s) for t in hfull[1:]]
        vs = [1] + [min(t, s) for t in vfull[1:]]
        H, V = sum(hs), sum(vs)
        if mode == "budgeted" and H > budget:
            return SatResult(UNKNOWN, bounds=bounds, info={"reason": "budget", "tried": tried})
        if H * V > feasibility:
            return SatResult(UNKNOWN, bounds=bounds, info={"reason": "feasibility limit", "tried": tried})
        inst = _layered_instance(prim, spec, hs, vs)
        sol = inst[0].solve()
        tried.append((tuple(hs), tuple(vs)))
        if sol is not None:
            model, world = _decode(sol, *inst[1:])
            if not verify_witness(model, world, f, spec):
                raise AssertionError("decoded witness failed verification")
            return SatResult(SAT, model, world, bounds, info={"shape": (tuple(hs), tuple(vs))})
    return SatResult(UNSAT, bounds=bounds, exhaustive=True, info={"tried": tried})


def decide_valid(f, spec=None, mode="exhaustive", **kw):
    """Validity via satisfiability of the negation; a Sat answer carries a countermodel."""
    return decide_sat(F.Not(f), spec, mode, **kw)


# ---------------------------------------------------------------- corpus

def formula_corpus(max_nodes, atoms=None, unary=(F.Not, F.BoxH, F.BoxV), binary=(F.And,)):
    """All formulas with at most ``max_nodes`` AST nodes, deduplicated, by size then text."""
    atoms = atoms if atoms is not None else [F.Var("P"), F.Diag()]
    by_size = {1: list(atoms)}
    for k in range(2, max_nodes + 1):
        out = [u(g) for u in unary for g in by_size[k - 1]]
        for b in binary:
            for i in range(1, k - 1):
                for x in by_size[i]:
                    for y in by_size[k - 1 - i]:
                        out.append(b(x, y))
        by_size[k] = out
    seen, corpus = set(), []
    for k in range(1, max_nodes + 1):
        for g in by_size[k]:
            if g not in seen:
                seen.add(g)
                corpus.append(g)
    return corpus
