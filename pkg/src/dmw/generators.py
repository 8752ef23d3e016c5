"""Seeded random formulas, frames, models and machines for the property tests."""

from __future__ import annotations

import random

from . import formula as F
from .counter_machine import CounterMachine, Op, run_reliable
from .frames import Frame, delta_product
from .semantics import Model


def rng_of(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_formula(rng, size=6, variables=("P",), diag=True, hd=2, vd=2,
                   unary=(F.Not, F.BoxH, F.BoxV, F.DiaH, F.DiaV), binary=(F.And, F.Or, F.Implies)):
    """A random formula with about ``size`` nodes and modal depths within (hd, vd)."""
    rng = rng_of(rng)
    atoms = [F.Var(v) for v in variables] + ([F.Diag()] if diag else [])

    def go(k, h, v):
        if k <= 1:
            return rng.choice(atoms)
        ops = [u for u in unary if not (u in F.HORIZONTAL and h == 0) and not (u in F.VERTICAL and v == 0)]
        if k >= 3 and binary and rng.random() < 0.5:
            b = rng.choice(binary)
            left = rng.randint(1, k - 2)
            return b(go(left, h, v), go(k - 1 - left, h, v))
        u = rng.choice(ops)
        return u(go(k - 1, h - (u in F.HORIZONTAL), v - (u in F.VERTICAL)))

    return go(size, hd, vd)


def random_frame(rng, k, max_degree=None, p=0.35, serial=False, rooted=True):
    """A random frame on 0..k-1; rooted frames reach every world from 0."""
    rng = rng_of(rng)
    succ = {w: set() for w in range(k)}
    if rooted:
        for w in range(1, k):
            succ[rng.randrange(w)].add(w)
    for a in range(k):
        for b in range(k):
            if rng.random() < p:
                succ[a].add(b)
    if max_degree is not None:
        for a in range(k):
            if len(succ[a]) > max_degree:
                # keep tree edges first so the frame stays rooted
                tree = [b for b in succ[a] if b > a and rooted]
                rest = [b for b in succ[a] if b not in tree]
                rng.shuffle(rest)
                succ[a] = set((tree + rest)[:max_degree]) if len(tree) <= max_degree else set(tree[:max_degree])
    if serial:
        for a in range(k):
            if not succ[a]:
                succ[a].add(a)
    return Frame(range(k), [(a, b) for a in range(k) for b in succ[a]])


def _alt_rooted(rng, k, n, serial=False):
    """A rooted Alt(n) frame on 0..k-1 (a random tree of out-degree <= n plus spare edges)."""
    parent_ok = list(range(k))
    succ = {w: set() for w in range(k)}
    for w in range(1, k):
        cands = [a for a in range(w) if len(succ[a]) < n]
        succ[rng.choice(cands)].add(w)
    for a in range(k):
        while len(succ[a]) < n and rng.random() < 0.4:
            succ[a].add(rng.choice(parent_ok))
    if serial:
        for a in range(k):
            if not succ[a]:
                succ[a].add(a)
    return Frame(range(k), [(a, b) for a in range(k) for b in succ[a]])


def random_alt_frame(rng, k, n, serial=False):
    return _alt_rooted(rng_of(rng), k, n, serial)


def random_product_model(rng, hk, vk, n=None, variables=("P",), overlap=None, hframe=None, vframe=None, density=0.5):
    """Random delta-product model; vertical worlds 0..overlap-1 coincide with horizontal ones."""
    rng = rng_of(rng)
    fh = hframe or random_frame(rng, hk)
    fv0 = vframe or (random_alt_frame(rng, vk, n) if n else random_frame(rng, vk))
    a, b = len(fh.worlds), len(fv0.worlds)
    if overlap is None:
        overlap = rng.randint(0, min(a, b))
    hs = rng.sample(range(a), overlap)
    vid = {j: f"v{j}" for j in fv0.worlds}
    for j, i in zip(rng.sample(list(fv0.worlds), overlap), hs):
        vid[j] = i
    fv = Frame([vid[j] for j in fv0.worlds], [(vid[x], vid[y]) for x, y in fv0.rel])
    df = delta_product(fh, fv)
    val = {v: [w for w in df.worlds if rng.random() < density] for v in variables}
    return Model(df, val)


def random_machine(rng, n_states=3, counters=2, max_instr=2, halting=1):
    """Random machine on states q0..q{n-1}; the last ``halting`` states halt."""
    rng = rng_of(rng)
    states = [f"q{i}" for i in range(n_states)]
    halt = states[n_states - halting:] if halting else []
    instr = {}
    for q in states:
        if q in halt:
            continue
        k = rng.randint(1, max_instr)
        items = set()
        while len(items) < k:
            items.add((Op(rng.choice(("inc", "dec", "test")), rng.randrange(counters)), rng.choice(states)))
        instr[q] = sorted(items, key=lambda x: (x[0].kind, x[0].counter, x[1]))
    return CounterMachine(states, states[0], halt, counters, instr)


def random_reliable_run(rng, m, length, tries=50):
    """Random walk of enabled instructions of the given length; None if it gets stuck."""
    rng = rng_of(rng)
    for _ in range(tries):
        tau = []
        run = run_reliable(m, tau)
        for _ in range(length):
            c = run.configs[-1]
            options = [ins for ins in m.instructions(c.state) if run_reliable(m, tau + [ins]) is not None]
            if not options:
                break
            tau.append(rng.choice(options))
            run = run_reliable(m, tau)
        if len(tau) == length:
            return tau, run
    return None
