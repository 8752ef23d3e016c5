"""Minsky machines with reliable, lossy and insertion-error step semantics."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from itertools import product

RELIABLE = "reliable"
LOSSY = "lossy"
IERR = "ierr"
FLAVORS = (RELIABLE, LOSSY, IERR)
KINDS = ("inc", "dec", "test")
_STATE_RE = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True, order=True)
class Op:
    kind: str
    counter: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operation {self.kind!r}")
        if not isinstance(self.counter, int) or self.counter < 0:
            raise ValueError(f"bad counter index {self.counter!r}")

    def __str__(self):
        return f"{self.kind} {self.counter}"


def instr_key(ins):
    op, target = ins
    return (op.kind, op.counter, target)


@dataclass(frozen=True)
class CounterMachine:
    states: tuple
    init: str
    halting: frozenset
    counters: int
    instr: dict

    def __init__(self, states, init, halting, counters, instr):
        object.__setattr__(self, "states", tuple(states))
        object.__setattr__(self, "init", init)
        object.__setattr__(self, "halting", frozenset(halting))
        object.__setattr__(self, "counters", counters)
        norm = {}
        for q, lst in instr.items():
            items = []
            for ins in lst:
                if isinstance(ins, Op) or (len(ins) == 2 and isinstance(ins[0], Op)):
                    op, t = ins
                else:
                    kind, i, t = ins
                    op = Op(kind, i)
                items.append((op, t))
            norm[q] = tuple(sorted(set(items), key=instr_key))
        object.__setattr__(self, "instr", norm)

    def __hash__(self):
        return hash((self.states, self.init, self.halting, self.counters,
                     tuple(sorted(self.instr.items()))))

    def instructions(self, q):
        return self.instr.get(q, ())

    def running_states(self):
        return [q for q in self.states if q not in self.halting]


def validate_machine(m):
    out = []
    if len(set(m.states)) != len(m.states):
        out.append("duplicate states")
    if not m.states:
        out.append("no states")
    for q in m.states:
        if not isinstance(q, str) or not _STATE_RE.match(q):
            out.append(f"state name {q!r} is not over [A-Za-z0-9_]")
    sset = set(m.states)
    if m.init not in sset:
        out.append(f"initial state {m.init!r} not a state")
    if not m.halting <= sset:
        out.append("halting states not all states")
    if not isinstance(m.counters, int) or m.counters < 2:
        out.append("need at least two counters")
    for q in m.states:
        if q in m.halting:
            if m.instr.get(q):
                out.append(f"halting state {q} has instructions")
        elif not m.instr.get(q):
            out.append(f"empty instruction set at {q}")
    for q, lst in m.instr.items():
        if q not in sset:
            out.append(f"instructions for unknown state {q!r}")
        for op, t in lst:
            if t not in sset:
                out.append(f"instruction at {q} targets unknown state {t!r}")
            if isinstance(m.counters, int) and op.counter >= m.counters:
                out.append(f"instruction at {q} uses counter {op.counter} >= {m.counters}")
    return out


@dataclass(frozen=True)
class Config:
    state: str
    counters: tuple


@dataclass(frozen=True)
class Run:
    flavor: str
    configs: tuple

    def __init__(self, flavor, configs):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        cs = tuple(c if isinstance(c, Config) else Config(c[0], tuple(c[1])) for c in configs)
        object.__setattr__(self, "flavor", flavor)
        object.__setattr__(self, "configs", cs)

    def counter(self, i):
        return [c.counters[i] for c in self.configs]

    def with_flavor(self, flavor):
        return Run(flavor, self.configs)

    def same_configs(self, other):
        return self.configs == other.configs


class StepError(ValueError):
    pass


def _relation(flavor, op, c, d):
    i = op.counter
    n = len(c)
    others = [j for j in range(n) if j != i]
    if flavor == RELIABLE:
        if op.kind == "inc":
            return d[i] == c[i] + 1 and all(d[j] == c[j] for j in others)
        if op.kind == "dec":
            return d[i] == c[i] - 1 and all(d[j] == c[j] for j in others)
        return d[i] == c[i] == 0 and all(d[j] == c[j] for j in others)
    if flavor == LOSSY:
        if op.kind == "inc":
            return d[i] <= c[i] + 1 and all(d[j] <= c[j] for j in others)
        if op.kind == "dec":
            return d[i] <= c[i] - 1 and all(d[j] <= c[j] for j in others)
        return d[i] == 0 and all(d[j] <= c[j] for j in range(n))
    if flavor == IERR:
        if op.kind == "inc":
            return d[i] >= c[i] + 1 and all(d[j] >= c[j] for j in others)
        if op.kind == "dec":
            return d[i] >= c[i] - 1 and all(d[j] >= c[j] for j in others)
        return c[i] == 0 and all(d[j] >= c[j] for j in range(n))
    raise ValueError(f"unknown flavor {flavor!r}")


def check_step(flavor, m, frm, instr, to):
    op, target = instr
    if op.counter >= m.counters:
        raise StepError(f"counter index {op.counter} out of range")
    if instr not in m.instructions(frm.state):
        raise StepError(f"{op} -> {target} is not an instruction of {frm.state}")
    if len(frm.counters) != m.counters or len(to.counters) != m.counters:
        raise StepError("counter vector has wrong length")
    if any(x < 0 for x in frm.counters) or any(x < 0 for x in to.counters):
        return False
    return to.state == target and _relation(flavor, op, frm.counters, to.counters)


def start_config(m):
    return Config(m.init, (0,) * m.counters)


def simulate(m, tau):
    """Reliable configurations along tau and the 1-based index of the first disabled step."""
    tau = list(tau)
    c = start_config(m)
    configs = [c]
    for n, (op, target) in enumerate(tau, 1):
        if (op, target) not in m.instructions(c.state):
            raise StepError(f"step {n}: {op} -> {target} is not an instruction of {c.state}")
        v = list(c.counters)
        i = op.counter
        if op.kind == "inc":
            v[i] += 1
        elif op.kind == "dec":
            if v[i] == 0:
                return configs, n
            v[i] -= 1
        elif v[i] != 0:
            return configs, n
        c = Config(target, tuple(v))
        configs.append(c)
    return configs, None


def run_reliable(m, tau):
    configs, blocked = simulate(m, tau)
    return None if blocked else Run(RELIABLE, configs)


def validate_run(flavor, m, tau, run):
    tau = list(tau)
    if len(run.configs) != len(tau) + 1:
        raise ValueError("run length must be |tau| + 1")
    return first_invalid_step(flavor, m, tau, run) is None


def first_invalid_step(flavor, m, tau, run):
    """0 for a bad start, n for the first bad step, None if the run is valid."""
    if run.configs[0] != start_config(m):
        return 0
    for n, ins in enumerate(tau, 1):
        try:
            ok = check_step(flavor, m, run.configs[n - 1], ins, run.configs[n])
        except StepError:
            ok = False
        if not ok:
            return n
    return None


class ReconstructionError(ValueError):
    pass


def reconstruct_reliable(m, tau, lossy, ierr):
    """The reliable tau-run sandwiched between a lossy and an insertion-error run."""
    tau = list(tau)
    for flavor, run in ((LOSSY, lossy), (IERR, ierr)):
        if len(run.configs) != len(tau) + 1:
            raise ReconstructionError(f"{flavor} run has wrong length")
        bad = first_invalid_step(flavor, m, tau, run)
        if bad is not None:
            raise ReconstructionError(f"{flavor} run invalid at step {bad}")
    c = [0] * m.counters
    configs = [Config(m.init, tuple(c))]
    for n, (op, target) in enumerate(tau, 1):
        if op.kind == "inc":
            c[op.counter] += 1
        elif op.kind == "dec":
            c[op.counter] -= 1
        configs.append(Config(target, tuple(c)))
    for n, cfg in enumerate(configs):
        lo, hi = lossy.configs[n].counters, ierr.configs[n].counters
        if any(not (lo[i] <= cfg.counters[i] <= hi[i]) for i in range(m.counters)):
            raise ReconstructionError(f"sandwich fails at step {n}")
    out = Run(RELIABLE, configs)
    bad = first_invalid_step(RELIABLE, m, tau, out)
    if bad is not None:
        raise ReconstructionError(f"reconstructed run invalid at step {bad}")
    return out


# ---------------------------------------------------------------- bounded searches

ENUM_LIMIT = 5_000_000


def successors(flavor, m, cfg, cap):
    """All (instr, next config) with counters <= cap allowed by the step relation."""
    out = []
    rng = range(cap + 1)
    for ins in m.instructions(cfg.state):
        for v in product(rng, repeat=m.counters):
            d = Config(ins[1], v)
            if check_step(flavor, m, cfg, ins, d):
                out.append((ins, d))
    return out


def enumerate_runs(flavor, m, L, C, min_length=1):
    """All flavor-valid runs with min_length..L steps and counters <= C, with their tau.

    Each search node tests |I|*(C+1)^N candidates and has at most |I| reliable
    successors (|I|*(C+1)^N faulty ones); requests whose worst case exceeds
    ENUM_LIMIT candidate tests raise.
    """
    fan = max((len(m.instructions(q)) for q in m.states), default=0)
    width = fan * (C + 1) ** m.counters
    branch = fan if flavor == RELIABLE else width
    cost = width * sum(branch ** k for k in range(L))
    if cost > ENUM_LIMIT:
        raise OverflowError(f"enumeration cost {cost} exceeds {ENUM_LIMIT}")
    out = set()
    succ_cache = {}

    def succ(cfg):
        if cfg not in succ_cache:
            succ_cache[cfg] = successors(flavor, m, cfg, C)
        return succ_cache[cfg]

    def go(tau, configs):
        if len(tau) >= min_length:
            out.add((tuple(tau), Run(flavor, configs)))
        if len(tau) == L:
            return
        for ins, d in succ(configs[-1]):
            go(tau + [ins], configs + [d])

    go([], [start_config(m)])
    return out


def bounded_reachability(m, q_fin, bound):
    """Shortest reliable run reaching q_fin within ``bound`` steps (BFS), else None."""
    start = start_config(m)
    if start.state == q_fin:
        return [], Run(RELIABLE, [start])
    parent = {start: None}
    frontier = [start]
    for _ in range(bound):
        nxt = []
        for c in frontier:
            for ins in m.instructions(c.state):
                d = _reliable_next(c, ins)
                if d is None or d in parent:
                    continue
                parent[d] = (c, ins)
                if d.state == q_fin:
                    return _trace(parent, d)
                nxt.append(d)
        frontier = nxt
    return None


def _reliable_next(c, ins):
    op, t = ins
    v = list(c.counters)
    if op.kind == "inc":
        v[op.counter] += 1
    elif op.kind == "dec":
        if v[op.counter] == 0:
            return None
        v[op.counter] -= 1
    elif v[op.counter] != 0:
        return None
    return Config(t, tuple(v))


def _trace(parent, d):
    tau, configs = [], [d]
    while parent[d] is not None:
        c, ins = parent[d]
        tau.append(ins)
        configs.append(c)
        d = c
    tau.reverse()
    configs.reverse()
    return tau, Run(RELIABLE, configs)


@dataclass(frozen=True)
class Lasso:
    stem: tuple     # instructions from the start to the loop entry
    loop: tuple     # instructions around the cycle
    configs: tuple  # configurations of stem then loop, ending back at the loop entry

    @property
    def period(self):
        return len(self.loop)


def bounded_lasso(m, q_r=None, cap=3):
    """A reachable cycle of reliable configurations with counters <= cap (through q_r if given)."""
    start = start_config(m)
    parent = {start: None}
    order = deque([start])
    reach = []
    while order:
        c = order.popleft()
        reach.append(c)
        for ins in m.instructions(c.state):
            d = _reliable_next(c, ins)
            if d is None or max(d.counters) > cap or d in parent:
                continue
            parent[d] = (c, ins)
            order.append(d)
    for c in reach:
        if q_r is not None and c.state != q_r:
            continue
        cyc = _cycle_from(m, c, cap)
        if cyc is not None:
            stem_tau, stem_run = _trace(parent, c)
            loop_tau, loop_cfgs = cyc
            return Lasso(tuple(stem_tau), tuple(loop_tau), tuple(stem_run.configs) + tuple(loop_cfgs[1:]))
    return None


def _cycle_from(m, c0, cap):
    parent = {}
    frontier = deque([c0])
    seen = {c0}
    while frontier:
        c = frontier.popleft()
        for ins in m.instructions(c.state):
            d = _reliable_next(c, ins)
            if d is None or max(d.counters) > cap:
                continue
            if d == c0:
                tau, cfgs = [ins], [d, c]
                while c != c0:
                    pc, pins = parent[c]
                    tau.append(pins)
                    cfgs.append(pc)
                    c = pc
                tau.reverse()
                cfgs.reverse()
                return tau, cfgs
            if d not in seen:
                seen.add(d)
                parent[d] = (c, ins)
                frontier.append(d)
    return None


# ---------------------------------------------------------------- JSON

def machine_to_json(m):
    return {
        "states": list(m.states),
        "init": m.init,
        "halting": [q for q in m.states if q in m.halting],
        "counters": m.counters,
        "instr": {q: [[op.kind, op.counter, t] for op, t in m.instr[q]] for q in m.states if q in m.instr},
    }


def machine_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    return CounterMachine(obj["states"], obj["init"], obj.get("halting", []), obj["counters"],
                          {q: [tuple(x) for x in lst] for q, lst in obj.get("instr", {}).items()})


def tau_to_json(tau):
    return [[op.kind, op.counter, t] for op, t in tau]


def tau_from_json(obj):
    return [(Op(k, i), t) for k, i, t in obj]


def run_to_json(run):
    return {"flavor": run.flavor, "configs": [[c.state, list(c.counters)] for c in run.configs]}


def run_from_json(obj):
    return Run(obj["flavor"], [(s, tuple(v)) for s, v in obj["configs"]])
