"""Finite unimodal frames, delta-frames and the frame constructions used by the encodings."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product


def world_key(w):
    """Total order on world ids: ints, then strings, then tuples (componentwise)."""
    if isinstance(w, bool):
        return (0, int(w))
    if isinstance(w, int):
        return (0, w)
    if isinstance(w, str):
        return (1, w)
    if isinstance(w, tuple):
        return (2, tuple(world_key(x) for x in w))
    raise TypeError(f"unsupported world id {w!r}")


def sort_worlds(ws):
    return tuple(sorted(ws, key=world_key))


@dataclass(frozen=True)
class Frame:
    worlds: tuple
    rel: frozenset

    def __init__(self, worlds, rel=()):
        ws = sort_worlds(set(worlds))
        if not ws:
            raise ValueError("a frame needs at least one world")
        r = frozenset((a, b) for a, b in rel)
        wset = set(ws)
        bad = [e for e in r if e[0] not in wset or e[1] not in wset]
        if bad:
            raise ValueError(f"relation mentions unknown worlds: {bad[:3]}")
        object.__setattr__(self, "worlds", ws)
        object.__setattr__(self, "rel", r)

    def successors(self, w):
        return sort_worlds(b for a, b in self.rel if a == w)

    def succ_map(self):
        out = {w: [] for w in self.worlds}
        for a, b in self.rel:
            out[a].append(b)
        return {w: sort_worlds(v) for w, v in out.items()}


@dataclass(frozen=True)
class DeltaFrame:
    worlds: tuple
    rh: frozenset
    rv: frozenset
    diag: frozenset
    factors: tuple | None = field(default=None, compare=False)

    def __init__(self, worlds, rh=(), rv=(), diag=(), factors=None):
        ws = sort_worlds(set(worlds))
        if not ws:
            raise ValueError("a frame needs at least one world")
        wset = set(ws)
        rh = frozenset((a, b) for a, b in rh)
        rv = frozenset((a, b) for a, b in rv)
        diag = frozenset(diag)
        for name, r in (("rh", rh), ("rv", rv)):
            if any(a not in wset or b not in wset for a, b in r):
                raise ValueError(f"{name} mentions unknown worlds")
        if not diag <= wset:
            raise ValueError("diag mentions unknown worlds")
        object.__setattr__(self, "worlds", ws)
        object.__setattr__(self, "rh", rh)
        object.__setattr__(self, "rv", rv)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "factors", factors)

    def h_frame(self):
        return Frame(self.worlds, self.rh)

    def v_frame(self):
        return Frame(self.worlds, self.rv)


def delta_product(fh, fv):
    """The delta-product: componentwise relations, diagonal on shared world ids."""
    worlds = [(x, y) for x in fh.worlds for y in fv.worlds]
    rh = [((x, y), (x2, y)) for (x, x2) in fh.rel for y in fv.worlds]
    rv = [((x, y), (x, y2)) for x in fh.worlds for (y, y2) in fv.rel]
    shared = set(fh.worlds) & set(fv.worlds)
    diag = [(x, x) for x in shared]
    return DeltaFrame(worlds, rh, rv, diag, factors=(fh, fv))


def make_fan(k, extra=()):
    """Minimal k-fan: root 0 sees 1..k-1; ``extra`` edges may be added."""
    if k < 1:
        raise ValueError("fan size must be at least 1")
    return Frame(range(k), [(0, n) for n in range(1, k)] + list(extra))


def make_spy_chain(k):
    """Worlds 0..k with spy k seeing 0..k-1 and the successor chain on 0..k-1."""
    if k < 1:
        raise ValueError("spy chain needs k >= 1")
    rel = [(k, n) for n in range(k)] + [(n - 1, n) for n in range(1, k)]
    return Frame(range(k + 1), rel)


SPY = "r"


def disjoint_union_with_spy(frames, spy=SPY):
    """Tagged copies (w, i) of each frame plus a fresh spy seeing every copied world."""
    frames = list(frames)
    if not frames:
        raise ValueError("need at least one frame")
    worlds = [spy]
    rel = []
    for i, f in enumerate(frames):
        for w in f.worlds:
            worlds.append((w, i))
            rel.append((spy, (w, i)))
        for a, b in f.rel:
            rel.append(((a, i), (b, i)))
    return Frame(worlds, rel)


@dataclass(frozen=True)
class FrameProperties:
    serial: bool
    reflexive: bool
    transitive: bool
    weakly_connected: bool
    symmetric: bool
    universal: bool
    alt: dict


def frame_properties(f, alt_ns=(1, 2, 3)):
    succ = f.succ_map()
    r = f.rel
    ws = f.worlds
    serial = all(succ[w] for w in ws)
    reflexive = all((w, w) in r for w in ws)
    symmetric = all((b, a) in r for a, b in r)
    transitive = all((a, c) in r for a, b in r for c in succ[b])
    weak = all(y == z or (y, z) in r or (z, y) in r
               for x in ws for y in succ[x] for z in succ[x])
    universal = len(r) == len(ws) ** 2
    alt = {n: all(len(succ[w]) <= n for w in ws) for n in alt_ns}
    return FrameProperties(serial, reflexive, transitive, weak, symmetric, universal, alt)


def max_out_degree(f):
    return max((len(s) for s in f.succ_map().values()), default=0)


def diag_uniqueness(df, product_worlds=None):
    """Horizontal and vertical uniqueness of the diagonal.

    ``product_worlds`` maps each world to its (h, v) pair; by default worlds
    must themselves be pairs.
    """
    def pair(w):
        if product_worlds is not None:
            if w not in product_worlds:
                raise ValueError(f"world {w!r} has no pair interpretation")
            return product_worlds[w]
        if not (isinstance(w, tuple) and len(w) == 2):
            raise ValueError(f"world {w!r} has no pair interpretation")
        return w

    for w in df.worlds:
        pair(w)
    rows, cols = {}, {}
    for w in df.diag:
        x, y = pair(w)
        if rows.setdefault(y, x) != x or cols.setdefault(x, y) != y:
            return False
    return True


def is_rooted(df):
    """A world reaching every world via rh and rv (reflexive-transitive), else None."""
    succ = {w: [] for w in df.worlds}
    for a, b in df.rh | df.rv:
        succ[a].append(b)
    n = len(df.worlds)
    for w in df.worlds:
        seen = {w}
        stack = [w]
        while stack:
            u = stack.pop()
            for v in succ[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) == n:
            return w
    return None


def generated_subframe(f, root):
    """Worlds reachable from ``root`` and the restricted relation."""
    succ = f.succ_map()
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return Frame(seen, [(a, b) for a, b in f.rel if a in seen])


def linear_order(n, strict=True):
    """<{0..n-1}, <> (or <=)."""
    rel = [(a, b) for a, b in product(range(n), repeat=2) if a < b or (not strict and a == b)]
    return Frame(range(n), rel)


def open_problem_frame():
    """The three-point delta-frame with D = {z} listed among the open problems."""
    x, y, z = "x", "y", "z"
    rh = [(x, x), (y, y), (z, z), (y, z), (z, x), (y, x)]
    rv = [(x, x), (y, y), (z, z), (x, z), (z, y), (x, y)]
    return DeltaFrame([x, y, z], rh, rv, [z])


# ---------------------------------------------------------------- JSON

def world_to_json(w):
    if isinstance(w, tuple):
        return [world_to_json(x) for x in w]
    return w


def world_from_json(w):
    if isinstance(w, list):
        return tuple(world_from_json(x) for x in w)
    return w


def frame_to_json(f):
    return {
        "worlds": [world_to_json(w) for w in f.worlds],
        "rel": [[world_to_json(a), world_to_json(b)] for a, b in sorted(f.rel, key=lambda e: (world_key(e[0]), world_key(e[1])))],
    }


def frame_from_json(obj):
    ws = [world_from_json(w) for w in obj["worlds"]]
    return Frame(ws, [(world_from_json(a), world_from_json(b)) for a, b in obj["rel"]])


def _sorted_pairs(r):
    return sorted(r, key=lambda e: (world_key(e[0]), world_key(e[1])))


def delta_frame_to_json(df):
    out = {
        "worlds": [world_to_json(w) for w in df.worlds],
        "rh": [[world_to_json(a), world_to_json(b)] for a, b in _sorted_pairs(df.rh)],
        "rv": [[world_to_json(a), world_to_json(b)] for a, b in _sorted_pairs(df.rv)],
        "diag": [world_to_json(w) for w in sort_worlds(df.diag)],
    }
    if df.factors is not None:
        out["factors"] = {"h": frame_to_json(df.factors[0]), "v": frame_to_json(df.factors[1])}
    return out


def delta_frame_from_json(obj):
    pairs = lambda key: [(world_from_json(a), world_from_json(b)) for a, b in obj[key]]
    factors = None
    if "factors" in obj:
        factors = (frame_from_json(obj["factors"]["h"]), frame_from_json(obj["factors"]["v"]))
    return DeltaFrame([world_from_json(w) for w in obj["worlds"]], pairs("rh"), pairs("rv"),
                      [world_from_json(w) for w in obj["diag"]], factors=factors)
