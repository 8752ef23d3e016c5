"""Formulas of the three-modal language with a diagonal constant.

Primitive connectives are variables, ``diag``, ``false``, negation, conjunction
and the two boxes.  The remaining connectives are kept as explicit nodes so
that rendered encodings stay readable; ``expand_derived`` rewrites them away.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields

RESERVED = frozenset({"diag", "false"})
NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class Formula:
    """Base class of all formula nodes (immutable, hashable)."""

    __slots__ = ()

    def _fields(self):
        return tuple(getattr(self, f.name) for f in fields(self) if f.name != "_hash")

    def children(self):
        return tuple(v for v in self._fields() if isinstance(v, Formula))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return render(self)


def _node(cls):
    """Freeze a node class and precompute its hash from its children."""
    cls = dataclass(frozen=True, eq=True, slots=True)(cls)
    orig_init = cls.__init__

    def __init__(self, *args, **kwargs):
        orig_init(self, *args, **kwargs)
        object.__setattr__(self, "_hash", hash((cls.__name__,) + self._fields()))

    cls.__init__ = __init__
    cls.__hash__ = Formula.__hash__
    return cls


@_node
class Var(Formula):
    name: str
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not NAME_RE.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")
        if self.name in RESERVED:
            raise ValueError(f"reserved word used as variable: {self.name!r}")


@_node
class Diag(Formula):
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class Bottom(Formula):
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class Not(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class And(Formula):
    left: Formula
    right: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class Or(Formula):
    left: Formula
    right: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class Implies(Formula):
    left: Formula
    right: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class Iff(Formula):
    left: Formula
    right: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class BoxH(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class BoxV(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class DiaH(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class DiaV(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class BoxHPlus(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class BoxVPlus(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class DiaHPlus(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


@_node
class DiaVPlus(Formula):
    child: Formula
    _hash: int = field(default=0, init=False, repr=False, compare=False)


UNARY = (Not, BoxH, BoxV, DiaH, DiaV, BoxHPlus, BoxVPlus, DiaHPlus, DiaVPlus)
BINARY = (And, Or, Implies, Iff)
PRIMITIVE = (Var, Diag, Bottom, Not, And, BoxH, BoxV)
HORIZONTAL = (BoxH, DiaH, BoxHPlus, DiaHPlus)
VERTICAL = (BoxV, DiaV, BoxVPlus, DiaVPlus)


def top():
    return Not(Bottom())


def conj(items):
    """Left-nested conjunction; a single item is returned bare, none gives top."""
    items = list(items)
    if not items:
        return top()
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def disj(items):
    """Left-nested disjunction; none gives ``false``."""
    items = list(items)
    if not items:
        return Bottom()
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def flatten_and(f):
    """Top-level conjuncts of a left/right nested conjunction."""
    if isinstance(f, And):
        return flatten_and(f.left) + flatten_and(f.right)
    return [f]


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_MODAL_TOKENS = {
    "[h]": BoxH, "[v]": BoxV, "<h>": DiaH, "<v>": DiaV,
    "[h+]": BoxHPlus, "[v+]": BoxVPlus, "<h+>": DiaHPlus, "<v+>": DiaVPlus,
}
_SYMBOLS = ["<->", "->", "[h+]", "[v+]", "<h+>", "<v+>", "[h]", "[v]", "<h>", "<v>",
            "~", "&", "|", "(", ")"]


def tokenize(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append((sym, i))
                i += len(sym)
                break
        else:
            m = re.compile(r"[A-Za-z0-9_]+").match(text, i)
            if not m:
                raise ParseError(f"unexpected character {c!r}", i)
            toks.append((m.group(0), i))
            i = m.end()
    toks.append(("<eof>", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def parse(self):
        f = self.iff()
        tok, pos = self.toks[self.i]
        if tok != "<eof>":
            raise ParseError(f"unexpected token {tok!r}", pos)
        return f

    def iff(self):
        f = self.implies()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.implies())
        return f

    def implies(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        tok, pos = self.toks[self.i]
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in _MODAL_TOKENS:
            self.take()
            return _MODAL_TOKENS[tok](self.unary())
        if tok == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok == "diag":
            self.take()
            return Diag()
        if tok == "false":
            self.take()
            return Bottom()
        if tok == "<eof>":
            raise ParseError("unexpected end of input", pos)
        if NAME_RE.match(tok):
            self.take()
            return Var(tok)
        raise ParseError(f"unexpected token {tok!r}", pos)


def parse(text):
    return _Parser(text).parse()


# ---------------------------------------------------------------- rendering

_PREFIX = {v: k for k, v in _MODAL_TOKENS.items()}
_BINOP = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
# binding strength; higher binds tighter
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def render(f, full=False):
    """Concrete syntax.  ``full`` parenthesizes every binary node."""
    return _render(f, full, 0)


def _atomic(f):
    return isinstance(f, (Var, Diag, Bottom))


def _render(f, full, ctx):
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Diag):
        return "diag"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, UNARY):
        op = "~" if isinstance(f, Not) else _PREFIX[type(f)]
        body = _render(f.child, full, 5)
        sep = " " if op != "~" and _atomic(f.child) else ""
        return op + sep + body
    cls = type(f)
    p = _PREC[cls]
    if full:
        return "(" + _render(f.left, True, 0) + f" {_BINOP[cls]} " + _render(f.right, True, 0) + ")"
    if cls is Implies:
        lhs = _render(f.left, full, p + 1)
        rhs = _render(f.right, full, p)
    else:
        lhs = _render(f.left, full, p)
        rhs = _render(f.right, full, p + 1)
    s = f"{lhs} {_BINOP[cls]} {rhs}"
    return f"({s})" if p < ctx else s


# ---------------------------------------------------------------- expansion

def expand_derived(f, _memo=None):
    """Rewrite into Var, Diag, Bottom, Not, And, BoxH, BoxV only."""
    memo = {} if _memo is None else _memo
    if f in memo:
        return memo[f]
    if isinstance(f, (Var, Diag, Bottom)):
        out = f
    elif isinstance(f, (Not, BoxH, BoxV)):
        out = type(f)(expand_derived(f.child, memo))
    elif isinstance(f, And):
        out = And(expand_derived(f.left, memo), expand_derived(f.right, memo))
    else:
        out = expand_derived(_unfold(f), memo)
    memo[f] = out
    return out


def _unfold(f):
    """One-step definition of a derived connective."""
    if isinstance(f, Or):
        return Not(And(Not(f.left), Not(f.right)))
    if isinstance(f, Implies):
        return Not(And(f.left, Not(f.right)))
    if isinstance(f, Iff):
        return And(Implies(f.left, f.right), Implies(f.right, f.left))
    if isinstance(f, DiaH):
        return Not(BoxH(Not(f.child)))
    if isinstance(f, DiaV):
        return Not(BoxV(Not(f.child)))
    if isinstance(f, BoxHPlus):
        return And(f.child, BoxH(f.child))
    if isinstance(f, BoxVPlus):
        return And(f.child, BoxV(f.child))
    if isinstance(f, DiaHPlus):
        return Or(f.child, DiaH(f.child))
    if isinstance(f, DiaVPlus):
        return Or(f.child, DiaV(f.child))
    raise TypeError(f"not a derived node: {f!r}")


# ---------------------------------------------------------------- metrics

@dataclass(frozen=True)
class FormulaMetrics:
    subformula_count: int
    horizontal_depth: int
    vertical_depth: int
    variables: frozenset


def subformulas(f):
    """Distinct subformulas, children before parents."""
    seen = {}
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if g in seen:
            continue
        if done:
            seen[g] = None
            continue
        stack.append((g, True))
        for c in reversed(g.children()):
            if isinstance(c, Formula) and c not in seen:
                stack.append((c, False))
    return list(seen)


def depths(f):
    """(horizontal depth, vertical depth) of every subformula, keyed by node."""
    out = {}
    for g in subformulas(f):
        kids = g.children()
        hd = max((out[c][0] for c in kids), default=0)
        vd = max((out[c][1] for c in kids), default=0)
        if isinstance(g, HORIZONTAL):
            hd += 1
        elif isinstance(g, VERTICAL):
            vd += 1
        out[g] = (hd, vd)
    return out


def variables(f):
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Var))


def uses_diag(f):
    return any(isinstance(g, Diag) for g in subformulas(f))


def size(f):
    """Number of AST nodes (tree size, shared nodes counted per occurrence)."""
    memo = {}
    for g in subformulas(f):
        memo[g] = 1 + sum(memo[c] for c in g.children())
    return memo[f]


def metrics(f):
    e = expand_derived(f)
    hd, vd = depths(e)[e]
    return FormulaMetrics(len(subformulas(e)), hd, vd, variables(e))


# ---------------------------------------------------------------- JSON

_OPS = {
    Not: "not", And: "and", Or: "or", Implies: "implies", Iff: "iff",
    BoxH: "box_h", BoxV: "box_v", DiaH: "dia_h", DiaV: "dia_v",
    BoxHPlus: "box_h_plus", BoxVPlus: "box_v_plus",
    DiaHPlus: "dia_h_plus", DiaVPlus: "dia_v_plus",
}
_OPS_INV = {v: k for k, v in _OPS.items()}


def to_json(f):
    if isinstance(f, Var):
        return {"op": "var", "name": f.name}
    if isinstance(f, Diag):
        return {"op": "diag", "args": []}
    if isinstance(f, Bottom):
        return {"op": "false", "args": []}
    return {"op": _OPS[type(f)], "args": [to_json(c) for c in f.children()]}


def from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    op = obj.get("op")
    if op == "var":
        return Var(obj["name"])
    if op == "diag":
        return Diag()
    if op == "false":
        return Bottom()
    if op not in _OPS_INV:
        raise ValueError(f"unknown op {op!r}")
    return _OPS_INV[op](*[from_json(a) for a in obj["args"]])
