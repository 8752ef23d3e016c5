import random

import pytest
from hypothesis import given, settings

from dmw import formula as F
from dmw.encodings import EncodingStyle, FORWARD, grid_formula
from dmw.generators import random_product_model
from dmw.semantics import Evaluator
from strategies import formulas

P, Q = F.Var("P"), F.Var("Q")


def test_parse_examples():
    assert F.parse("<h> diag") == F.DiaH(F.Diag())
    assert F.parse("[v+] P") == F.BoxVPlus(P)
    assert F.expand_derived(F.parse("[v+] P")) == F.And(P, F.BoxV(P))
    assert F.parse("~P & Q") == F.And(F.Not(P), Q)


def test_precedence_and_associativity():
    assert F.parse("P | Q & P") == F.Or(P, F.And(Q, P))
    assert F.parse("P -> Q -> P") == F.Implies(P, F.Implies(Q, P))
    assert F.parse("P & Q & P") == F.And(F.And(P, Q), P)
    assert F.parse("P <-> Q -> P") == F.Iff(P, F.Implies(Q, P))
    assert F.parse("[h]P & Q") == F.And(F.BoxH(P), Q)
    assert F.parse("false") == F.Bottom()


def test_render_examples():
    assert F.render(F.DiaH(F.Diag())) == "<h> diag"
    assert F.render(F.And(P, F.BoxV(P)), full=True) == "(P & [v] P)"
    assert F.render(F.Not(F.Diag())) == "~diag"


@pytest.mark.parametrize("text,pos", [("P &", 3), ("(P", 2), ("P Q", 2), ("<x> P", 0)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(F.ParseError) as e:
        F.parse(text)
    assert e.value.pos == pos


def test_reserved_and_bad_names():
    with pytest.raises(ValueError):
        F.Var("diag")
    with pytest.raises(ValueError):
        F.Var("a-b")
    with pytest.raises(ValueError):
        F.Var("")


@given(formulas())
@settings(max_examples=1000)
def test_render_parse_round_trip(f):
    assert F.parse(F.render(f)) == f
    assert F.parse(F.render(f, full=True)) == f


@given(formulas())
@settings(max_examples=300)
def test_json_round_trip(f):
    assert F.from_json(F.to_json(f)) == f


@given(formulas())
@settings(max_examples=300)
def test_expand_is_primitive_and_keeps_depths(f):
    e = F.expand_derived(f)
    assert all(isinstance(g, F.PRIMITIVE) for g in F.subformulas(e))
    m = F.metrics(f)
    d = F.depths(e)[e]
    assert (m.horizontal_depth, m.vertical_depth) == d


def test_expand_examples():
    assert F.expand_derived(P) == P
    e = F.expand_derived(F.DiaHPlus(P))
    assert all(isinstance(g, F.PRIMITIVE) for g in F.subformulas(e))
    # Iff(diag, diag) expands to something equivalent: true everywhere
    rng = random.Random(3)
    for _ in range(3):
        m = random_product_model(rng, 3, 3)
        ev = Evaluator(m)
        assert ev.extension(F.expand_derived(F.Iff(F.Diag(), F.Diag()))) == ev.full


def test_metrics_examples():
    m = F.metrics(F.Diag())
    assert (m.subformula_count, m.horizontal_depth, m.vertical_depth) == (1, 0, 0)
    m = F.metrics(F.BoxH(F.BoxV(P)))
    assert (m.horizontal_depth, m.vertical_depth) == (1, 1)
    m = F.metrics(grid_formula(EncodingStyle(FORWARD)))
    assert (m.horizontal_depth, m.vertical_depth) == (2, 1)


def test_depth_arithmetic():
    a, b = F.BoxH(F.BoxH(P)), F.BoxV(P)
    assert F.metrics(F.And(a, b)).horizontal_depth == 2
    assert F.metrics(F.BoxHPlus(P)).horizontal_depth == 1
    assert F.metrics(F.DiaVPlus(F.BoxH(P))).vertical_depth == 1


def test_subformulas_are_distinct():
    f = F.And(P, F.And(P, P))
    assert len(F.subformulas(f)) == 3
    assert F.size(f) == 5


def test_conj_disj_helpers():
    assert F.conj([]) == F.top()
    assert F.disj([]) == F.Bottom()
    assert F.conj([P, Q, P]) == F.And(F.And(P, Q), P)
    assert F.flatten_and(F.conj([P, Q, P])) == [P, Q, P]
