import pytest
from hypothesis import given, settings, strategies as st

from dmw import formula as F
from dmw.frames import DeltaFrame, Frame, delta_product, generated_subframe, make_fan
from dmw.semantics import (BudgetExceeded, Evaluator, Model, check_at, holds_globally, model_from_json,
                           model_to_json, satisfiable_in_frame, valid_in_frame)
import naive
from strategies import formulas, product_models

P = F.Var("P")


def test_diag_and_vacuous_box():
    m = Model(DeltaFrame(["w", "u"], [], [], ["w"]))
    assert check_at(m, "w", F.Diag())
    assert not check_at(m, "u", F.Diag())
    assert check_at(m, "w", F.BoxH(F.Bottom()))
    with pytest.raises(KeyError):
        check_at(m, "nope", F.Diag())


def test_fan_product_by_hand():
    m = Model(delta_product(make_fan(2), make_fan(2)))
    f = F.parse("<h> diag")
    assert not check_at(m, (0, 0), f)
    assert check_at(m, (0, 1), f)


def test_holds_globally():
    m = Model(delta_product(make_fan(2), make_fan(2)))
    assert holds_globally(m, F.Or(F.Diag(), F.Not(F.Diag())))
    assert not holds_globally(m, F.Diag())


def test_valuation_must_stay_in_frame():
    with pytest.raises(ValueError):
        Model(DeltaFrame(["w"], [], [], []), {"P": ["x"]})


@given(product_models(), formulas(max_leaves=10, names=["P", "Q"]))
@settings(max_examples=1000)
def test_agrees_with_naive_evaluator(m, f):
    ev = Evaluator(m)
    for w in m.frame.worlds:
        assert ev.check_at(w, f) == naive.holds(m, w, f)


@given(product_models(), formulas(max_leaves=10, names=["P", "Q"]))
@settings(max_examples=300)
def test_expand_derived_preserves_truth(m, f):
    ev = Evaluator(m)
    assert ev.extension(f) == ev.extension(F.expand_derived(f))


def test_satisfiable_examples():
    df = DeltaFrame([0, 1], [(0, 1)], [], [1])
    m, w = satisfiable_in_frame(df, F.Diag())
    assert w in df.diag
    hit = satisfiable_in_frame(df, F.And(P, F.BoxH(F.Not(P))))
    assert hit is not None and check_at(*hit[:1], hit[1], F.And(P, F.BoxH(F.Not(P))))
    assert satisfiable_in_frame(df, F.And(P, F.Not(P))) is None
    assert satisfiable_in_frame(df, F.And(P, F.Not(P)), engine="sat") is None


def test_budget_is_distinct_from_none():
    df = delta_product(make_fan(3), make_fan(3))
    f = F.parse("P & Q & R & [h](P & ~P)")
    with pytest.raises(BudgetExceeded):
        satisfiable_in_frame(df, f, budget=10)
    # the exact engine settles it
    assert satisfiable_in_frame(df, f, engine="sat") is not None


def test_validities():
    df = delta_product(make_fan(2), make_fan(3))
    assert valid_in_frame(df, F.parse("P | ~P"))
    assert valid_in_frame(df, F.parse("diag -> <h+> diag"))
    # computed per frame, no general claim: holds on this product
    assert valid_in_frame(df, F.parse("[v]((diag & <v> diag) -> diag)"))


@given(product_models(max_h=2, max_v=2, names=("P",)), formulas(max_leaves=6, names=["P"]))
@settings(max_examples=150)
def test_sat_vs_valid_duality_and_engines(m, f):
    df = m.frame
    a = satisfiable_in_frame(df, f, budget=None)
    b = satisfiable_in_frame(df, f, engine="sat")
    assert (a is None) == (b is None)
    assert (a is None) == valid_in_frame(df, F.Not(f), budget=None)
    if a is not None:
        assert check_at(a[0], a[1], f)


@given(product_models(), formulas(max_leaves=8, names=["P", "Q"], derived=False),
       st.lists(st.integers(0, 8), max_size=4))
@settings(max_examples=300)
def test_diag_free_truth_ignores_diag(m, f, picks):
    f = _strip_diag(f)
    ws = m.frame.worlds
    other = {ws[i % len(ws)] for i in picks}
    m2 = Model(DeltaFrame(ws, m.frame.rh, m.frame.rv, other), m.valuation)
    assert Evaluator(m).extension(f) == Evaluator(m2).extension(f)


def _strip_diag(f):
    if isinstance(f, F.Diag):
        return F.Var("Q")
    kids = f.children()
    return type(f)(*[_strip_diag(c) for c in kids]) if kids else f


def test_generated_subframe_keeps_truth():
    fh = Frame([0, 1, 2, 3], [(0, 1), (1, 2), (3, 0)])
    fv = Frame([0, 1], [(0, 1)])
    df = delta_product(fh, fv)
    m = Model(df, {"P": [(1, 0), (2, 1), (3, 1)]})
    sub = delta_product(generated_subframe(fh, 0), fv)
    m2 = Model(sub, {"P": [w for w in m.valuation["P"] if w in set(sub.worlds)]})
    for text in ["[h][h]<v> P", "<h>(P | [v]P)", "[h+] ~diag"]:
        f = F.parse(text)
        assert check_at(m, (0, 0), f) == check_at(m2, (0, 0), f)


@given(product_models())
def test_model_json_round_trip(m):
    w = m.frame.worlds[0]
    back, des = model_from_json(model_to_json(m, w))
    assert back == m and des == w
