import pytest
from hypothesis import given

from dmw.frames import (DeltaFrame, Frame, delta_frame_from_json, delta_frame_to_json, delta_product,
                        diag_uniqueness, disjoint_union_with_spy, frame_from_json, frame_properties,
                        frame_to_json, is_rooted, linear_order, make_fan, make_spy_chain, open_problem_frame)
from strategies import frames


def test_delta_product_diag_by_id():
    df = delta_product(Frame([0, 1], []), Frame([1, 2], []))
    assert df.diag == {(1, 1)}
    assert delta_product(Frame(["a"], []), Frame(["b"], [])).diag == frozenset()


def test_fan_product_by_hand():
    df = delta_product(make_fan(2), make_fan(2))
    assert len(df.worlds) == 4
    assert df.rh == {((0, 0), (1, 0)), ((0, 1), (1, 1))}
    assert df.diag == {(0, 0), (1, 1)}


def test_fans():
    assert make_fan(1).rel == frozenset()
    assert make_fan(3).rel == {(0, 1), (0, 2)}
    assert frame_properties(make_fan(2)).alt[1]
    p = frame_properties(make_fan(3))
    assert p.alt[2] and not p.alt[1] and p.transitive
    with pytest.raises(ValueError):
        make_fan(0)


def test_spy_chains():
    assert make_spy_chain(1).worlds == (0, 1) and make_spy_chain(1).rel == {(1, 0)}
    assert make_spy_chain(2).rel == {(2, 0), (2, 1), (0, 1)}
    assert make_spy_chain(3).rel == {(3, 0), (3, 1), (3, 2), (0, 1), (1, 2)}
    for k in range(1, 6):
        succ = make_spy_chain(k).succ_map()
        assert len(succ[k]) == k
        assert all(len(succ[w]) <= 1 for w in range(k))
    with pytest.raises(ValueError):
        make_spy_chain(0)


def test_disjoint_union_with_spy():
    g = disjoint_union_with_spy([Frame([0], [])])
    assert len(g.worlds) == 2 and g.rel == {("r", (0, 0))}
    g = disjoint_union_with_spy([make_fan(2), make_fan(2)])
    assert len(g.worlds) == 5
    assert {b for a, b in g.rel if a == "r"} == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert ((0, 0), (1, 0)) in g.rel and ((0, 1), (1, 1)) in g.rel
    assert len(g.rel) == 4 + 2
    with pytest.raises(ValueError):
        disjoint_union_with_spy([])


@given(frames(), frames())
def test_spy_union_counts(f, g):
    u = disjoint_union_with_spy([f, g])
    assert len(u.worlds) == 1 + len(f.worlds) + len(g.worlds)
    assert len(u.rel) == len(f.worlds) + len(g.worlds) + len(f.rel) + len(g.rel)


def test_properties_of_orders_and_open_frame():
    p = frame_properties(linear_order(3))
    assert p.weakly_connected and p.transitive and not p.reflexive
    f = open_problem_frame()
    assert frame_properties(Frame(f.worlds, f.rh)).reflexive
    assert frame_properties(Frame(f.worlds, f.rv)).reflexive
    assert f.diag == {"z"}


def test_weak_connectedness_fails_on_fan():
    assert not frame_properties(make_fan(3)).weakly_connected


@given(frames(), frames(ids=[0, 1, "a"]))
def test_products_have_unique_diagonal(fh, fv):
    df = delta_product(fh, fv)
    assert diag_uniqueness(df)
    assert len(df.worlds) == len(fh.worlds) * len(fv.worlds)
    assert len(df.rh) == len(fh.rel) * len(fv.worlds)
    assert len(df.rv) == len(fv.rel) * len(fh.worlds)


def test_diag_uniqueness_violations():
    ws = [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert not diag_uniqueness(DeltaFrame(ws, [], [], [(0, 0), (0, 1)]))
    assert diag_uniqueness(DeltaFrame(ws, [], [], []))
    with pytest.raises(ValueError):
        diag_uniqueness(DeltaFrame(["x"], [], [], []))


def test_rootedness():
    assert is_rooted(DeltaFrame(["a"], [], [], [])) == "a"
    assert is_rooted(DeltaFrame(["a", "b"], [], [], [])) is None
    df = delta_product(make_spy_chain(2), make_fan(3))
    assert is_rooted(df) == (2, 0)


def test_frame_validation():
    with pytest.raises(ValueError):
        Frame([], [])
    with pytest.raises(ValueError):
        Frame([0], [(0, 1)])
    with pytest.raises(ValueError):
        DeltaFrame([0], [], [], [1])


@given(frames(), frames(ids=[0, "v", 2]))
def test_json_round_trips(fh, fv):
    assert frame_from_json(frame_to_json(fh)) == fh
    df = delta_product(fh, fv)
    back = delta_frame_from_json(delta_frame_to_json(df))
    assert back == df and back.factors == df.factors
