import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from dmw.counter_machine import (IERR, LOSSY, RELIABLE, Config, CounterMachine, Op, ReconstructionError, Run,
                                 StepError, bounded_lasso, bounded_reachability, check_step, enumerate_runs,
                                 machine_from_json, machine_to_json, reconstruct_reliable, run_from_json,
                                 run_reliable, run_to_json, simulate, tau_from_json, tau_to_json, validate_machine,
                                 validate_run)
from dmw.generators import random_machine, random_reliable_run

INC0, DEC0, TEST0 = Op("inc", 0), Op("dec", 0), Op("test", 0)


def two(instr, states=("q0", "q1", "q2", "qf"), halting=("qf",), counters=2):
    return CounterMachine(states, states[0], halting, counters, instr)


def C(q, *v):
    return Config(q, tuple(v))


def test_validate_machine():
    assert validate_machine(two({"q0": [("inc", 0, "qf")], "q1": [("inc", 0, "qf")], "q2": [("inc", 0, "qf")]})) == []
    bad = two({"q0": [("inc", 0, "qf")], "q2": [("inc", 0, "qf")]})
    assert any("empty instruction set" in v for v in validate_machine(bad))
    one = CounterMachine(["q0", "qf"], "q0", ["qf"], 1, {"q0": [("inc", 0, "qf")]})
    assert any("two counters" in v for v in validate_machine(one))
    out = CounterMachine(["q0", "qf"], "q0", ["qf"], 2, {"q0": [("inc", 2, "qf")]})
    assert any("counter 2" in v for v in validate_machine(out))


def test_check_step_examples():
    m = two({"q0": [("dec", 0, "q1"), ("inc", 0, "q1"), ("test", 0, "q1")]})
    assert not check_step(RELIABLE, m, C("q0", 0, 0), (DEC0, "q1"), C("q1", 0, 0))
    assert check_step(LOSSY, m, C("q0", 0, 0), (INC0, "q1"), C("q1", 0, 0))
    assert check_step(IERR, m, C("q0", 0, 3), (TEST0, "q1"), C("q1", 0, 5))
    assert not check_step(LOSSY, m, C("q0", 0, 0), (DEC0, "q1"), C("q1", 0, 0))
    assert check_step(IERR, m, C("q0", 0, 0), (DEC0, "q1"), C("q1", 0, 0))
    with pytest.raises(StepError):
        check_step(RELIABLE, m, C("q1", 0, 0), (INC0, "q1"), C("q1", 1, 0))
    with pytest.raises(StepError):
        check_step(RELIABLE, m, C("q0", 0, 0), (Op("inc", 5), "q1"), C("q1", 1, 0))


def test_run_reliable_examples():
    m = two({"q0": [("inc", 0, "q1"), ("dec", 0, "q1")], "q1": [("test", 0, "q2")], "q2": [("inc", 0, "qf")]})
    assert run_reliable(m, [(INC0, "q1")]).configs == (C("q0", 0, 0), C("q1", 1, 0))
    assert run_reliable(m, [(DEC0, "q1")]) is None
    assert simulate(m, [(DEC0, "q1")])[1] == 1
    assert simulate(m, [(INC0, "q1"), (TEST0, "q2")])[1] == 2
    with pytest.raises(StepError):
        simulate(m, [(TEST0, "q2")])


def test_validate_run_examples():
    m = two({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q2")], "q2": [("inc", 0, "qf")]})
    tau = [(INC0, "q1"), (DEC0, "q2")]
    r = run_reliable(m, tau)
    for fl in (RELIABLE, LOSSY, IERR):
        assert validate_run(fl, m, tau, r.with_flavor(fl))
    lossy = Run(LOSSY, [("q0", (0, 0)), ("q1", (0, 0))])
    assert validate_run(LOSSY, m, tau[:1], lossy)
    assert not validate_run(RELIABLE, m, tau[:1], lossy.with_flavor(RELIABLE))
    assert not validate_run(LOSSY, m, tau[:1], Run(LOSSY, [("q0", (1, 0)), ("q1", (1, 0))]))
    with pytest.raises(ValueError):
        validate_run(LOSSY, m, tau, lossy)


def test_reconstruct_examples():
    m = two({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q2")], "q2": [("inc", 0, "qf")]})
    tau = [(INC0, "q1"), (DEC0, "q2")]
    lossy = Run(LOSSY, [("q0", (0, 0)), ("q1", (1, 0)), ("q2", (0, 0))])
    ierr = Run(IERR, lossy.configs)
    assert reconstruct_reliable(m, tau, lossy, ierr) == run_reliable(m, tau)
    bad = Run(IERR, [("q0", (0, 0)), ("q1", (0, 0)), ("q2", (0, 0))])
    with pytest.raises(ReconstructionError):
        reconstruct_reliable(m, tau, lossy, bad)


def test_reconstruct_with_test_step_exhaustive_one_counter():
    # every faulty pair for tiny machines with a Test reconstructs to a valid reliable run
    m = CounterMachine(["q0", "q1", "qf"], "q0", ["qf"], 2,
                       {"q0": [("inc", 0, "q1"), ("test", 0, "q1")], "q1": [("dec", 0, "q0"), ("test", 0, "qf")]})
    lossy = {}
    ierr = {}
    for tau, run in enumerate_runs(LOSSY, m, 4, 3):
        lossy.setdefault(tau, []).append(run)
    for tau, run in enumerate_runs(IERR, m, 4, 3):
        ierr.setdefault(tau, []).append(run)
    pairs = 0
    for tau in set(lossy) & set(ierr):
        rel = run_reliable(m, tau)
        for a in lossy[tau]:
            for b in ierr[tau]:
                assert reconstruct_reliable(m, tau, a, b) == rel
                pairs += 1
        for i, (op, _) in enumerate(tau):
            if op.kind == "test":
                assert rel.configs[i].counters[op.counter] == 0
    assert pairs > 100


def test_enumerate_runs_examples():
    m = two({"q0": [("inc", 0, "q1"), ("test", 1, "q2"), ("dec", 0, "qf")], "q1": [("inc", 1, "qf")],
             "q2": [("inc", 0, "qf")]})
    rel = enumerate_runs(RELIABLE, m, 1, 2)
    assert len(rel) == 2   # the decrement is disabled at zero
    assert len(enumerate_runs(LOSSY, m, 2, 2)) >= len(enumerate_runs(RELIABLE, m, 2, 2))
    with pytest.raises(OverflowError):
        enumerate_runs(IERR, m, 12, 5)


def test_enumerate_runs_hand_fixture():
    # one working counter; L=2, C=1, listed by hand
    m = two({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q0")]}, states=("q0", "q1"), halting=())
    got = {(tuple(t), r.configs) for t, r in enumerate_runs(LOSSY, m, 2, 1)}
    a, b = (INC0, "q1"), (DEC0, "q0")
    want = set()
    for c1 in [(0, 0), (1, 0)]:
        want.add(((a,), (C("q0", 0, 0), C("q1", *c1))))
    want.add(((a, b), (C("q0", 0, 0), C("q1", 1, 0), C("q0", 0, 0))))
    assert got == want


def test_bounded_reachability_examples():
    m = two({"q0": [("test", 0, "qf")]}, states=("q0", "qf"))
    tau, run = bounded_reachability(m, "qf", 3)
    assert len(tau) == 1
    m = two({"q0": [("dec", 0, "qf")]}, states=("q0", "qf"))
    assert all(bounded_reachability(m, "qf", b) is None for b in range(6))
    m = CounterMachine(["a", "b", "c", "d", "e", "qf"], "a", ["qf"], 2, {
        "a": [("inc", 0, "b")], "b": [("inc", 0, "c")], "c": [("dec", 0, "d")],
        "d": [("dec", 0, "e")], "e": [("test", 0, "qf")]})
    tau, run = bounded_reachability(m, "qf", 10)
    assert len(tau) == 5 and run == run_reliable(m, tau)


def test_bounded_lasso_examples():
    m = two({"q0": [("test", 0, "q0")]}, states=("q0",), halting=())
    assert bounded_lasso(m).period == 1
    m = two({"q0": [("dec", 0, "q0")]}, states=("q0",), halting=())
    assert bounded_lasso(m) is None
    m = two({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q0")]}, states=("q0", "q1"), halting=())
    lasso = bounded_lasso(m, cap=1)
    assert lasso.period == 2
    assert bounded_lasso(m, q_r="q1", cap=1).configs[-1].state == "q1"


@given(st.integers(0, 10_000), st.integers(1, 8))
@settings(max_examples=100)
def test_reliable_runs_are_all_flavors(seed, length):
    m = random_machine(seed, n_states=3, halting=0)
    hit = random_reliable_run(seed, m, length)
    if hit is None:
        return
    tau, run = hit
    for fl in (RELIABLE, LOSSY, IERR):
        assert validate_run(fl, m, tau, run.with_flavor(fl))
    assert reconstruct_reliable(m, tau, run.with_flavor(LOSSY), run.with_flavor(IERR)) == run


def test_reliable_uniqueness_small_exhaustive():
    for seed in range(40):
        m = random_machine(seed, n_states=3, halting=1)
        for tau, run in enumerate_runs(RELIABLE, m, 6, 6):
            assert run == run_reliable(m, tau)


def test_json_round_trips():
    m = random_machine(7)
    assert machine_from_json(json.loads(json.dumps(machine_to_json(m)))) == m
    tau = [(INC0, "q1"), (Op("test", 1), "q2")]
    assert tau_from_json(tau_to_json(tau)) == tau
    r = Run(IERR, [("q0", (0, 0)), ("q1", (2, 1))])
    assert run_from_json(run_to_json(r)) == r
