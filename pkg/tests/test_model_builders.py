import pytest
from hypothesis import assume, given, settings, strategies as st

from dmw import formula as F
from dmw.counter_machine import CounterMachine, Op, reconstruct_reliable, run_reliable
from dmw.encodings import FINITARY, FORWARD, LINEAR, EncodingStyle, encoding, global_reduction
from dmw.frames import diag_uniqueness, is_rooted
from dmw.generators import random_machine, random_product_model, random_reliable_run
from dmw.model_builders import (BuildError, ExtractionError, build_faulty_valuations, build_finitary_model,
                                build_grid_model, build_linear_model, check_counting_claims,
                                check_linear_valuation_claims, extract_runs, spy_reduction_model)
from dmw.semantics import Evaluator, Model, check_at

INC0, DEC0 = Op("inc", 0), Op("dec", 0)


def machine(instr, states=("q0", "q1", "q2", "qf")):
    return CounterMachine(states, "q0", ["qf"], 2, instr)


def test_faulty_valuation_examples():
    m = machine({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q2")], "q2": [("inc", 0, "qf")]})
    tau = [(INC0, "q1")]
    fv = build_faulty_valuations(m, tau, run_reliable(m, tau))
    assert fv.get("Cl", 1, 0) == {0}
    tau = [(INC0, "q1"), (DEC0, "q2")]
    fv = build_faulty_valuations(m, tau, run_reliable(m, tau))
    assert fv.lambdas[0] == [1] and fv.xis[0] == [0]
    assert fv.get("Ce", 1, 0) == {1}
    assert fv.get("Ce", 2, 0) == frozenset()
    assert fv.get("Cl", 2, 0) == frozenset()


def test_all_test_steps_give_empty_sets():
    m = machine({"q0": [("test", 0, "q1")], "q1": [("test", 1, "q2")], "q2": [("test", 0, "qf")]})
    tau = [(Op("test", 0), "q1"), (Op("test", 1), "q2"), (Op("test", 0), "qf")]
    for style, names in ((FORWARD, ("Cl", "Ce")), (LINEAR, ("Inl", "Outl", "Ine", "Oute"))):
        fv = build_faulty_valuations(m, tau, run_reliable(m, tau), style)
        assert all(not s for k in names for row in fv.sets[k] for s in row)


def test_faulty_valuations_reject_wrong_run():
    m = machine({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q2")], "q2": [("inc", 0, "qf")]})
    with pytest.raises(BuildError):
        build_faulty_valuations(m, [(DEC0, "q2")], None)


def test_finitary_model_single_inc():
    m = CounterMachine(["q0", "qf"], "q0", ["qf"], 2, {"q0": [("inc", 0, "qf")]})
    tau = [(INC0, "qf")]
    model, des = build_finitary_model(m, tau, run_reliable(m, tau), "qf")
    k = 1
    assert len(model.frame.worlds) == (k + 2) * (k + 1)
    assert check_at(model, des, encoding(m, EncodingStyle(FINITARY, q_fin="qf")))
    assert des == (k + 1, 0)
    assert diag_uniqueness(model.frame) and is_rooted(model.frame) is not None


def test_finitary_model_single_test_has_no_counter_points():
    m = CounterMachine(["q0", "qf"], "q0", ["qf"], 2, {"q0": [("test", 0, "qf")]})
    tau = [(Op("test", 0), "qf")]
    model, des = build_finitary_model(m, tau, run_reliable(m, tau), "qf")
    assert all(not model.valuation[n] for n in ("Cl_0", "Cl_1", "Ce_0", "Ce_1"))
    ex = extract_runs(model, m, des, q_fin="qf")
    assert all(c.counters == (0, 0) for c in ex.lossy.configs + ex.ierr.configs)


def test_finitary_model_rejects_wrong_final_state():
    m = machine({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q2")], "q2": [("inc", 0, "qf")]})
    tau = [(INC0, "q1")]
    with pytest.raises(BuildError):
        build_finitary_model(m, tau, run_reliable(m, tau), "qf")


def test_finitary_model_with_running_final_state():
    # q_fin not halting: a junk column discharges its step obligation
    m = machine({"q0": [("inc", 0, "q1")], "q1": [("dec", 0, "q2")], "q2": [("inc", 0, "qf")]})
    tau = [(INC0, "q1")]
    model, des = build_finitary_model(m, tau, run_reliable(m, tau), "q1")
    ex = extract_runs(model, m, des, q_fin="q1")
    assert ex.tau == tau


@given(st.integers(0, 100_000), st.integers(1, 6))
@settings(max_examples=60)
def test_round_trip_random_runs(seed, length):
    m = random_machine(seed, n_states=3, halting=1)
    hit = random_reliable_run(seed, m, length)
    assume(hit is not None)
    tau, run = hit
    q_fin = run.configs[-1].state
    try:
        model, des = build_finitary_model(m, tau, run, q_fin)
    except BuildError as e:
        # only allowed when the final running state has nothing enabled to discharge
        assert "discharged" in str(e)
        return
    assert diag_uniqueness(model.frame) and is_rooted(model.frame) is not None
    ex = extract_runs(model, m, des, q_fin=q_fin)
    # a differing step must be one where several disjuncts held at once
    amb = {n: cands for n, cands in ex.ambiguities}
    for n, (a, b) in enumerate(zip(ex.tau, tau), 1):
        assert a == b or (n in amb and b in amb[n])
    assert reconstruct_reliable(m, ex.tau, ex.lossy, ex.ierr).configs == run.configs
    if not ex.ambiguities:
        assert ex.tau == list(tau)
    # the decrement key fact: at a decrement of i in step n+1, n is in the insertion-error set
    fv = build_faulty_valuations(m, tau, run)
    for n, (op, _) in enumerate(tau):
        if op.kind == "dec":
            assert n in fv.get("Ce", n, op.counter)


def test_corrupted_model_reports_failing_step():
    m = machine({"q0": [("inc", 0, "q1")], "q1": [("inc", 0, "q2")], "q2": [("dec", 0, "qf")]})
    tau = [(INC0, "q1"), (INC0, "q2"), (DEC0, "qf")]
    model, des = build_finitary_model(m, tau, run_reliable(m, tau), "qf")
    val = {k: set(v) for k, v in model.valuation.items()}
    val["Cl_0"].discard((1, 0))     # lose the point added by the first increment
    val["Cl_0"].add((3, 2))          # ... and add a point the decrement cannot explain
    bad = Model(model.frame, val)
    with pytest.raises(ExtractionError):
        extract_runs(bad, m, des, q_fin="qf")
    with pytest.raises(ExtractionError) as e:
        extract_runs(bad, m, des, columns=[0, 1, 2, 3], check=False)
    assert e.value.step is not None and e.value.step >= 1


def test_counting_claims_on_example():
    m = machine({"q0": [("inc", 0, "q1")], "q1": [("inc", 1, "q2")], "q2": [("dec", 0, "qf")]})
    tau = [(INC0, "q1"), (Op("inc", 1), "q2"), (DEC0, "qf")]
    run = run_reliable(m, tau)
    g, _, cols = build_grid_model(m, tau, run)
    bad, fired = check_counting_claims(g, cols, m, FORWARD)
    assert bad == [] and fired > 0
    lm, _, lcols = build_linear_model(m, tau, run)
    bad, fired = check_counting_claims(lm, lcols, m, LINEAR, upto=len(tau))
    assert bad == [] and fired > 0
    assert check_linear_valuation_claims(build_faulty_valuations(m, tau, run, LINEAR), tau) == []


def test_spy_reduction_model():
    import random
    rng = random.Random(5)
    phi, psi = F.parse("[h]P -> [v]P"), F.parse("P")
    done = 0
    while done < 5:
        m = random_product_model(rng, 3, 3, variables=("P",))
        ev = Evaluator(m)
        if ev.extension(phi) != ev.full or ev.extension(psi) == ev.full:
            continue
        out, root = spy_reduction_model(m)
        f = F.conj([F.parse("[h]<v> diag & [h][h]<v> diag & [v]<h> diag & [v][v]<h> diag"),
                    F.BoxH(F.BoxV(phi)), F.DiaH(F.DiaV(F.Not(psi)))])
        assert check_at(out, root, f)
        # so the reduction formula is refuted at the spy
        assert not check_at(out, root, global_reduction(phi, psi))
        done += 1
