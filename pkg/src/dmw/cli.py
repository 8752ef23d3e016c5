"""Command-line front end.  JSON goes to stdout, diagnostics to stderr.

Exit codes: 0 success or a positive answer, 1 a negative answer (unsat, false,
no run), 2 usage or input error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import io
import json
import sys

from . import formula as F
from .counter_machine import (IERR, LOSSY, ReconstructionError, StepError, bounded_reachability,
                              first_invalid_step, machine_from_json, reconstruct_reliable, run_from_json,
                              run_reliable, run_to_json, simulate, tau_from_json, tau_to_json, validate_machine)
from .decider import SAT, UNKNOWN, UNSAT, brute_force_sat, decide_sat, filtrate, filtration_bounds, parse_logic
from .encodings import STYLES, EncodingStyle, encoding
from .frames import world_to_json
from .model_builders import BuildError, ExtractionError, build_finitary_model, extract_runs
from .semantics import BudgetExceeded, Evaluator, model_from_json, model_to_json

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}")


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise InputError(f"--{n.replace('_', '-')} is required for {args.cmd}")


def _formula(args):
    text = args.formula if args.formula is not None else getattr(args, "text", None)
    if text is None:
        raise InputError("a formula is required (--formula)")
    return F.parse(text)


def _emit(args, obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_default)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    out.write(text + "\n")


def _default(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o, key=str)
    if isinstance(o, tuple):
        return list(o)
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    return str(o)


def _machine(args):
    _need(args, "machine")
    m = machine_from_json(_load(args.machine))
    problems = validate_machine(m)
    if problems and args.cmd != "cm-validate":
        raise InputError("invalid machine: " + "; ".join(problems))
    return m


def _tau(args):
    _need(args, "tau")
    obj = _load(args.tau)
    return tau_from_json(obj["tau"] if isinstance(obj, dict) else obj)


def _run_file(path):
    return run_from_json(_load(path))


def _metrics_json(met):
    d = dataclasses.asdict(met)
    d["variables"] = sorted(met.variables)
    return d


def _sat_json(r):
    out = {"outcome": r.outcome, "exhaustive": r.exhaustive, "info": r.info}
    if r.bounds is not None:
        out["bounds"] = dataclasses.asdict(r.bounds) if dataclasses.is_dataclass(r.bounds) else r.bounds
    if r.model is not None:
        out["model"] = model_to_json(r.model, r.world)
    return out


# ---------------------------------------------------------------- commands

def cmd_parse(args, out, err):
    f = _formula(args)
    out.write(F.render(f) + "\n")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"formula": F.render(f), "ast": F.to_json(f)}, fh, indent=2)
    return OK


def cmd_mc(args, out, err):
    _need(args, "model")
    f = _formula(args)
    m, des = model_from_json(_load(args.model))
    ev = Evaluator(m)
    ts = ev.truth_set(f)
    res = {"formula": F.render(f), "truth_set": [world_to_json(w) for w in ts]}
    if des is not None:
        res["world"] = world_to_json(des)
        res["holds"] = ev.check_at(des, f)
    else:
        res["holds"] = len(ts) == len(m.frame.worlds)
        res["globally"] = True
    _emit(args, res, out)
    return OK if res["holds"] else NEGATIVE


def _decide(args, f):
    spec = parse_logic(args.logic)
    if args.mode == "brute":
        return brute_force_sat(f, spec, caps=(args.hcap, args.vcap), jobs=args.jobs)
    return decide_sat(f, spec, mode=args.mode, budget=args.hcap * 16 if args.mode == "budgeted" else 64)


def cmd_sat(args, out, err):
    r = _decide(args, _formula(args))
    _emit(args, _sat_json(r), out)
    return {SAT: OK, UNSAT: NEGATIVE, UNKNOWN: BUDGET}[r.outcome]


def cmd_valid(args, out, err):
    f = _formula(args)
    r = _decide(args, F.Not(f))
    res = _sat_json(r)
    res["valid"] = {SAT: False, UNSAT: True, UNKNOWN: None}[r.outcome]
    if r.model is not None:
        res["countermodel"] = res.pop("model")
    _emit(args, res, out)
    return {SAT: NEGATIVE, UNSAT: OK, UNKNOWN: BUDGET}[r.outcome]


def cmd_encode(args, out, err):
    m = _machine(args)
    style = EncodingStyle(args.style, q_fin=args.qfin, q_r=args.qr)
    f = encoding(m, style)
    met = F.metrics(f)
    _emit(args, {"style": args.style, "formula": F.render(f), "ast": F.to_json(f),
                 "metrics": _metrics_json(met)}, out)
    return OK


def cmd_cm_run(args, out, err):
    m = _machine(args)
    tau = _tau(args)
    configs, blocked = simulate(m, tau)
    if blocked:
        err.write(f"step {blocked} is disabled in configuration {configs[-1]}\n")
        _emit(args, {"blocked_at": blocked, "prefix": run_to_json(run_reliable(m, tau[:blocked - 1]))}, out)
        return NEGATIVE
    _emit(args, run_to_json(run_reliable(m, tau)), out)
    return OK


def cmd_cm_validate(args, out, err):
    m = _machine(args)
    problems = validate_machine(m)
    res = {"machine_ok": not problems, "problems": problems}
    ok = not problems
    if args.tau is not None:
        tau = _tau(args)
        for flavor, path in ((LOSSY, args.lossy), (IERR, args.ierr)):
            if path is not None:
                bad = first_invalid_step(flavor, m, tau, _run_file(path))
                res[flavor] = {"valid": bad is None, "first_invalid_step": bad}
                ok = ok and bad is None
    _emit(args, res, out)
    return OK if ok else NEGATIVE


def cmd_cm_approx(args, out, err):
    m = _machine(args)
    tau = _tau(args)
    _need(args, "lossy", "ierr")
    try:
        run = reconstruct_reliable(m, tau, _run_file(args.lossy), _run_file(args.ierr))
    except ReconstructionError as e:
        err.write(f"reconstruction failed: {e}\n")
        return NEGATIVE
    _emit(args, run_to_json(run), out)
    return OK


def cmd_cm_reach(args, out, err):
    m = _machine(args)
    _need(args, "qfin")
    hit = bounded_reachability(m, args.qfin, args.steps)
    if hit is None:
        err.write(f"{args.qfin} not reached within {args.steps} steps\n")
        return NEGATIVE
    tau, run = hit
    _emit(args, {"tau": tau_to_json(tau), "run": run_to_json(run)}, out)
    return OK


def cmd_build_model(args, out, err):
    m = _machine(args)
    tau = _tau(args)
    run = run_reliable(m, tau)
    if run is None:
        raise InputError("tau has no reliable run")
    q_fin = args.qfin or run.configs[-1].state
    model, des = build_finitary_model(m, tau, run, q_fin)
    ok = Evaluator(model).check_at(des, encoding(m, EncodingStyle("finitary", q_fin=q_fin)))
    res = model_to_json(model, des)
    res["report"] = {"q_fin": q_fin, "worlds": len(model.frame.worlds), "encoding_holds": ok}
    _emit(args, res, out)
    return OK if ok else NEGATIVE


def cmd_extract(args, out, err):
    m = _machine(args)
    _need(args, "model")
    model, des = model_from_json(_load(args.model))
    if des is None:
        raise InputError("model has no designated world")
    ex = extract_runs(model, m, des, q_fin=args.qfin, check=args.qfin is not None)
    _emit(args, {"tau": tau_to_json(ex.tau), "lossy": run_to_json(ex.lossy), "ierr": run_to_json(ex.ierr),
                 "columns": [world_to_json(c) for c in ex.columns],
                 "ambiguities": [[n, tau_to_json(c)] for n, c in ex.ambiguities]}, out)
    return OK


def cmd_filtrate(args, out, err):
    _need(args, "model")
    f = _formula(args)
    model, des = model_from_json(_load(args.model))
    if des is None:
        raise InputError("model has no designated world (the filtration root)")
    if model.frame.factors is None:
        raise InputError("filtration needs a product model (factors missing)")
    spec = parse_logic(args.logic)
    res = filtrate(model, des, f, serial_h=spec.h_serial, serial_v=spec.v_serial)
    fm = res.model
    before = Evaluator(model).check_at(des, f)
    after = Evaluator(fm).check_at(des, f)
    b = filtration_bounds(f, spec)
    obj = model_to_json(fm, des)
    obj["report"] = {
        "truth_before": before, "truth_after": after,
        "horizontal_worlds": len(fm.frame.factors[0].worlds), "vertical_worlds": len(fm.frame.factors[1].worlds),
        "vertical_layer_sizes": [len(x) for x in res.v_layers], "horizontal_layer_sizes": [len(x) for x in res.h_layers],
        "bounds": dataclasses.asdict(b),
    }
    _emit(args, obj, out)
    return OK if before == after else NEGATIVE


def cmd_demo(args, out, err):
    """machine -> encode -> build-model -> mc -> extract -> cm-approx -> compare with cm-run."""
    m = _machine(args)
    checks = {}
    if args.tau is not None:
        tau = _tau(args)
        run = run_reliable(m, tau)
        if run is None:
            raise InputError("tau has no reliable run")
        q_fin = args.qfin or run.configs[-1].state
    else:
        q_fin = args.qfin or sorted(m.halting)[0]
        hit = bounded_reachability(m, q_fin, args.steps)
        if hit is None:
            err.write(f"{q_fin} not reached within {args.steps} steps\n")
            return NEGATIVE
        tau, run = hit
    style = EncodingStyle("finitary", q_fin=q_fin)
    enc = encoding(m, style)
    model, des = build_finitary_model(m, tau, run, q_fin)
    checks["model_checks"] = Evaluator(model).check_at(des, enc)
    # JSON round trip, as the separate subcommands would see it
    model2, des2 = model_from_json(json.loads(json.dumps(model_to_json(model, des))))
    ex = extract_runs(model2, m, des2, q_fin=q_fin)
    # a step may differ only where several instructions were readable at once
    amb = dict(ex.ambiguities)
    checks["tau_recovered"] = len(ex.tau) == len(tau) and all(
        a == b or b in amb.get(n, ()) for n, (a, b) in enumerate(zip(ex.tau, tau), 1))
    approx = reconstruct_reliable(m, ex.tau, ex.lossy, ex.ierr)
    checks["approx_equals_run"] = approx.configs == run.configs
    ok = all(checks.values())
    _emit(args, {"q_fin": q_fin, "tau": tau_to_json(tau), "run": run_to_json(run),
                 "encoding_metrics": _metrics_json(F.metrics(enc)), "worlds": len(model.frame.worlds),
                 "reconstructed": run_to_json(approx), "checks": checks, "ok": ok}, out)
    for k, v in checks.items():
        err.write(f"{'ok ' if v else 'FAIL'} {k}\n")
    return OK if ok else NEGATIVE


COMMANDS = {
    "parse": cmd_parse, "mc": cmd_mc, "sat": cmd_sat, "valid": cmd_valid, "encode": cmd_encode,
    "cm-run": cmd_cm_run, "cm-validate": cmd_cm_validate, "cm-approx": cmd_cm_approx, "cm-reach": cmd_cm_reach,
    "build-model": cmd_build_model, "extract": cmd_extract, "filtrate": cmd_filtrate, "demo": cmd_demo,
}


def build_parser():
    p = argparse.ArgumentParser(prog="dmw", description="delta-product modal logic toolkit")
    p.add_argument("cmd", choices=sorted(COMMANDS))
    p.add_argument("text", nargs="?", help="formula text (parse, mc, sat, valid)")
    p.add_argument("--formula")
    p.add_argument("--model")
    p.add_argument("--machine")
    p.add_argument("--tau")
    p.add_argument("--lossy")
    p.add_argument("--ierr")
    p.add_argument("--qfin")
    p.add_argument("--qr")
    p.add_argument("--style", choices=STYLES, default="finitary")
    p.add_argument("--logic", default="KxAlt:1")
    p.add_argument("--mode", choices=("exhaustive", "budgeted", "brute"), default="exhaustive")
    p.add_argument("--hcap", type=int, default=3)
    p.add_argument("--vcap", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--steps", type=int, default=20, help="step bound for cm-reach and demo")
    p.add_argument("--out")
    return p


def run(argv, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    with contextlib.redirect_stderr(err):
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else USAGE
    try:
        return COMMANDS[args.cmd](args, out, err)
    except BudgetExceeded as e:
        err.write(f"budget exhausted: {e}\n")
        return BUDGET
    except (InputError, F.ParseError, StepError, BuildError, ExtractionError, ValueError, KeyError) as e:
        err.write(f"error: {e}\n")
        return USAGE


def run_command(argv, stdin=b""):
    """Run one invocation in-process; returns (exit code, stdout bytes, stderr bytes)."""
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdin
    sys.stdin = io.StringIO(stdin.decode() if isinstance(stdin, bytes) else stdin)
    try:
        code = run(list(argv), out=out, err=err)
    finally:
        sys.stdin = old
    return code, out.getvalue().encode(), err.getvalue().encode()


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
