"""Count lossy and insertion-error runs per instruction sequence on random machines."""

import argparse
import random

from dmw.counter_machine import IERR, LOSSY, RELIABLE, enumerate_runs, reconstruct_reliable, run_reliable
from dmw.generators import random_machine


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--machines", type=int, default=20)
    ap.add_argument("--length", type=int, default=3)
    ap.add_argument("--cap", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    total = bad = 0
    for k in range(args.machines):
        m = random_machine(rng, n_states=3, halting=rng.choice([0, 1]))
        by = {fl: {} for fl in (LOSSY, IERR, RELIABLE)}
        for fl in by:
            for tau, run in enumerate_runs(fl, m, args.length, args.cap):
                by[fl].setdefault(tau, []).append(run)
        for tau in set(by[LOSSY]) & set(by[IERR]):
            rel = run_reliable(m, tau)
            for a in by[LOSSY][tau]:
                for b in by[IERR][tau]:
                    total += 1
                    bad += reconstruct_reliable(m, tau, a, b) != rel
        print(f"machine {k}: taus lossy={len(by[LOSSY])} ierr={len(by[IERR])} reliable={len(by[RELIABLE])}")
    print(f"pairs={total} mismatches={bad}")


if __name__ == "__main__":
    main()
