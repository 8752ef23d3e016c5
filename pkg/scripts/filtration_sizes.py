"""Filtrate random product models and compare layer sizes with the computed bounds."""

import argparse
import json
import random

from dmw.decider import filtrate, filtration_bounds, parse_logic
from dmw.generators import random_formula, random_product_model
from dmw.semantics import check_at


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--hmax", type=int, default=12)
    ap.add_argument("--vmax", type=int, default=8)
    ap.add_argument("--prune", action="store_true", help="apply the depth-budget pruning")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    rows = []
    for _ in range(args.models):
        n = rng.choice([1, 2])
        m = random_product_model(rng, rng.randint(1, args.hmax), rng.randint(1, args.vmax), n=n)
        f = random_formula(rng, size=rng.randint(2, 10), hd=2, vd=2)
        root = (m.frame.factors[0].worlds[0], m.frame.factors[1].worlds[0])
        res = filtrate(m, root, f, prune=args.prune)
        b = filtration_bounds(f, parse_logic(f"KxAlt:{n}"))
        rows.append({
            "n": n, "hd": b.hd, "vd": b.vd, "sub": b.sub,
            "truth_kept": check_at(res.model, root, f) == check_at(m, root, f),
            "h_layers": [len(x) for x in res.h_layers], "h_bound": list(b.horizontal_layers),
            "h_bound_uncorrected": list(b.literal_horizontal_layers),
            "v_layers": [len(x) for x in res.v_layers], "v_bound": list(b.vertical_layers_loose),
        })
    over = sum(any(a > c for a, c in zip(r["h_layers"], r["h_bound_uncorrected"])) for r in rows)
    print(json.dumps({"models": len(rows), "truth_kept": all(r["truth_kept"] for r in rows),
                      "above_uncorrected_bound": over, "rows": rows}, indent=1))


if __name__ == "__main__":
    main()
