#!/usr/bin/env python3
"""Final error of the agnostic tester-learner across adversarial noise budgets.

Runs both adversaries (uniform flips and boundary-concentrated flips) at each
opt level and reports the achieved holdout error next to opt itself.
"""

import argparse
import json

import numpy as np

from halflearn.core import RngSeed, project_to_sphere
from halflearn.datagen import MarginalSpec, NoiseSpec, apply_noise, sample_marginal
from halflearn.pipeline import AgnosticConfig, learn_agnostic
from halflearn.testers import standard_gaussian_target


def run(kind, opt, d, n_train, n_hold, epsilon, seed):
    root = RngSeed(seed)
    w_star = project_to_sphere(root.generator(99).standard_normal(d))
    spec = MarginalSpec("standard_gaussian", d)
    noise = NoiseSpec(kind, w_star, opt=opt)
    train = apply_noise(sample_marginal(spec, n_train, root.child(0)), noise, root.child(1))
    hold = apply_noise(sample_marginal(spec, n_hold, root.child(2)), noise, root.child(3))
    cfg = AgnosticConfig(epsilon=epsilon, delta=0.05, mode="gaussian", seed=root.child(4))
    res = learn_agnostic(train, hold, cfg, standard_gaussian_target())
    return None if res.rejected else res.empirical_error


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--n-train", type=int, default=200_000)
    ap.add_argument("--n-hold", type=int, default=50_000)
    ap.add_argument("--epsilon", type=float, default=0.05)
    ap.add_argument("--opts", type=str, default="0.0,0.02,0.05,0.1")
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--seed-base", type=int, default=18000)
    ap.add_argument("--out", type=str, default="agnostic_experiment.json")
    args = ap.parse_args()

    rows = []
    for kind in ("agnostic_random", "agnostic_boundary"):
        for opt in (float(v) for v in args.opts.split(",")):
            errs = []
            rejects = 0
            for s in range(args.seeds):
                err = run(kind, opt, args.d, args.n_train, args.n_hold, args.epsilon, args.seed_base + s)
                if err is None:
                    rejects += 1
                else:
                    errs.append(err)
            row = {
                "adversary": kind,
                "opt": opt,
                "accepted": len(errs),
                "rejected": rejects,
                "mean_error": float(np.mean(errs)) if errs else None,
                "max_error": float(np.max(errs)) if errs else None,
            }
            rows.append(row)
            print(f"{kind:18s} opt={opt:.2f}  accepted {row['accepted']}/{args.seeds}  "
                  f"mean err {row['mean_error']}  max {row['max_error']}")
    with open(args.out, "w") as fh:
        json.dump({"config": vars(args), "rows": rows}, fh, indent=2)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
