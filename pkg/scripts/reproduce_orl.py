"""Grid reproduction on a user-supplied face dataset (e.g. ORL as CSV + labels).

Sweeps tau and lam_z over the default grids with setting-1 constraints and
writes one sub-directory per grid point plus sweep.json.
"""
import argparse
import json

from dgsl.experiment import ExperimentSpec, run_sweep
from dgsl.io import load_dataset
from dgsl.solver import SolverConfig

TAU_GRID = [0.01, 0.05, 0.1, 0.2, 0.3]
LAMZ_GRID = [0.0, 0.5, 1.0, 1.5, 2.0]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("features")
    ap.add_argument("labels")
    ap.add_argument("--f", type=int, default=2)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--lam-m", type=float, default=10.0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--no-div255", action="store_true")
    ap.add_argument("--output", default="results/orl")
    args = ap.parse_args()

    spec = ExperimentSpec(features=args.features, labels=args.labels, f=args.f,
                          trials=args.trials, output=args.output, jobs=args.jobs,
                          div255=not args.no_div255)
    data = load_dataset(args.features, args.labels, div255=spec.div255)
    cfg = SolverConfig(k=len(set(data.truth.tolist())), lam_m=args.lam_m)
    rows = run_sweep(spec, cfg, {"tau": TAU_GRID, "lam_z": LAMZ_GRID}, data=data)
    best = max(rows, key=lambda r: r["acc_mean"])
    print(json.dumps({"best": best, "points": len(rows)}, indent=2))


if __name__ == "__main__":
    main()
