"""Objective trace and step norms of the unnormalized scheme; optional CSV dump."""
import argparse

import numpy as np

from dgsl.constraints import gen_constraints_setting1
from dgsl.experiment import write_fit_trace
from dgsl.solver import SolverConfig, fit
from dgsl.synthetic import make_blobs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--std", type=float, default=1.0)
    ap.add_argument("--offset", type=float, default=10.0)
    ap.add_argument("--lam-z", type=float, default=0.5)
    ap.add_argument("--T", type=int, default=50)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--trace-dir", help="write trace_<seed>.csv files here")
    args = ap.parse_args()

    cfg = SolverConfig(k=3, T=args.T, lam_z=args.lam_z, normalize=False, tol_outer=0.0)
    for seed in range(args.seeds):
        X, y = make_blobs(args.n, std=args.std, offset=args.offset, seed=seed)
        res = fit(X, gen_constraints_setting1(y, 3, seed), cfg)
        f = np.array(res.objective_trace)
        steps = np.array(res.step_norms)
        slack = f[1:] - (f[:-1] - 0.5 * cfg.lam * (steps[1:] ** 2).sum(axis=1))
        print(f"seed {seed}: f {f[0]:.6g} -> {f[-1]:.6g}, worst descent slack {slack.max():.2e}, "
              f"final dA {steps[-1, 0]:.2e} dZ {steps[-1, 1]:.2e}, nnz(Z) {np.count_nonzero(res.Z)}")
        if args.trace_dir:
            write_fit_trace(res, f"{args.trace_dir}/trace_{seed}.csv")


if __name__ == "__main__":
    main()
