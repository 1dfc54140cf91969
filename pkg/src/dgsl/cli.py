"""Command-line entry point: ``dgsl <subcommand> ...``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .constraints import read_constraints, write_constraints
from .errors import ConfigError, DataError, NumericalError
from .evaluation import accuracy, kmeans, nmi, normalize_columns
from .experiment import (
    SWEEPABLE,
    ExperimentSpec,
    base_affinity,
    distance_matrix,
    emit_trace,
    make_constraints,
    run_experiment,
    run_sweep,
)
from .graph import knn_affinity
from .hypergraph import hybrid_affinity, hypergraph_O, read_hyperedges
from .io import coerce, load_dataset, read_config, read_labels, write_labels, write_matrix
from .selfrep import selfrep_affinity
from .solver import SolverConfig, fit

log = logging.getLogger("dgsl")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--k", type=int, help="embedding dimension / cluster count (default: #classes)")
    g.add_argument("--lam", type=float)
    g.add_argument("--lam-z", type=str, help="value or comma list (experiment sweeps)")
    g.add_argument("--lam-m", type=str)
    g.add_argument("--tau", type=str)
    g.add_argument("--alpha2-ratio", type=str)
    g.add_argument("--m", type=int, help="kNN neighbours")
    g.add_argument("--l", type=int, help="bandwidth neighbour rank")
    g.add_argument("--eta", type=int)
    g.add_argument("--T", type=int)
    g.add_argument("--tol-outer", type=float)
    g.add_argument("--tol-inner", type=float)
    g.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None)


def _add_protocol_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("constraints")
    g.add_argument("--protocol", choices=["setting1", "setting2", "incomplete", "file"])
    g.add_argument("--f", type=int)
    g.add_argument("--n-ml", type=int)
    g.add_argument("--cl-ratio", type=float)
    g.add_argument("--class-fraction", type=float)
    g.add_argument("--constraints", help="constraints file (ml i j / cl i j)")
    g.add_argument("--seed", type=int)


def _merged(args, config_path) -> dict:
    values = read_config(config_path) if config_path else {}
    for key, val in vars(args).items():
        if val is not None and key not in ("cmd", "config", "func"):
            values[key] = val
    return values


def _split(value) -> list[float]:
    return [float(v) for v in str(value).split(",") if v.strip()]


def _solver_config(values: dict, truth=None, sweep: bool = False):
    """Build a SolverConfig; list-valued sweepable keys are returned separately."""
    values = dict(values)
    grid = {}
    for key in SWEEPABLE:
        if key in values:
            items = _split(values[key])
            if len(items) > 1:
                if not sweep:
                    raise ConfigError(f"{key} takes a single value here")
                grid[key] = items
                del values[key]
            else:
                values[key] = str(items[0])
    if "k" not in values and truth is not None:
        values["k"] = str(len(np.unique(truth)))
    cfg = SolverConfig(**coerce(SolverConfig, {k: str(v) for k, v in values.items()}))
    return cfg, grid


def cmd_fit(args) -> int:
    values = _merged(args, args.config)
    if not values.get("features"):
        raise ConfigError("fit needs --features")
    spec = ExperimentSpec(**coerce(ExperimentSpec, {k: str(v) for k, v in values.items()}))
    data = load_dataset(spec.features, spec.labels or None, div255=spec.div255)
    cfg, _ = _solver_config(values, data.truth)
    if spec.constraints and values.get("protocol") in (None, "file"):
        cs = read_constraints(spec.constraints, data.X.shape[1])
    elif data.truth is None:
        raise ConfigError("generating constraints needs --labels (or pass --constraints)")
    else:
        cs = make_constraints(spec, data.truth, spec.seed)
    W = base_affinity(data.X, cfg, spec.hyperedges, spec.gamma2)
    out = Path(values.get("output") or "fit_out")
    snaps = {int(s) for s in str(values.get("snapshots") or "").split(",") if s.strip()}

    def snapshot(t, A, Z, H):
        if t in snaps:
            write_matrix(np.abs(Z), out / f"abs_z_iter{t}.csv")
            write_matrix(distance_matrix(H), out / f"distance_iter{t}.csv")

    out.mkdir(parents=True, exist_ok=True)
    result = fit(data.X, cs, cfg, W=W, callback=snapshot)
    emit_trace(result, out)
    write_matrix(result.H.T, out / "embedding.csv")
    pred = kmeans(normalize_columns(result.H), cfg.k, restarts=spec.restarts, seed=spec.seed)
    write_labels(pred, out / "pred.txt")
    report = {"iterations": result.iterations_run, "alpha1": result.alpha1,
              "alpha2": result.alpha2, "final_objective": result.objective_trace[-1]}
    if data.truth is not None:
        report.update(acc=accuracy(pred, data.truth), nmi=nmi(pred, data.truth))
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_experiment(args) -> int:
    values = _merged(args, args.config)
    spec = ExperimentSpec(**coerce(ExperimentSpec, {k: str(v) for k, v in values.items()}))
    spec.validate()
    data = load_dataset(spec.features, spec.labels, div255=spec.div255)
    cfg, grid = _solver_config(values, data.truth, sweep=True)
    if grid:
        rows = run_sweep(spec, cfg, grid, data=data)
        print(json.dumps(rows, sort_keys=True))
    else:
        summary = run_experiment(spec, cfg, data=data)
        print(json.dumps({k: summary[k] for k in ("trials", "acc_mean", "acc_std", "nmi_mean", "nmi_std")},
                         sort_keys=True))
    return 0


def cmd_gen_constraints(args) -> int:
    values = _merged(args, None)
    truth = read_labels(args.labels)
    spec = ExperimentSpec(**coerce(ExperimentSpec, {k: str(v) for k, v in values.items()}))
    if spec.protocol == "file":
        raise ConfigError("gen-constraints needs a generating protocol")
    cs = make_constraints(spec, truth, spec.seed)
    write_constraints(cs, args.output)
    print(json.dumps({"must_links": len(cs.must_links), "cannot_links": len(cs.cannot_links)}))
    return 0


def cmd_affinity(args) -> int:
    data = load_dataset(args.features, div255=args.div255)
    if args.kind == "knn":
        S = knn_affinity(data.X, args.m, args.l)
    else:
        S = selfrep_affinity(data.X, args.lam, args.lam_z, args.iters)
    write_matrix(S, args.output)
    return 0


def cmd_hypergraph(args) -> int:
    hg = read_hyperedges(args.hyperedges, args.n_vertices)
    O = hypergraph_O(hg)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(O, out / "O.csv")
    write_matrix(np.eye(hg.n_vertices) - O, out / "laplacian.csv")
    if args.features:
        data = load_dataset(args.features)
        W = knn_affinity(data.X, args.m, args.l)
        write_matrix(hybrid_affinity(W, O, args.gamma2), out / "hybrid_affinity.csv")
    return 0


def cmd_metrics(args) -> int:
    pred, truth = read_labels(args.pred), read_labels(args.truth)
    if len(pred) != len(truth):
        raise DataError(f"{len(pred)} predictions for {len(truth)} labels")
    print(json.dumps({"acc": accuracy(pred, truth), "nmi": nmi(pred, truth)}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dgsl", description="Semi-supervised clustering by dynamic graph structure learning")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit one constraint set and cluster")
    p.add_argument("--config")
    p.add_argument("--features")
    p.add_argument("--labels")
    p.add_argument("--div255", action="store_true", default=None)
    p.add_argument("--hyperedges")
    p.add_argument("--gamma2", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--snapshots", help="comma list of iterations to dump |Z| and distances for")
    p.add_argument("--output", "-o")
    _add_protocol_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("experiment", help="repeated seeded trials (and parameter sweeps)")
    p.add_argument("--config")
    p.add_argument("--features")
    p.add_argument("--labels")
    p.add_argument("--div255", action="store_true", default=None)
    p.add_argument("--hyperedges")
    p.add_argument("--gamma2", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--output", "-o")
    _add_protocol_flags(p)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gen-constraints", help="write a constraints file from labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--output", "-o", required=True)
    _add_protocol_flags(p)
    p.set_defaults(func=cmd_gen_constraints)

    p = sub.add_parser("affinity", help="export a kNN or self-representation affinity")
    p.add_argument("--features", required=True)
    p.add_argument("--kind", choices=["knn", "selfrep"], default="knn")
    p.add_argument("--m", type=int, default=7)
    p.add_argument("--l", type=int, default=5)
    p.add_argument("--lam", type=float, default=100.0)
    p.add_argument("--lam-z", type=float, default=0.5)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--div255", action="store_true")
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_affinity)

    p = sub.add_parser("hypergraph", help="export hypergraph O and its Laplacian")
    p.add_argument("--hyperedges", required=True)
    p.add_argument("--n-vertices", type=int)
    p.add_argument("--features", help="also write W + gamma2 O for these points")
    p.add_argument("--gamma2", type=float, default=1.0)
    p.add_argument("--m", type=int, default=7)
    p.add_argument("--l", type=int, default=5)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_hypergraph)

    p = sub.add_parser("metrics", help="ACC and NMI of a predicted labeling")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"dgsl: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"dgsl: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, ValueError, OSError, KeyError) as exc:
        print(f"dgsl: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
