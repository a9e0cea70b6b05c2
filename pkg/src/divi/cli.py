"""Command-line harness.

Subcommands: gen (synthetic datasets), fit (train on a CSV), baseline
(k-means / diagonal GMM), eval (metrics for a saved model), bench (batch
seed x method runs), sweep (sensitivity sweeps), scaling (epoch-time CSV
for the runtime-shape experiments).  ``bench``/``sweep`` accept a JSON
config file; flags override file values.  Exit code is nonzero when any
run fails.
"""

import argparse
import json
import sys

import numpy as np

from .baselines import diag_gmm_fit, kmeans_fit
from .bench import ExperimentConfig, run_benchmark, run_sweep, scaling_table
from .datagen import gen_correlated, gen_heavy_tailed, gen_matched, standardize
from .io import load_model, read_dataset, save_model, write_dataset, write_rows
from .metrics import (
    active_dimensions,
    adjusted_rand_index,
    feature_f1,
    normalized_mutual_info,
)
from .model import PriorMode
from .prior import build_prior
from .trainer import TrainConfig, fit, hard_assignments

MODES = {"info": PriorMode.INFORMATIVE,
         "noninfo": PriorMode.NONINFORMATIVE,
         "random": PriorMode.RANDOM}


def _parse_seeds(text):
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi)))
    return [int(v) for v in text.split(",")]


def _parse_values(text):
    return [float(v) for v in text.split(",")]


def _train_overrides(args):
    out = {}
    for name in ("epochs", "t_split", "tau_mult", "beta_mult", "lr", "t0",
                 "t_min", "gamma", "sigma_split", "k_max"):
        val = getattr(args, name, None)
        if val is not None:
            out[name] = val
    return out


def _add_train_flags(p):
    p.add_argument("--epochs", type=int)
    p.add_argument("--t-split", dest="t_split", type=int)
    p.add_argument("--tau-mult", dest="tau_mult", type=float)
    p.add_argument("--beta-mult", dest="beta_mult", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sigma-split", dest="sigma_split", type=float)
    p.add_argument("--k-max", dest="k_max", type=int)


def cmd_gen(args):
    if args.scenario == "matched":
        data = gen_matched(args.n, args.d, args.seed)
    elif args.scenario == "heavy_tailed":
        data = gen_heavy_tailed(args.n, args.d, args.seed)
    elif args.scenario == "correlated":
        data = gen_correlated(args.n, args.d, args.seed,
                              rho=args.rho, block=args.block)
    else:
        raise SystemExit(f"unknown scenario {args.scenario}")
    write_dataset(data, args.out)
    print(f"wrote {data.n}x{data.d} {args.scenario} dataset to {args.out}")
    return 0


def cmd_fit(args):
    raw = read_dataset(args.data)
    data = standardize(raw)
    prior = build_prior(data, MODES[args.mode], seed=args.seed)
    config = TrainConfig(seed=args.seed, **_train_overrides(args))
    result = fit(data, prior, config)
    if args.out:
        save_model(result, args.out)
    _, active = active_dimensions(result.gate_probs)
    line = f"final_k={result.final_k} splits={len(result.split_events)} active_dims={active}"
    if raw.labels is not None:
        line += f" ari={adjusted_rand_index(result.labels, raw.labels):.4f}"
    print(line)
    return 0


def cmd_baseline(args):
    raw = read_dataset(args.data)
    data = standardize(raw)
    if args.method == "kmeans":
        res = kmeans_fit(data.x, args.k, restarts=args.restarts or 10, seed=args.seed)
    else:
        res = diag_gmm_fit(data.x, args.k, restarts=args.restarts or 5, seed=args.seed)
    line = f"method={args.method} k={args.k} iterations={res.n_iter}"
    if raw.labels is not None:
        line += f" ari={adjusted_rand_index(res.labels, raw.labels):.4f}"
    print(line)
    if args.out:
        np.savetxt(args.out, res.labels, fmt="%d")
    return 0


def cmd_eval(args):
    raw = read_dataset(args.data)
    data = standardize(raw)
    snapshot = load_model(args.model)
    labels = hard_assignments(data.x, snapshot.params)
    mask, active = active_dimensions(snapshot.gate_probs)
    row = {"final_k": snapshot.final_k, "active_dims": active}
    if raw.labels is not None:
        row["ari"] = adjusted_rand_index(labels, raw.labels)
        row["nmi"] = normalized_mutual_info(labels, raw.labels)
    if raw.informative_mask is not None:
        row["feature_f1"] = feature_f1(mask, raw.informative_mask)
    if args.out:
        write_rows(args.out, list(row.keys()), [list(row.values())])
    print(" ".join(f"{k}={v}" for k, v in row.items()))
    return 0


def _config_from(args, sweep=False):
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    if args.scenario:
        base["scenario"] = args.scenario
    if args.n:
        base["n"] = args.n
    if args.d:
        base["d"] = args.d
    if args.seeds:
        base["seeds"] = _parse_seeds(args.seeds)
    if getattr(args, "methods", None):
        base["methods"] = args.methods.split(",")
    if args.out:
        base["out"] = args.out
    if args.jobs:
        base["jobs"] = args.jobs
    if getattr(args, "data", None):
        base["data_csv"] = args.data
        base["scenario"] = "csv"
    overrides = _train_overrides(args)
    if overrides:
        base.setdefault("train", {}).update(overrides)
    if sweep:
        if args.axis:
            base["sweep_axis"] = args.axis
        if args.values:
            base["sweep_values"] = _parse_values(args.values)
    return ExperimentConfig(**base)


def cmd_bench(args):
    config = _config_from(args)
    rows, summary = run_benchmark(config)
    failed = [r for r in rows if r.error]
    for rec in summary:
        print("summary:", dict(zip(["scenario", "method", "n", "d", "runs"], rec[:5])),
              {"ari": rec[5], "f1": rec[9], "k": rec[11]})
    if failed:
        print(f"{len(failed)} runs failed", file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args):
    config = _config_from(args, sweep=True)
    rows, summary = run_sweep(config)
    failed = [row for _, row in rows if row.error]
    for rec in summary:
        print(f"{rec[0]}={rec[1]}: runs={rec[6]} ari={rec[7]} f1={rec[11]} "
              f"final_k={rec[13]} active={rec[15]}")
    if failed:
        print(f"{len(failed)} runs failed", file=sys.stderr)
        return 1
    return 0


def cmd_scaling(args):
    pairs = []
    for part in args.sizes.split(";"):
        n, d = part.split("x")
        pairs.append((int(n), int(d)))
    rows = scaling_table(pairs, k=args.k, epochs=args.epochs or 10, seed=args.seed)
    header = ["backend", "n", "d", "k", "epochs", "seconds_per_epoch"]
    if args.out:
        write_rows(args.out, header, rows)
    for row in rows:
        print(dict(zip(header, row)))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="divi", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic benchmark dataset")
    p.add_argument("--scenario", default="matched",
                   choices=["matched", "heavy_tailed", "correlated"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--rho", type=float, default=0.6)
    p.add_argument("--block", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fit", help="fit the gated mixture to a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--mode", default="info", choices=list(MODES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_train_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("baseline", help="run an oracle-K baseline")
    p.add_argument("--data", required=True)
    p.add_argument("--method", default="kmeans", choices=["kmeans", "gmm"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="batch benchmark over seeds and methods")
    p.add_argument("--config")
    p.add_argument("--scenario")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--seeds")
    p.add_argument("--methods")
    p.add_argument("--data")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_train_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="sensitivity sweep on fixed datasets")
    p.add_argument("--config")
    p.add_argument("--axis", choices=["t_split", "beta_mult", "tau_mult", "lr", "t_min"])
    p.add_argument("--values")
    p.add_argument("--scenario")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--seeds")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_train_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scaling", help="epoch wall-time scaling CSV")
    p.add_argument("--sizes", default="1000x1000;1000x2000",
                   help="semicolon-separated NxD pairs")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scaling)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
