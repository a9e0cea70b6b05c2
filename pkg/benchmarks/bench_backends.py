"""Timing comparison of the compiled kernel core against the numpy fallback.

Runs the two hot kernels (gated log-densities and the fused gradient pass)
at several problem sizes and prints a table; optionally writes CSV.

    python benchmarks/bench_backends.py [--out results.csv]
"""

import argparse
import csv
import time

import numpy as np

from divi import _kernels_np
from divi.model import ModelParams, log_mixture_weights, sample_relaxed_gates

try:
    from divi import _core
except ImportError:
    _core = None

SIZES = [
    (200, 100, 3),
    (1000, 100, 3),
    (1000, 100, 16),
    (1000, 1000, 3),
    (1000, 2000, 3),
]


def _instance(n, d, k, seed=0):
    rng = np.random.default_rng(seed)
    x = np.ascontiguousarray(rng.standard_normal((n, d)))
    params = ModelParams(
        alpha=rng.standard_normal(k),
        mu=rng.standard_normal((k, d)),
        logvar=np.zeros((k, d)),
        eta=rng.uniform(-2, 2, d),
        bg_mu=np.zeros(d),
        bg_logvar=np.full(d, 2.0),
    )
    gates = sample_relaxed_gates(params.eta, 0.5, rng, n_rows=n)
    log_pi = np.ascontiguousarray(log_mixture_weights(params.alpha))
    return x, params, gates.values, log_pi


def _time(fn, args, repeats=5, warmup=1):
    for _ in range(warmup):
        fn(*args)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if _core is None:
        print("compiled core not built; timing the numpy kernels only")

    rows = []
    print(f"{'n':>6} {'d':>6} {'k':>3} {'kernel':<10} {'numpy (ms)':>11} "
          f"{'cython (ms)':>12} {'speedup':>8}")
    for n, d, k in SIZES:
        x, params, gates, log_pi = _instance(n, d, k)
        call = (x, params.mu, params.logvar, params.bg_mu, params.bg_logvar, gates)
        for name, np_fn, cy_fn, extra in [
            ("loglik", _kernels_np.gated_loglik,
             getattr(_core, "gated_loglik", None), ()),
            ("gradients", _kernels_np.objective_grad_stats,
             getattr(_core, "objective_grad_stats", None), (log_pi,)),
        ]:
            t_np = _time(np_fn, call + extra, repeats=args.repeats)
            t_cy = None
            if cy_fn is not None:
                t_cy = _time(cy_fn, call + extra, repeats=args.repeats)
                ref = np_fn(*(call + extra))
                got = cy_fn(*(call + extra))
                if not isinstance(ref, tuple):
                    ref, got = (ref,), (got,)
                for a, b in zip(ref, got):
                    assert np.allclose(np.asarray(a), np.asarray(b), rtol=1e-10, atol=1e-9)
            speed = "" if t_cy is None else f"{t_np / t_cy:7.2f}x"
            cy_ms = "" if t_cy is None else f"{t_cy * 1e3:12.3f}"
            print(f"{n:>6} {d:>6} {k:>3} {name:<10} {t_np * 1e3:>11.3f} {cy_ms:>12} {speed:>8}")
            rows.append([n, d, k, name, t_np, t_cy if t_cy is not None else ""])

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "d", "k", "kernel", "numpy_seconds", "cython_seconds"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
