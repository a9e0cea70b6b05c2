"""Benchmark harness: batch runs over seeds and methods, sensitivity
sweeps on fixed datasets, deterministic persistence, and epoch timing for
the runtime-scaling tables.
"""

import dataclasses
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND
from ._version import __version__ as _version
from ._rng import substream
from .baselines import diag_gmm_fit, kmeans_fit
from .datagen import gen_correlated, gen_heavy_tailed, gen_matched, standardize
from .gradients import objective_gradients
from .io import read_dataset, write_rows
from .metrics import (
    active_dimensions,
    adjusted_rand_index,
    feature_f1,
    normalized_mutual_info,
)
from .model import ModelParams, PriorMode, logit, sample_relaxed_gates
from .prior import build_prior
from .trainer import AdamState, TrainConfig, adam_step, fit

DIVI_METHODS = {
    "divi-info": PriorMode.INFORMATIVE,
    "divi-noninfo": PriorMode.NONINFORMATIVE,
    "divi-random": PriorMode.RANDOM,
}
BASELINE_METHODS = ("kmeans", "gmm")
SWEEP_AXES = ("t_split", "beta_mult", "tau_mult", "lr", "t_min")

RESULT_COLUMNS = ["scenario", "method", "n", "d", "seed", "ari", "nmi",
                  "feature_f1", "final_k", "active_dims", "split_count",
                  "wall_time_seconds", "error"]

SUMMARY_COLUMNS = ["scenario", "method", "n", "d", "runs",
                   "ari_mean", "ari_std", "nmi_mean", "nmi_std",
                   "feature_f1_mean", "feature_f1_std",
                   "final_k_mean", "final_k_std",
                   "active_dims_mean", "active_dims_std",
                   "split_count_mean", "wall_time_mean"]


@dataclass
class ExperimentConfig:
    scenario: str = "matched"          # matched | heavy_tailed | correlated | csv
    n: int = 1000
    d: int = 100
    seeds: list = field(default_factory=lambda: list(range(20)))
    methods: list = field(default_factory=lambda: ["divi-info", "kmeans", "gmm"])
    train: dict = field(default_factory=dict)   # TrainConfig overrides
    oracle_k: int = 3
    rho: float = 0.6
    block: int = 10
    data_csv: str = None
    sweep_axis: str = None
    sweep_values: list = None
    jobs: int = 1
    out: str = None

    def validate(self):
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        for m in self.methods:
            if m not in DIVI_METHODS and m not in BASELINE_METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.scenario not in ("matched", "heavy_tailed", "correlated", "csv"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.scenario == "csv" and not self.data_csv:
            raise ValueError("scenario csv needs data_csv")
        if self.sweep_axis is not None and self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep axis must be one of {SWEEP_AXES}")
        # overrides must produce a valid TrainConfig before any run starts
        self._train_config(0).validate()
        return self

    def _train_config(self, seed, extra=None):
        kw = dict(self.train)
        if extra:
            kw.update(extra)
        kw["seed"] = seed
        return TrainConfig(**kw)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class ResultRow:
    scenario: str
    method: str
    n: int
    d: int
    seed: int
    ari: float = None
    nmi: float = None
    feature_f1: float = None
    final_k: int = None
    active_dims: int = None
    split_count: int = None
    wall_time_seconds: float = None
    error: str = ""

    def as_csv(self):
        vals = [self.scenario, self.method, self.n, self.d, self.seed,
                self.ari, self.nmi, self.feature_f1, self.final_k,
                self.active_dims, self.split_count, self.wall_time_seconds,
                self.error]
        return ["" if v is None else v for v in vals]


def load_data(config, seed):
    """Raw dataset for one run (generated per seed, or loaded from CSV)."""
    if config.scenario == "matched":
        return gen_matched(config.n, config.d, seed)
    if config.scenario == "heavy_tailed":
        return gen_heavy_tailed(config.n, config.d, seed)
    if config.scenario == "correlated":
        return gen_correlated(config.n, config.d, seed,
                              rho=config.rho, block=config.block)
    return read_dataset(config.data_csv)


def run_single(config, seed, method, raw=None, overrides=None):
    """One (seed, method) run; failures come back as error rows."""
    row = ResultRow(scenario=config.scenario, method=method,
                    n=config.n, d=config.d, seed=seed)
    try:
        if raw is None:
            raw = load_data(config, seed)
        row.n, row.d = raw.x.shape
        data = standardize(raw)
        start = time.perf_counter()
        if method in DIVI_METHODS:
            prior = build_prior(data, DIVI_METHODS[method], seed=seed)
            result = fit(data, prior, config._train_config(seed, overrides))
            labels = result.labels
            row.final_k = result.final_k
            row.split_count = len(result.split_events)
            mask, row.active_dims = active_dimensions(result.gate_probs)
            if raw.informative_mask is not None:
                row.feature_f1 = feature_f1(mask, raw.informative_mask)
        elif method == "kmeans":
            res = kmeans_fit(data.x, config.oracle_k, restarts=10, seed=seed)
            labels = res.labels
            row.final_k = config.oracle_k
        else:
            res = diag_gmm_fit(data.x, config.oracle_k, restarts=5, seed=seed)
            labels = res.labels
            row.final_k = config.oracle_k
        row.wall_time_seconds = time.perf_counter() - start
        if raw.labels is not None:
            row.ari = adjusted_rand_index(labels, raw.labels)
            row.nmi = normalized_mutual_info(labels, raw.labels)
    except Exception as exc:  # error rows keep the batch going
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def _worker(args):
    config_dict, seed, method, overrides = args
    config = ExperimentConfig(**config_dict)
    return run_single(config, seed, method, overrides=overrides)


def _run_all(config, tasks):
    if config.jobs > 1:
        payload = [(config.to_dict(), s, m, o) for (s, m, o) in tasks]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_worker, payload))
    return [run_single(config, s, m, overrides=o) for (s, m, o) in tasks]


def _mean_std(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = float(np.mean(vals))
    std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
    return mean, std


def summarize(rows):
    """Per-method mean/std rows over the non-error member rows."""
    out = []
    seen = []
    for row in rows:
        key = (row.scenario, row.method, row.n, row.d)
        if key not in seen:
            seen.append(key)
    for key in seen:
        members = [r for r in rows
                   if (r.scenario, r.method, r.n, r.d) == key and not r.error]
        rec = list(key) + [len(members)]
        for attr in ("ari", "nmi", "feature_f1", "final_k", "active_dims"):
            m, s = _mean_std([getattr(r, attr) for r in members])
            rec += ["" if m is None else m, "" if s is None else s]
        sc_m, _ = _mean_std([r.split_count for r in members])
        wt_m, _ = _mean_std([r.wall_time_seconds for r in members])
        rec += ["" if sc_m is None else sc_m, "" if wt_m is None else wt_m]
        out.append(rec)
    return out


def _write_outputs(config, rows, summary, prefix):
    if not config.out:
        return
    import os
    os.makedirs(config.out, exist_ok=True)
    write_rows(os.path.join(config.out, f"{prefix}_results.csv"),
               RESULT_COLUMNS, [r.as_csv() for r in rows])
    write_rows(os.path.join(config.out, f"{prefix}_summary.csv"),
               SUMMARY_COLUMNS, summary)
    doc = config.to_dict()
    canon = json.dumps(doc, sort_keys=True)
    manifest = {
        "config": doc,
        "config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
        "version": _version,
        "backend": BACKEND,
    }
    with open(os.path.join(config.out, f"{prefix}_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def run_benchmark(config):
    """All (seed, method) runs plus per-method summary rows."""
    config.validate()
    tasks = [(seed, method, None)
             for method in config.methods for seed in config.seeds]
    rows = _run_all(config, tasks)
    rows.sort(key=lambda r: (r.scenario, r.method, r.seed))
    summary = summarize(rows)
    _write_outputs(config, rows, summary, "bench")
    return rows, summary


def run_sweep(config):
    """One run table per sweep-axis value over a shared, fixed seed set.

    The datasets are generated once per seed and reused for every axis
    value, so rows differ only through the swept parameter.
    """
    config.validate()
    if config.sweep_axis is None or not config.sweep_values:
        raise ValueError("sweep needs sweep_axis and sweep_values")
    method = next((m for m in config.methods if m in DIVI_METHODS), "divi-info")
    datasets = {seed: load_data(config, seed) for seed in config.seeds}
    rows = []
    for value in config.sweep_values:
        for seed in config.seeds:
            row = run_single(config, seed, method, raw=datasets[seed],
                             overrides={config.sweep_axis: value})
            rows.append((value, row))
    header = ["axis", "value"] + RESULT_COLUMNS
    flat = [[config.sweep_axis, value] + row.as_csv() for value, row in rows]
    summary = []
    for value in config.sweep_values:
        for rec in summarize([row for v, row in rows if v == value]):
            summary.append([config.sweep_axis, value] + rec)
    if config.out:
        import os
        os.makedirs(config.out, exist_ok=True)
        write_rows(os.path.join(config.out, "sweep_results.csv"), header, flat)
        write_rows(os.path.join(config.out, "sweep_summary.csv"),
                   ["axis", "value"] + SUMMARY_COLUMNS, summary)
        doc = config.to_dict()
        canon = json.dumps(doc, sort_keys=True)
        manifest = {"config": doc,
                    "config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
                    "version": _version, "backend": BACKEND}
        with open(os.path.join(config.out, "sweep_manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
    return rows, summary


def epoch_seconds(n, d, k, epochs=10, seed=0, warmup=2):
    """Median wall time of one full-batch gradient + Adam step.

    Used for the runtime-scaling tables; the component count is held fixed
    so the measurement isolates the O(N*K*D) kernel cost.
    """
    raw = gen_matched(n, d, seed)
    data = standardize(raw)
    x = data.x
    rng = substream(seed, "scaling")
    prior = build_prior(data, PriorMode.NONINFORMATIVE, seed=seed)
    params = ModelParams.single_component(x, eta=logit(prior.rho))
    # grow to k components by duplicating with small jitter
    reps = np.tile(params.mu, (k, 1)) + 0.01 * rng.standard_normal((k, d))
    params = ModelParams(alpha=np.zeros(k), mu=reps,
                         logvar=np.zeros((k, d)), eta=params.eta,
                         bg_mu=params.bg_mu, bg_logvar=params.bg_logvar)
    adam = AdamState(params)
    times = []
    for i in range(epochs + warmup):
        start = time.perf_counter()
        gates = sample_relaxed_gates(params.eta, 0.5, rng, n_rows=n)
        _, grads = objective_gradients(x, params, gates, prior, beta=float(n))
        adam_step(adam, params, grads, 0.01)
        if i >= warmup:
            times.append(time.perf_counter() - start)
    return float(np.median(times))


def scaling_table(pairs, k=3, epochs=10, seed=0):
    """Plot-ready rows (backend, n, d, k, epochs, seconds_per_epoch)."""
    rows = []
    for n, d in pairs:
        sec = epoch_seconds(n, d, k, epochs=epochs, seed=seed)
        rows.append([BACKEND, n, d, k, epochs, sec])
    return rows
