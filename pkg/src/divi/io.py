"""File formats: dataset CSV, model snapshots, and results tables.

Datasets are CSV with header ``f1..fD[,label]`` and full double-precision
values; the ground-truth informative mask travels in a ``<path>.meta.json``
sidecar.  Model snapshots are versioned JSON carrying everything needed to
reproduce hard assignments: parameters, gate probabilities, standardization
stats, the training config, and the seed.
"""

import csv
import dataclasses
import json
import os

import numpy as np

from .model import ModelParams
from .trainer import FitResult, TrainConfig

SNAPSHOT_SCHEMA = "divi-model-v1"


class SnapshotError(ValueError):
    """Corrupt or incompatible model snapshot."""


def write_dataset(data, path):
    """Dataset CSV plus a .meta.json sidecar with the informative mask."""
    d = data.x.shape[1]
    header = [f"f{j + 1}" for j in range(d)]
    if data.labels is not None:
        header.append("label")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(data.x.shape[0]):
            row = [repr(float(v)) for v in data.x[i]]
            if data.labels is not None:
                row.append(int(data.labels[i]))
            w.writerow(row)
    if data.informative_mask is not None:
        meta = {"informative_mask": [int(v) for v in data.informative_mask]}
        with open(path + ".meta.json", "w") as fh:
            json.dump(meta, fh)


def read_dataset(path):
    from .datagen import Dataset

    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        has_labels = header and header[-1] == "label"
        d = len(header) - (1 if has_labels else 0)
        xs, ys = [], []
        for row in r:
            xs.append([float(v) for v in row[:d]])
            if has_labels:
                ys.append(int(row[d]))
    mask = None
    meta_path = path + ".meta.json"
    if os.path.exists(meta_path):
        with open(meta_path) as fh:
            meta = json.load(fh)
        if "informative_mask" in meta:
            mask = np.asarray(meta["informative_mask"], dtype=bool)
    return Dataset(
        x=np.asarray(xs, dtype=np.float64),
        labels=np.asarray(ys, dtype=np.int64) if has_labels else None,
        informative_mask=mask,
    )


def save_model(result, path):
    """Versioned JSON snapshot of a FitResult (lossless round trip)."""
    cfg = dataclasses.asdict(result.config) if result.config is not None else None
    std = None
    if result.standardization is not None:
        mean, sd = result.standardization
        std = {"mean": mean.tolist(), "std": sd.tolist()}
    doc = {
        "schema_version": SNAPSHOT_SCHEMA,
        "alpha": result.params.alpha.tolist(),
        "mu": result.params.mu.tolist(),
        "logvar": result.params.logvar.tolist(),
        "eta": result.params.eta.tolist(),
        "bg_mu": result.params.bg_mu.tolist(),
        "bg_logvar": result.params.bg_logvar.tolist(),
        "gate_probs": result.gate_probs.tolist(),
        "final_k": int(result.final_k),
        "split_events": [[e.epoch, e.component, e.score] for e in result.split_events],
        "standardization": std,
        "config": cfg,
        "seed": None if result.config is None else result.config.seed,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path):
    """Load a snapshot; raises SnapshotError on version mismatch/corruption."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SnapshotError(f"corrupt snapshot: {exc}") from exc
    version = doc.get("schema_version")
    if version != SNAPSHOT_SCHEMA:
        raise SnapshotError(f"unknown snapshot schema {version!r}")
    try:
        params = ModelParams(
            alpha=np.asarray(doc["alpha"]),
            mu=np.asarray(doc["mu"]),
            logvar=np.asarray(doc["logvar"]),
            eta=np.asarray(doc["eta"]),
            bg_mu=np.asarray(doc["bg_mu"]),
            bg_logvar=np.asarray(doc["bg_logvar"]),
        )
        config = TrainConfig(**doc["config"]) if doc.get("config") else None
        std = None
        if doc.get("standardization"):
            std = (np.asarray(doc["standardization"]["mean"]),
                   np.asarray(doc["standardization"]["std"]))
        from .trainer import SplitEvent
        events = [SplitEvent(int(e[0]), int(e[1]), float(e[2]))
                  for e in doc.get("split_events", [])]
        return FitResult(
            params=params,
            labels=None,
            gate_probs=np.asarray(doc["gate_probs"]),
            final_k=int(doc["final_k"]),
            split_events=events,
            trace=[],
            config=config,
            standardization=std,
        )
    except (KeyError, TypeError) as exc:
        raise SnapshotError(f"corrupt snapshot: missing {exc}") from exc


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
