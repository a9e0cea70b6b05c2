"""Partition and feature-recovery metrics: ARI, NMI, active-dimension
summaries, and the informative-support F1 score.
"""

import numpy as np


def _contingency(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("label arrays must be 1-d and of equal length")
    if a.size < 2:
        raise ValueError("need at least 2 samples")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    na = ia.max() + 1
    nb = ib.max() + 1
    table = np.zeros((na, nb), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _comb2(m):
    return m * (m - 1) / 2.0


def adjusted_rand_index(a, b):
    """Chance-adjusted Rand index from the contingency table.

    Equals 1 for perfect (relabeling-equivalent) agreement; defined as 1
    when the adjustment denominator vanishes (e.g. both partitions are a
    single cluster).
    """
    table = _contingency(a, b)
    n = table.sum()
    index = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    total = _comb2(n)
    expected = sum_a * sum_b / total
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def normalized_mutual_info(a, b):
    """Mutual information normalized by the arithmetic mean of the two
    partition entropies (natural logs).

    Both partitions trivial (zero entropy) gives 1; exactly one trivial
    gives 0.
    """
    table = _contingency(a, b).astype(np.float64)
    n = table.sum()
    p = table / n
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    ha = -np.sum(pa[pa > 0] * np.log(pa[pa > 0]))
    hb = -np.sum(pb[pb > 0] * np.log(pb[pb > 0]))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    nz = p > 0
    mi = np.sum(p[nz] * (np.log(p[nz]) - np.log(np.outer(pa, pb)[nz])))
    mi = max(float(mi), 0.0)
    return float(mi / (0.5 * (ha + hb)))


def active_dimensions(gate_probs, threshold=0.5):
    """Boolean activity mask (strictly above threshold) and its count."""
    mask = np.asarray(gate_probs, dtype=np.float64) > threshold
    return mask, int(mask.sum())


def feature_f1(predicted, truth):
    """F1 of the predicted informative-dimension set against the truth.

    Empty prediction scores 0; an empty truth set is an error.
    """
    predicted = np.asarray(predicted, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if predicted.shape != truth.shape:
        raise ValueError("mask length mismatch")
    if not truth.any():
        raise ValueError("truth mask is empty")
    tp = float(np.sum(predicted & truth))
    if predicted.sum() == 0 or tp == 0.0:
        return 0.0
    precision = tp / predicted.sum()
    recall = tp / truth.sum()
    return float(2.0 * precision * recall / (precision + recall))
