"""Synthetic benchmark generators and the standardization step.

Three-cluster designs with 10 informative dimensions: a matched Gaussian
benchmark, a heavy-tailed variant (t with 5 dof, scaled to unit variance),
and a correlated-noise variant (block-dependent nuisance dimensions).
Generated data is returned raw; fitting happens on standardized columns.
"""

from dataclasses import dataclass, field

import numpy as np

from ._rng import substream

CLUSTER_SHIFTS = (-2.0, 0.0, 2.0)
N_INFORMATIVE = 10
NUISANCE_STD = 3.0


@dataclass
class Dataset:
    """Row-major data matrix with optional ground truth and column stats."""

    x: np.ndarray
    labels: np.ndarray = None
    informative_mask: np.ndarray = None
    col_mean: np.ndarray = None
    col_std: np.ndarray = None

    def __post_init__(self):
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.informative_mask is not None:
            self.informative_mask = np.asarray(self.informative_mask, dtype=bool)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def d(self):
        return self.x.shape[1]


def _cluster_sizes(n, k=3):
    # as equal as possible, remainder assigned to the lower-index clusters
    base, rem = divmod(n, k)
    return [base + (1 if i < rem else 0) for i in range(k)]


def _labels_and_shifts(n):
    sizes = _cluster_sizes(n)
    labels = np.repeat(np.arange(3), sizes)
    shifts = np.asarray(CLUSTER_SHIFTS)[labels]
    return labels, shifts


def _assemble(n, d, labels, informative, rng):
    x = np.empty((n, d))
    x[:, :N_INFORMATIVE] = informative
    x[:, N_INFORMATIVE:] = NUISANCE_STD * rng.standard_normal((n, d - N_INFORMATIVE))
    mask = np.zeros(d, dtype=bool)
    mask[:N_INFORMATIVE] = True
    return Dataset(x=x, labels=labels, informative_mask=mask)


def _check_dims(n, d):
    if d < N_INFORMATIVE:
        raise ValueError(f"d must be >= {N_INFORMATIVE}")
    if n < 3:
        raise ValueError("n must be >= 3")


def gen_matched(n, d, seed):
    """Matched benchmark: Gaussian informative dims at shifts (-2, 0, 2),
    nuisance dims N(0, 3^2)."""
    _check_dims(n, d)
    rng = substream(seed, "datagen")
    labels, shifts = _labels_and_shifts(n)
    informative = shifts[:, None] + rng.standard_normal((n, N_INFORMATIVE))
    return _assemble(n, d, labels, informative, rng)


def gen_heavy_tailed(n, d, seed):
    """Heavy-tailed signal: informative dims t(5) scaled to unit variance
    before the cluster shifts; nuisance as in the matched design."""
    _check_dims(n, d)
    rng = substream(seed, "datagen")
    labels, shifts = _labels_and_shifts(n)
    scale = np.sqrt(3.0 / 5.0)  # t(5) variance is 5/3
    informative = shifts[:, None] + scale * rng.standard_t(5, (n, N_INFORMATIVE))
    return _assemble(n, d, labels, informative, rng)


def gen_correlated(n, d, seed, rho=0.6, block=10):
    """Correlated noise: Gaussian informative dims, nuisance dims in blocks
    with within-block correlation rho and marginal scale 3.0."""
    _check_dims(n, d)
    if (d - N_INFORMATIVE) % block != 0:
        raise ValueError("d minus the informative dims must be divisible by block")
    rng = substream(seed, "datagen")
    labels, shifts = _labels_and_shifts(n)
    informative = shifts[:, None] + rng.standard_normal((n, N_INFORMATIVE))
    n_blocks = (d - N_INFORMATIVE) // block
    z = rng.standard_normal((n, n_blocks))
    eps = rng.standard_normal((n, d - N_INFORMATIVE))
    shared = np.repeat(z, block, axis=1)
    nuisance = NUISANCE_STD * (np.sqrt(rho) * shared + np.sqrt(1.0 - rho) * eps)
    x = np.empty((n, d))
    x[:, :N_INFORMATIVE] = informative
    x[:, N_INFORMATIVE:] = nuisance
    mask = np.zeros(d, dtype=bool)
    mask[:N_INFORMATIVE] = True
    return Dataset(x=x, labels=labels, informative_mask=mask)


def standardize(data):
    """Column-wise (x - mean) / std with sample std (N-1 denominator).

    Zero-variance columns are centered only and their std recorded as 1.
    Stats are stored on the returned Dataset for round-tripping.
    """
    x = data.x
    if x.shape[0] < 2:
        raise ValueError("standardize needs at least 2 rows")
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1)
    std = np.where(std > 0.0, std, 1.0)
    return Dataset(
        x=(x - mean) / std,
        labels=None if data.labels is None else data.labels.copy(),
        informative_mask=(None if data.informative_mask is None
                          else data.informative_mask.copy()),
        col_mean=mean,
        col_std=std,
    )


def destandardize(data):
    """Inverse of standardize using the stored column stats."""
    if data.col_mean is None or data.col_std is None:
        raise ValueError("dataset carries no standardization stats")
    return data.x * data.col_std + data.col_mean
