"""Oracle-K baselines: Lloyd's k-means (k-means++ seeding) and a
diagonal-covariance Gaussian mixture fitted by EM.
"""

from dataclasses import dataclass

import numpy as np

from ._rng import substream

LOG_2PI = 1.8378770664093453
GMM_VAR_FLOOR = 1e-6


@dataclass
class BaselineResult:
    labels: np.ndarray
    trace: list                     # inertia or log-likelihood per iteration
    n_iter: int
    centers: np.ndarray = None      # k-means
    means: np.ndarray = None        # gmm
    variances: np.ndarray = None
    weights: np.ndarray = None

    @property
    def inertia(self):
        return self.trace[-1]

    @property
    def log_likelihood(self):
        return self.trace[-1]


def _sq_dists(x, centers):
    # (N, K) squared euclidean distances
    return (np.sum(x * x, axis=1)[:, None] - 2.0 * x @ centers.T
            + np.sum(centers * centers, axis=1))


def _kmeans_pp(x, k, rng):
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[i] = x[rng.integers(n)]
        else:
            centers[i] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((x - centers[i]) ** 2, axis=1))
    return centers


def _lloyd(x, centers, max_iter, tol):
    k = centers.shape[0]
    trace = []
    prev = np.inf
    labels = None
    for it in range(1, max_iter + 1):
        d2 = np.maximum(_sq_dists(x, centers), 0.0)
        labels = np.argmin(d2, axis=1)
        # re-seed empty clusters to the farthest point from its center
        empties = [c for c in range(k) if not np.any(labels == c)]
        if empties:
            mind2 = d2[np.arange(x.shape[0]), labels].copy()
            for c in empties:
                far = int(np.argmax(mind2))
                centers[c] = x[far]
                labels[far] = c
                mind2[far] = 0.0
            d2 = np.maximum(_sq_dists(x, centers), 0.0)
            labels = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(x.shape[0]), labels].sum())
        trace.append(inertia)
        for c in range(k):
            members = labels == c
            if np.any(members):
                centers[c] = x[members].mean(axis=0)
        if prev < np.inf and abs(prev - inertia) <= tol * max(prev, 1e-300):
            break
        prev = inertia
    return labels, centers, trace


def kmeans_fit(data, k, restarts=10, seed=0, max_iter=300, tol=1e-6):
    """Best-of-restarts Lloyd's algorithm; restarts are ranked by inertia."""
    x = data.x if hasattr(data, "x") else np.asarray(data, dtype=np.float64)
    if not 2 <= k <= x.shape[0]:
        raise ValueError("need 2 <= k <= N")
    best = None
    for r in range(restarts):
        rng = substream(seed, f"kmeans-{r}")
        centers = _kmeans_pp(x, k, rng)
        labels, centers, trace = _lloyd(x, centers.copy(), max_iter, tol)
        if best is None or trace[-1] < best.trace[-1]:
            best = BaselineResult(labels=labels, centers=centers,
                                  trace=trace, n_iter=len(trace))
    return best


def _diag_gauss_logpdf(x, means, variances):
    # (N, K): sum_j logN(x_ij | mean_kj, var_kj)
    out = np.empty((x.shape[0], means.shape[0]))
    for c in range(means.shape[0]):
        z = x - means[c]
        out[:, c] = -0.5 * (LOG_2PI + np.log(variances[c])
                            + z * z / variances[c]).sum(axis=1)
    return out


def diag_gmm_fit(data, k, restarts=5, seed=0, max_iter=200, tol=1e-7):
    """Diagonal-covariance GMM by EM with k-means initialization.

    Variances floored at 1e-6; convergence on relative log-likelihood
    change; best restart by final log-likelihood; labels by maximum
    responsibility.
    """
    x = data.x if hasattr(data, "x") else np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= N")
    best = None
    for r in range(restarts):
        if k >= 2:
            child_seed = int(substream(seed, f"gmm-init-{r}").integers(2 ** 31 - 1))
            labels0 = kmeans_fit(x, k, restarts=1, seed=child_seed).labels
        else:
            labels0 = np.zeros(n, dtype=int)
        means = np.vstack([x[labels0 == c].mean(axis=0) for c in range(k)])
        variances = np.vstack([
            np.maximum(x[labels0 == c].var(axis=0), GMM_VAR_FLOOR)
            for c in range(k)
        ])
        weights = np.bincount(labels0, minlength=k) / n

        trace = []
        prev = -np.inf
        resp = None
        for _ in range(max_iter):
            logp = _diag_gauss_logpdf(x, means, variances) + np.log(weights)
            m = logp.max(axis=1, keepdims=True)
            lse = m + np.log(np.exp(logp - m).sum(axis=1, keepdims=True))
            ll = float(lse.sum())
            trace.append(ll)
            resp = np.exp(logp - lse)
            nk = resp.sum(axis=0)
            weights = nk / n
            means = (resp.T @ x) / nk[:, None]
            sq = resp.T @ (x * x) / nk[:, None]
            variances = np.maximum(sq - means ** 2, GMM_VAR_FLOOR)
            if prev > -np.inf and abs(ll - prev) <= tol * max(1.0, abs(prev)):
                break
            prev = ll
        labels = np.argmax(resp, axis=1)
        if best is None or trace[-1] > best.trace[-1]:
            best = BaselineResult(labels=labels, means=means,
                                  variances=variances, weights=weights,
                                  trace=trace, n_iter=len(trace))
    return best
