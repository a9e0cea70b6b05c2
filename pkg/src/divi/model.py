"""Feature-gated Gaussian mixture model.

Each feature is routed by a per-dimension gate either to a cluster-specific
Gaussian or to a fixed broad background Gaussian.  This module holds the
parameter containers and every deterministic or stochastic evaluation of
the model: gated log-densities, the marginal mixture log-likelihood, the
Bernoulli gate KL, relaxed gate sampling, and the training objective.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._backend import gated_loglik as _gated_loglik

LOG_2PI = 1.8378770664093453

# Numerical guards: posterior gate probabilities are clamped inside the KL,
# prior probabilities at construction, sampled gates away from {0, 1}, and
# uniform draws away from {0, 1} ahead of the double-log transform.
GATE_PROB_EPS = 1e-6
RHO_CLAMP = 0.01
GATE_VALUE_EPS = 1e-12
UNIFORM_EPS = 1e-10

DEFAULT_BG_MU = 0.0
DEFAULT_BG_LOGVAR = 2.0


def sigmoid(z):
    """Numerically stable logistic function (elementwise)."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logit(p):
    p = np.asarray(p, dtype=np.float64)
    return np.log(p) - np.log1p(-p)


class PriorMode(Enum):
    INFORMATIVE = "informative"
    NONINFORMATIVE = "noninformative"
    RANDOM = "random"


@dataclass
class PriorSpec:
    """Per-feature prior inclusion probabilities and the mode that built them."""

    rho: np.ndarray
    mode: PriorMode

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.float64)
        self.rho = np.clip(rho, RHO_CLAMP, 1.0 - RHO_CLAMP)


@dataclass
class ModelParams:
    """Trainable mixture parameters plus the fixed background distribution.

    alpha are unconstrained mixture logits, mu/logvar the per-component
    Gaussian parameters (K x D), eta the variational gate logits (D,).
    bg_mu/bg_logvar define the background Gaussian and are never trained.
    """

    alpha: np.ndarray
    mu: np.ndarray
    logvar: np.ndarray
    eta: np.ndarray
    bg_mu: np.ndarray
    bg_logvar: np.ndarray

    def __post_init__(self):
        self.alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        self.mu = np.ascontiguousarray(self.mu, dtype=np.float64)
        self.logvar = np.ascontiguousarray(self.logvar, dtype=np.float64)
        self.eta = np.ascontiguousarray(self.eta, dtype=np.float64)
        self.bg_mu = np.ascontiguousarray(self.bg_mu, dtype=np.float64)
        self.bg_logvar = np.ascontiguousarray(self.bg_logvar, dtype=np.float64)

    @property
    def k(self):
        return self.mu.shape[0]

    @property
    def d(self):
        return self.mu.shape[1]

    def copy(self):
        return ModelParams(
            self.alpha.copy(), self.mu.copy(), self.logvar.copy(),
            self.eta.copy(), self.bg_mu.copy(), self.bg_logvar.copy(),
        )

    @classmethod
    def single_component(cls, x, eta, bg_mu=DEFAULT_BG_MU, bg_logvar=DEFAULT_BG_LOGVAR):
        """K=1 initialization: mean at the column means, unit variances."""
        x = np.asarray(x, dtype=np.float64)
        d = x.shape[1]
        return cls(
            alpha=np.zeros(1),
            mu=x.mean(axis=0)[None, :].copy(),
            logvar=np.zeros((1, d)),
            eta=np.asarray(eta, dtype=np.float64).copy(),
            bg_mu=np.full(d, float(bg_mu)),
            bg_logvar=np.full(d, float(bg_logvar)),
        )


@dataclass
class GateSample:
    """One relaxed gate draw; the Gumbel noise is kept for frozen-noise replays."""

    values: np.ndarray
    temperature: float
    noise: np.ndarray = field(default=None)


def gaussian_log_pdf(x, mu, logvar):
    """Scalar Gaussian log-density with log-variance parameterization."""
    if not (np.isfinite(x) and np.isfinite(mu) and np.isfinite(logvar)):
        raise ValueError("non-finite input")
    z = x - mu
    return -0.5 * (LOG_2PI + logvar + z * z * np.exp(-logvar))


def mixture_weights(alpha):
    """Softmax of the mixture logits; a strictly positive simplex vector."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.size == 0:
        raise ValueError("empty mixture logits")
    shifted = alpha - alpha.max()
    w = np.exp(shifted)
    return w / w.sum()


def log_mixture_weights(alpha):
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.size == 0:
        raise ValueError("empty mixture logits")
    shifted = alpha - alpha.max()
    return shifted - np.log(np.exp(shifted).sum())


def component_log_densities(x, params, gates):
    """Gated log-densities ll[i, k] for a batch of rows (kernel-backed).

    gates may be one vector (D,), applied to every row, or a full (N, D)
    matrix carrying one relaxed draw per row.
    """
    x = np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)
    gates = np.asarray(gates, dtype=np.float64)
    if x.shape[1] != params.d:
        raise ValueError("dimension mismatch")
    if gates.ndim == 1:
        if gates.shape[0] != params.d:
            raise ValueError("dimension mismatch")
        gates = np.broadcast_to(gates, x.shape)
    elif gates.shape != x.shape:
        raise ValueError("dimension mismatch")
    gates = np.ascontiguousarray(gates)
    return _gated_loglik(x, params.mu, params.logvar,
                         params.bg_mu, params.bg_logvar, gates)


def gated_component_log_density(x, k, params, gates):
    """Gated log-density of one row under component k.

    Accepts hard {0,1} gates as well as relaxed values; linear in each gate.
    """
    x = np.asarray(x, dtype=np.float64)
    gates = np.asarray(gates, dtype=np.float64)
    if x.shape != (params.d,) or gates.shape != (params.d,):
        raise ValueError("dimension mismatch")
    if not 0 <= k < params.k:
        raise ValueError("component index out of range")
    own = -0.5 * (LOG_2PI + params.logvar[k]
                  + (x - params.mu[k]) ** 2 * np.exp(-params.logvar[k]))
    bg = -0.5 * (LOG_2PI + params.bg_logvar
                 + (x - params.bg_mu) ** 2 * np.exp(-params.bg_logvar))
    return float((gates * own + (1.0 - gates) * bg).sum())


def marginal_log_likelihood(x, params, gates):
    """log sum_k pi_k exp(ll_k) for one row, via max-shifted log-sum-exp."""
    ll = component_log_densities(x, params, gates)[0]
    return _logsumexp_row(ll + log_mixture_weights(params.alpha))


def marginal_log_likelihoods(x, params, gates):
    """Batched marginal log-likelihoods, shape (N,)."""
    ll = component_log_densities(x, params, gates)
    a = ll + log_mixture_weights(params.alpha)
    amax = a.max(axis=1, keepdims=True)
    return (amax + np.log(np.exp(a - amax).sum(axis=1, keepdims=True))).ravel()


def _logsumexp_row(a):
    m = a.max()
    return float(m + np.log(np.exp(a - m).sum()))


def gate_kl(eta, prior):
    """KL( Bernoulli(sigmoid(eta)) || Bernoulli(rho) ), summed over features."""
    q = np.clip(sigmoid(eta), GATE_PROB_EPS, 1.0 - GATE_PROB_EPS)
    rho = prior.rho
    return float((q * np.log(q / rho) + (1.0 - q) * np.log((1.0 - q) / (1.0 - rho))).sum())


def gate_kl_grad(eta, prior):
    """d gate_kl / d eta, zero where the probability clamp is active."""
    eta = np.asarray(eta, dtype=np.float64)
    q = sigmoid(eta)
    inside = (q > GATE_PROB_EPS) & (q < 1.0 - GATE_PROB_EPS)
    qc = np.clip(q, GATE_PROB_EPS, 1.0 - GATE_PROB_EPS)
    dkl_dq = logit(qc) - logit(prior.rho)
    return np.where(inside, dkl_dq * q * (1.0 - q), 0.0)


def sample_relaxed_gates(eta, temperature, rng, n_rows=None):
    """Gumbel-sigmoid gate draw(s) at the given temperature.

    values = sigmoid((eta + g) / T) with g = -log(-log u); the uniforms are
    clamped before the double log and the outputs clamped to stay strictly
    inside (0, 1).  With n_rows=None one gate vector (D,) is drawn; with an
    integer a full (n_rows, D) matrix gives every data row its own draw,
    which is how the trainer estimates the per-row expectations.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    eta = np.asarray(eta, dtype=np.float64)
    shape = eta.shape[0] if n_rows is None else (n_rows, eta.shape[0])
    u = np.clip(rng.random(shape), UNIFORM_EPS, 1.0 - UNIFORM_EPS)
    noise = -np.log(-np.log(u))
    values = np.clip(sigmoid((eta + noise) / temperature),
                     GATE_VALUE_EPS, 1.0 - GATE_VALUE_EPS)
    return GateSample(values=values, temperature=float(temperature), noise=noise)


def objective(data, params, gates, prior, beta):
    """Scaled variational objective: data NLL plus beta-weighted gate KL.

    Deterministic given the gate sample.  A (D,) sample is shared by every
    row (single-sample estimator); an (N, D) sample evaluates each row's
    expectation under its own draw.
    """
    x = data.x if hasattr(data, "x") else data
    nll = -marginal_log_likelihoods(x, params, gates.values).sum()
    return float(nll + beta * gate_kl(params.eta, prior))
