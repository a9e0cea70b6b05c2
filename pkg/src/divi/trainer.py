"""Training loop: Adam on the gated-mixture objective, temperature
annealing, and split-only structure growth driven by per-cluster average
negative log-likelihood diagnostics.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ._rng import substream
from .gradients import objective_gradients
from .model import (
    LOG_2PI,
    ModelParams,
    component_log_densities,
    sample_relaxed_gates,
    sigmoid,
    logit,
    DEFAULT_BG_MU,
    DEFAULT_BG_LOGVAR,
)

log = logging.getLogger(__name__)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    epochs: int = 300
    t_split: int = 120
    tau_mult: float = 1.0
    beta_mult: float = 1.0        # beta = beta_mult * N
    lr: float = 0.01
    t0: float = 1.0
    t_min: float = 0.1
    gamma: float = 0.99
    sigma_split: float = 0.2
    k_max: int = 64
    logvar_floor: float = -10.0
    bg_mu: float = DEFAULT_BG_MU
    bg_logvar: float = DEFAULT_BG_LOGVAR
    seed: int = 0

    def validate(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 1 <= self.t_split <= self.epochs:
            raise ValueError("t_split must lie in [1, epochs]")
        if not self.t0 >= self.t_min > 0:
            raise ValueError("need t0 >= t_min > 0")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.beta_mult < 0:
            raise ValueError("beta_mult must be >= 0")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        return self


@dataclass
class SplitEvent:
    epoch: int
    component: int
    score: float


@dataclass
class TraceEntry:
    objective: float
    k: int
    temperature: float


@dataclass
class FitResult:
    params: ModelParams
    labels: np.ndarray
    gate_probs: np.ndarray
    final_k: int
    split_events: list
    trace: list
    config: TrainConfig = None
    standardization: tuple = None   # (col_mean, col_std) of the fitted data


class NonFiniteObjectiveError(RuntimeError):
    """Raised when the objective turns non-finite; carries the trace so far."""

    def __init__(self, epoch, trace):
        super().__init__(f"non-finite objective at epoch {epoch}")
        self.epoch = epoch
        self.trace = trace


class AdamState:
    """First/second-moment accumulators for every trainable array.

    Reset (rebuilt) whenever the model shape changes after a split.
    """

    FIELDS = ("alpha", "mu", "logvar", "eta")

    def __init__(self, params):
        self.m = {f: np.zeros_like(getattr(params, f)) for f in self.FIELDS}
        self.v = {f: np.zeros_like(getattr(params, f)) for f in self.FIELDS}
        self.t = 0


def adam_step(state, params, grads, lr, logvar_floor=-10.0):
    """One Adam update with bias correction, then logvar floor projection.

    Mutates params and state in place and returns them.
    """
    state.t += 1
    bc1 = 1.0 - ADAM_BETA1 ** state.t
    bc2 = 1.0 - ADAM_BETA2 ** state.t
    for name, g in (("alpha", grads.d_alpha), ("mu", grads.d_mu),
                    ("logvar", grads.d_logvar), ("eta", grads.d_eta)):
        m = state.m[name]
        v = state.v[name]
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * g * g
        step = lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
        getattr(params, name)[...] -= step
    np.maximum(params.logvar, logvar_floor, out=params.logvar)
    return params, state


def default_split_threshold(d, sigma2=1.0):
    """Dimension-aware split cutoff: entropy of a D-dim Gaussian with
    variance sigma2 per coordinate."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return 0.5 * d * (1.0 + LOG_2PI + np.log(sigma2))


def anneal_temperature(t, gamma, t_min):
    if t <= 0 or gamma <= 0 or t_min <= 0:
        raise ValueError("temperature inputs must be positive")
    return max(t_min, gamma * t)


def hard_assignments(data, params):
    """argmax_k of the gated log-densities with deterministic gates
    sigmoid(eta); ties go to the lowest component index."""
    x = data.x if hasattr(data, "x") else data
    ll = component_log_densities(x, params, sigmoid(params.eta))
    return np.argmax(ll, axis=1)


def cluster_diagnostics(data, params, labels):
    """Average negative log-likelihood per cluster under its own component,
    deterministic gates.  Empty clusters are marked NaN and never split."""
    x = data.x if hasattr(data, "x") else data
    x = np.atleast_2d(x)
    labels = np.asarray(labels)
    ll = component_log_densities(x, params, sigmoid(params.eta))
    scores = np.full(params.k, np.nan)
    for k in range(params.k):
        members = labels == k
        cnt = int(members.sum())
        if cnt:
            scores[k] = -ll[members, k].sum() / cnt
    return scores


def select_split_target(scores, threshold):
    """Worst cluster index and score if it breaches the threshold.

    NaN (absent-cluster) scores are never selected; ties go to the lowest
    index.  Returns (None, None) when no cluster qualifies.
    """
    scores = np.asarray(scores, dtype=np.float64)
    masked = np.where(np.isnan(scores), -np.inf, scores)
    k_star = int(np.argmax(masked))
    if np.isfinite(masked[k_star]) and masked[k_star] > threshold:
        return k_star, float(masked[k_star])
    return None, None


def split_component(params, k_star, sigma_split, rng, k_max=None):
    """Duplicate-and-perturb split of component k_star.

    Children get means mu +/- independent N(0, sigma_split^2) draws, copy
    the parent log-variances, and each take logit alpha - log 2 so the
    parent's softmax mass is halved while every other weight is untouched.
    At the component cap the model is returned unchanged.
    """
    if k_max is not None and params.k >= k_max:
        log.warning("component cap k_max=%d reached; split skipped", k_max)
        return params
    d = params.d
    delta_a = rng.normal(0.0, sigma_split, d) if sigma_split > 0 else np.zeros(d)
    delta_b = rng.normal(0.0, sigma_split, d) if sigma_split > 0 else np.zeros(d)
    mu_a = params.mu[k_star] + delta_a
    mu_b = params.mu[k_star] - delta_b
    child_alpha = params.alpha[k_star] - np.log(2.0)

    alpha = np.concatenate([params.alpha[:k_star], [child_alpha, child_alpha],
                            params.alpha[k_star + 1:]])
    mu = np.vstack([params.mu[:k_star], mu_a[None, :], mu_b[None, :],
                    params.mu[k_star + 1:]])
    logvar = np.vstack([params.logvar[:k_star], params.logvar[k_star][None, :],
                        params.logvar[k_star][None, :], params.logvar[k_star + 1:]])
    return ModelParams(alpha, mu, logvar, params.eta.copy(),
                       params.bg_mu.copy(), params.bg_logvar.copy())


def fit(data, prior, config):
    """Full training run on standardized data.

    Starts from a single component at the column means; each epoch draws a
    fresh relaxed gate matrix (one draw per row), takes one full-batch Adam
    step, and anneals the temperature.  Every t_split epochs the worst
    cluster is split when its average NLL exceeds the threshold, with Adam
    reinitialized after the shape change.  Hard labels come from the final
    model.
    """
    config.validate()
    x = data.x if hasattr(data, "x") else np.asarray(data, dtype=np.float64)
    if x.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    n, d = x.shape

    rng_noise = substream(config.seed, "gumbel")
    rng_split = substream(config.seed, "split")

    params = ModelParams.single_component(x, eta=logit(prior.rho),
                                          bg_mu=config.bg_mu,
                                          bg_logvar=config.bg_logvar)
    adam = AdamState(params)
    temperature = config.t0
    beta = config.beta_mult * n
    tau = config.tau_mult * default_split_threshold(d, 1.0)

    trace = []
    split_events = []
    for epoch in range(1, config.epochs + 1):
        gates = sample_relaxed_gates(params.eta, temperature, rng_noise, n_rows=n)
        value, grads = objective_gradients(x, params, gates, prior, beta)
        if not np.isfinite(value):
            raise NonFiniteObjectiveError(epoch, trace)
        adam_step(adam, params, grads, config.lr, config.logvar_floor)
        epoch_temperature = temperature
        temperature = anneal_temperature(temperature, config.gamma, config.t_min)

        if epoch % config.t_split == 0:
            labels = hard_assignments(x, params)
            scores = cluster_diagnostics(x, params, labels)
            k_star, s_star = select_split_target(scores, tau)
            if k_star is not None:
                if params.k < config.k_max:
                    params = split_component(params, k_star,
                                             config.sigma_split, rng_split)
                    adam = AdamState(params)
                    split_events.append(SplitEvent(epoch, k_star, s_star))
                else:
                    log.warning("component cap k_max=%d reached; split skipped",
                                config.k_max)

        trace.append(TraceEntry(objective=value, k=params.k,
                                temperature=epoch_temperature))

    labels = hard_assignments(x, params)
    stats = None
    if getattr(data, "col_mean", None) is not None:
        stats = (data.col_mean.copy(), data.col_std.copy())
    return FitResult(
        params=params,
        labels=labels,
        gate_probs=sigmoid(params.eta),
        final_k=params.k,
        split_events=split_events,
        trace=trace,
        config=config,
        standardization=stats,
    )
