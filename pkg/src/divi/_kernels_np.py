"""Numpy fallback for the compiled kernel core.

Same two entry points and return conventions as ``divi._core``, expressed
through vectorized array ops (a loop over components keeps the temporaries
at (N, D)).  Values agree with the compiled path to rounding; each path is
individually deterministic.
"""

import numpy as np

LOG_2PI = 1.8378770664093453


def _background_row_logpdf(x, bg_mu, bg_logvar):
    z = x - bg_mu
    return -0.5 * (LOG_2PI + bg_logvar + z * z * np.exp(-bg_logvar))


def gated_loglik(x, mu, logvar, bg_mu, bg_logvar, gates):
    """Gated component log-densities, shape (N, K); gates is (N, D)."""
    n = x.shape[0]
    kk = mu.shape[0]
    b = _background_row_logpdf(x, bg_mu, bg_logvar)           # (N, D)
    bg_part = ((1.0 - gates) * b).sum(axis=1)                 # (N,)
    out = np.empty((n, kk))
    for k in range(kk):
        z = x - mu[k]
        a = -0.5 * (LOG_2PI + logvar[k] + z * z * np.exp(-logvar[k]))
        out[:, k] = (gates * a).sum(axis=1) + bg_part
    return out


def objective_grad_stats(x, mu, logvar, bg_mu, bg_logvar, gates, log_pi):
    """Fused forward pass + exact gradient accumulations.

    Returns (nll, resp_sum, d_mu, d_logvar, gate_path); see the compiled
    core for the definitions.
    """
    kk, d = mu.shape
    ll = gated_loglik(x, mu, logvar, bg_mu, bg_logvar, gates)
    a = ll + log_pi
    amax = a.max(axis=1, keepdims=True)
    ex = np.exp(a - amax)
    s = ex.sum(axis=1, keepdims=True)
    nll = -float((amax + np.log(s)).sum())
    r = ex / s                                                # (N, K)
    resp_sum = r.sum(axis=0)

    b = _background_row_logpdf(x, bg_mu, bg_logvar)
    d_mu = np.empty((kk, d))
    d_logvar = np.empty((kk, d))
    m = np.zeros_like(x)                                      # sum_k r_ik * logN_kj
    for k in range(kk):
        prec = np.exp(-logvar[k])
        z = x - mu[k]
        rg = r[:, k, None] * gates
        d_mu[k] = -prec * (rg * z).sum(axis=0)
        d_logvar[k] = 0.5 * (rg * (1.0 - z * z * prec)).sum(axis=0)
        m += r[:, k, None] * (-0.5 * (LOG_2PI + logvar[k] + z * z * prec))
    gate_path = ((m - b) * gates * (1.0 - gates)).sum(axis=0)
    return nll, resp_sum, d_mu, d_logvar, gate_path
