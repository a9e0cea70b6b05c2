# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner kernels for the gated-mixture hot loops.

Both kernels carry the O(N*K*D) work of a training epoch: per-sample,
per-component gated Gaussian log-densities, and the exact gradient
accumulations.  Gates are a full (N, D) matrix (each row may carry its own
relaxed draw; broadcast a single vector for deterministic evaluations).
Loops are strictly sequential (samples outer, components/features inner) so
reductions are reproducible bit for bit across runs.
"""

import numpy as np

from libc.math cimport exp, log

cdef double LOG_2PI = 1.8378770664093453


def gated_loglik(const double[:, ::1] x, const double[:, ::1] mu, const double[:, ::1] logvar,
                 const double[::1] bg_mu, const double[::1] bg_logvar, const double[:, ::1] gates):
    """Gated component log-densities, shape (N, K).

    Entry (i, k) is sum_j [ g_ij * logN(x_ij | mu_kj, exp(logvar_kj))
                            + (1 - g_ij) * logN(x_ij | bg_mu_j, exp(bg_logvar_j)) ].
    """
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], kk = mu.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc, z, gij, aij, bij

    out_arr = np.empty((n, kk), dtype=np.float64)
    prec_arr = np.empty((kk, d), dtype=np.float64)
    bgp_arr = np.empty(d, dtype=np.float64)
    bgc_arr = np.empty(d, dtype=np.float64)
    brow_arr = np.empty(d, dtype=np.float64)

    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] prec = prec_arr
    cdef double[::1] bgp = bgp_arr
    cdef double[::1] bgc = bgc_arr
    cdef double[::1] brow = brow_arr

    for k in range(kk):
        for j in range(d):
            prec[k, j] = exp(-logvar[k, j])
    for j in range(d):
        bgp[j] = exp(-bg_logvar[j])
        bgc[j] = -0.5 * (LOG_2PI + bg_logvar[j])

    for i in range(n):
        for j in range(d):
            z = x[i, j] - bg_mu[j]
            brow[j] = bgc[j] - 0.5 * bgp[j] * z * z
        for k in range(kk):
            acc = 0.0
            for j in range(d):
                z = x[i, j] - mu[k, j]
                aij = -0.5 * (LOG_2PI + logvar[k, j] + prec[k, j] * z * z)
                gij = gates[i, j]
                acc += gij * aij + (1.0 - gij) * brow[j]
            out[i, k] = acc
    return out_arr


def objective_grad_stats(const double[:, ::1] x, const double[:, ::1] mu, const double[:, ::1] logvar,
                         const double[::1] bg_mu, const double[::1] bg_logvar,
                         const double[:, ::1] gates, const double[::1] log_pi):
    """Fused forward pass + exact gradient accumulations.

    Returns (nll, resp_sum, d_mu, d_logvar, gate_path) where

        nll         = -sum_i logsumexp_k(log_pi_k + ll_ik)
        resp_sum_k  = sum_i r_ik
        d_mu[k,j]   = -prec_kj * sum_i r_ik * g_ij * (x_ij - mu_kj)
        d_logvar[k,j] = 0.5 * sum_i r_ik * g_ij * (1 - (x_ij-mu_kj)^2 * prec_kj)
        gate_path_j = sum_i (m_ij - b_ij) * g_ij * (1 - g_ij)

    with r_ik the responsibilities, m_ij = sum_k r_ik * logN_kj(x_ij) and
    b_ij the background log-density.  The temperature division and the KL
    term are applied by the caller.
    """
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], kk = mu.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc, z, gij, aij, m, s, lse, nll, r

    prec_arr = np.empty((kk, d), dtype=np.float64)
    bgp_arr = np.empty(d, dtype=np.float64)
    bgc_arr = np.empty(d, dtype=np.float64)
    brow_arr = np.empty(d, dtype=np.float64)
    mrow_arr = np.empty(d, dtype=np.float64)
    lbuf_arr = np.empty(kk, dtype=np.float64)
    ebuf_arr = np.empty(kk, dtype=np.float64)
    rsum_arr = np.zeros(kk, dtype=np.float64)
    dmu_arr = np.zeros((kk, d), dtype=np.float64)
    dlv_arr = np.zeros((kk, d), dtype=np.float64)
    gpath_arr = np.zeros(d, dtype=np.float64)

    cdef double[:, ::1] prec = prec_arr
    cdef double[::1] bgp = bgp_arr
    cdef double[::1] bgc = bgc_arr
    cdef double[::1] brow = brow_arr
    cdef double[::1] mrow = mrow_arr
    cdef double[::1] lbuf = lbuf_arr
    cdef double[::1] ebuf = ebuf_arr
    cdef double[::1] rsum = rsum_arr
    cdef double[:, ::1] dmu = dmu_arr
    cdef double[:, ::1] dlv = dlv_arr
    cdef double[::1] gpath = gpath_arr

    for k in range(kk):
        for j in range(d):
            prec[k, j] = exp(-logvar[k, j])
    for j in range(d):
        bgp[j] = exp(-bg_logvar[j])
        bgc[j] = -0.5 * (LOG_2PI + bg_logvar[j])

    nll = 0.0
    for i in range(n):
        for j in range(d):
            z = x[i, j] - bg_mu[j]
            brow[j] = bgc[j] - 0.5 * bgp[j] * z * z
            mrow[j] = 0.0

        m = -1e308
        for k in range(kk):
            acc = 0.0
            for j in range(d):
                z = x[i, j] - mu[k, j]
                aij = -0.5 * (LOG_2PI + logvar[k, j] + prec[k, j] * z * z)
                gij = gates[i, j]
                acc += gij * aij + (1.0 - gij) * brow[j]
            acc += log_pi[k]
            lbuf[k] = acc
            if acc > m:
                m = acc

        s = 0.0
        for k in range(kk):
            ebuf[k] = exp(lbuf[k] - m)
            s += ebuf[k]
        lse = m + log(s)
        nll -= lse

        for k in range(kk):
            r = ebuf[k] / s
            rsum[k] += r
            for j in range(d):
                z = x[i, j] - mu[k, j]
                gij = gates[i, j]
                aij = -0.5 * (LOG_2PI + logvar[k, j] + prec[k, j] * z * z)
                mrow[j] += r * aij
                dmu[k, j] -= prec[k, j] * r * gij * z
                dlv[k, j] += 0.5 * r * gij * (1.0 - prec[k, j] * z * z)

        for j in range(d):
            gij = gates[i, j]
            gpath[j] += (mrow[j] - brow[j]) * gij * (1.0 - gij)

    return nll, rsum_arr, dmu_arr, dlv_arr, gpath_arr
