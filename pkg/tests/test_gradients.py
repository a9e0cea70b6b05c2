import numpy as np
import pytest

from conftest import random_instance
from divi.gradients import finite_difference_check, objective_gradients
from divi.model import (
    GateSample,
    ModelParams,
    PriorMode,
    PriorSpec,
    gate_kl_grad,
    sample_relaxed_gates,
)


def test_single_component_alpha_gradient_is_zero(rng):
    x, params, gates, prior = random_instance(rng, k=1)
    _, grads = objective_gradients(x, params, gates, prior, beta=2.0)
    np.testing.assert_allclose(grads.d_alpha, 0.0, atol=1e-9)


def test_mu_gradient_vanishes_at_data_mode(rng):
    d = 4
    mu = rng.normal(0, 1, d)
    x = np.tile(mu, (6, 1))                   # every row exactly at the mean
    params = ModelParams(alpha=np.zeros(1), mu=mu[None, :],
                         logvar=np.zeros((1, d)), eta=np.zeros(d),
                         bg_mu=np.zeros(d), bg_logvar=np.full(d, 2.0))
    gates = sample_relaxed_gates(params.eta, 1.0, rng, n_rows=6)
    prior = PriorSpec(rho=np.full(d, 0.5), mode=PriorMode.NONINFORMATIVE)
    _, grads = objective_gradients(x, params, gates, prior, beta=0.0)
    np.testing.assert_allclose(grads.d_mu, 0.0, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    x, params, gates, prior = random_instance(rng)
    beta = float(x.shape[0]) if seed % 2 else 0.7
    assert finite_difference_check(x, params, gates, prior, beta) <= 1e-6


def test_shared_gate_vector_matches_finite_differences(rng):
    x, params, gates, prior = random_instance(rng, per_row=False)
    assert finite_difference_check(x, params, gates, prior, 3.0) <= 1e-6


def test_beta_zero_keeps_pathwise_eta_gradient(rng):
    x, params, gates, prior = random_instance(rng, n=16, d=5, k=2)
    _, grads = objective_gradients(x, params, gates, prior, beta=0.0)
    assert np.max(np.abs(grads.d_eta)) > 1e-8


def test_hard_gates_reduce_eta_gradient_to_kl_term(rng):
    x, params, _, prior = random_instance(rng, n=12, d=6, k=2)
    hard = (rng.random((12, 6)) > 0.5).astype(float)
    gates = GateSample(values=hard, temperature=0.7, noise=None)
    beta = 5.0
    _, grads = objective_gradients(x, params, gates, prior, beta=beta)
    np.testing.assert_allclose(grads.d_eta, beta * gate_kl_grad(params.eta, prior),
                               atol=1e-12)


def test_uniform_alpha_shift_has_zero_gradient(rng):
    x, params, gates, prior = random_instance(rng, n=20, d=4, k=3)
    _, grads = objective_gradients(x, params, gates, prior, beta=1.0)
    assert abs(grads.d_alpha.sum()) <= 1e-9 * x.shape[0]


def test_gradients_finite(rng):
    for _ in range(5):
        x, params, gates, prior = random_instance(rng)
        _, g = objective_gradients(x, params, gates, prior, beta=1.0)
        for arr in (g.d_alpha, g.d_mu, g.d_logvar, g.d_eta):
            assert np.all(np.isfinite(arr))


def test_shape_mismatch_raises(rng):
    x, params, gates, prior = random_instance(rng, n=8, d=4, k=2)
    with pytest.raises(ValueError):
        objective_gradients(x[:, :3], params, gates, prior, beta=1.0)
