import numpy as np
import pytest

from divi.model import ModelParams, PriorMode, PriorSpec, sample_relaxed_gates


def random_instance(rng, n=None, d=None, k=None, temperature=None, per_row=True):
    """Small random model/data/gates/prior instance for gradient tests.

    Parameters stay in ranges where no clamp is active, so the objective is
    smooth everywhere the finite-difference probe looks.
    """
    n = n or int(rng.integers(4, 33))
    d = d or int(rng.integers(2, 9))
    k = k or int(rng.integers(1, 4))
    x = np.ascontiguousarray(rng.normal(0.0, 1.5, (n, d)))
    params = ModelParams(
        alpha=rng.normal(0.0, 1.0, k),
        mu=rng.normal(0.0, 1.0, (k, d)),
        logvar=rng.uniform(-1.5, 1.0, (k, d)),
        eta=rng.uniform(-3.0, 3.0, d),
        bg_mu=rng.normal(0.0, 0.3, d),
        bg_logvar=rng.uniform(1.0, 3.0, d),
    )
    temperature = temperature or float(rng.uniform(0.5, 1.5))
    gates = sample_relaxed_gates(params.eta, temperature, rng,
                                 n_rows=n if per_row else None)
    prior = PriorSpec(rho=rng.uniform(0.05, 0.95, d), mode=PriorMode.RANDOM)
    return x, params, gates, prior


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
