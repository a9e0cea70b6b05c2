"""Labeled RNG substreams.

Every stochastic stage (data generation, prior construction, gate noise,
split perturbations) draws from its own generator derived from the root
seed plus a stage label, so changing how much randomness one stage consumes
never shifts the draws seen by the others.
"""

import zlib

import numpy as np


def substream(seed, label):
    """Generator for stage `label` under root `seed` (deterministic)."""
    if seed is None:
        seed = 0
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))
