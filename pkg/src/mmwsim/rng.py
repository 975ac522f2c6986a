"""Deterministic RNG substreams.

Every stochastic stage draws from a stream keyed by (seed, trial, stage), so
results do not depend on how trials are scheduled across workers.
"""

import numpy as np

# Stage indices within one trial.
STAGE_CHANNEL = 0
STAGE_TRAINING = 1
STAGE_PILOT = 2
STAGE_DATA = 3


def substream(seed, *key):
    """Generator for the substream identified by `key` under `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
