"""Deterministic RNG derivation.

Every stochastic component derives its generator from a master seed plus
a fixed tuple of integer keys (tree index, boosting round, epoch, ...),
so reruns and concurrent schedules produce identical streams.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_rng(master_seed, *keys):
    """Return a Generator seeded by ``(master_seed, *keys)``."""
    entropy = [int(master_seed) & _MASK64] + [int(k) & _MASK64 for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(master_seed, *keys) -> int:
    """Collapse ``(master_seed, *keys)`` into a single 32-bit seed."""
    entropy = [int(master_seed) & _MASK64] + [int(k) & _MASK64 for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])
