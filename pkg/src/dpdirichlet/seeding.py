"""Counter-based derivation of independent random streams from one master seed.

A stream is addressed by ``(master_seed, *key)`` where ``key`` is a tuple of
non-negative integers, e.g. ``(TAG_BOOTSTRAP, b)`` for bootstrap iteration b.
numpy's SeedSequence hashes the pair, so a stream never depends on how many
other streams were created or in which order. Parallel and serial runs are
therefore bit-identical.
"""

from __future__ import annotations

import numpy as np

# first element of every key; keeps the task families apart
TAG_RELEASE = 1
TAG_BOOTSTRAP = 2
TAG_CHAIN = 3
TAG_ABC = 4
TAG_PRIOR = 5
TAG_PREDICTIVE = 6
TAG_SIMULATION = 7
TAG_GROUP = 8


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed, or None (fresh entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit seed from ``rng`` for a nested task."""
    return int(rng.integers(0, 2**63 - 1))
