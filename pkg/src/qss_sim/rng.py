"""Seeded random streams.

Every stream is a numpy ``Generator`` over PCG64 seeded from
``SeedSequence(seed, spawn_key=key)``. Keys are tuples of small integers such
as ``(trial, ROUND, round_id)``, so each round draws from its own stream and
results do not depend on the order in which rounds are executed.
"""

from __future__ import annotations

import numpy as np

ROUND = 0
TRANSMISSION = 1
SESSION = 2


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))
