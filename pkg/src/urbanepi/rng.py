"""Named, reproducible random substreams.

Every stream is derived from (scenario seed, stream index, extra keys...), so
streams never overlap and per-agent streams do not depend on the order agents
are processed in.
"""

from __future__ import annotations

import random

import numpy as np

POPULATION_STREAM = 0
AGENDA_STREAM = 1
EPIDEMIC_STREAM = 2
MOVEMENT_STREAM = 3
CITYGEN_STREAM = 4
SEEDING_STREAM = 5


def derived_seed(*key: int) -> int:
    """Stable 64-bit seed derived from an integer key tuple."""
    state = np.random.SeedSequence(tuple(int(k) for k in key)).generate_state(
        2, dtype=np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def derived_random(*key: int) -> random.Random:
    return random.Random(derived_seed(*key))
