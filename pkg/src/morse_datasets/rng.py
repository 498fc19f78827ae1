"""Counter-keyed random substreams.

Every random draw in the package comes from a generator built here, keyed
on ``(master_seed, domain, *counters)``.  Two calls with the same key give
identical streams regardless of call order, so sample generation can be
split across workers without changing the output.
"""

from __future__ import annotations

import numpy as np

# Stream domains; never renumber, it would change every generated dataset.
SAMPLE = 0
SPLIT = 1
MASK = 2
INIT = 3
SHUFFLE = 4

_SEED_MASK = (1 << 64) - 1


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= _SEED_MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(master_seed: int, domain: int, *counters: int) -> np.random.Generator:
    """Independent PCG64 stream for ``(master_seed, domain, *counters)``."""
    ss = np.random.SeedSequence(check_seed(master_seed), spawn_key=(domain, *map(int, counters)))
    return np.random.Generator(np.random.PCG64(ss))
