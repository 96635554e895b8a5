"""Counter-based random streams.

Every random draw in the package comes from ``stream(seed, purpose, *counter)``.
The generator depends only on the seed and the counter tuple, so a block of
trials or an optimizer restart reproduces bit-exactly no matter which worker
runs it or in what order.
"""

import numpy as np

from .errors import DomainError

# First counter component, one per consumer
RESTARTS = 0
TRIALS = 1
SAMPLE = 2

_SEED_LIMIT = 2**64


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed."""
    if not 0 <= int(seed) < _SEED_LIMIT:
        raise DomainError(f"seed must be in [0, 2^64), got {seed}")
    return int(seed)


def stream(seed: int, *counter: int) -> np.random.Generator:
    """Independent Philox generator for (seed, counter)."""
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(c) for c in counter))
    return np.random.Generator(np.random.Philox(sequence))
