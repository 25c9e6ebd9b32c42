"""Deterministic seed derivation.

Every random stream is keyed by an integer seed plus a tuple of integer
keys (replication index, mixture component, jump side, ...). The derived
seed is the first 64-bit word of ``SeedSequence(seed, spawn_key=keys)``,
so a child stream can be reproduced in isolation from its parent seed and
its keys alone.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or seed < 0:
        raise InvalidParameter(f"seeds must be non-negative integers, got {seed!r}")
    return int(seed)


def derive_seed(seed: int, *keys: int) -> int:
    seq = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    if not keys:
        return np.random.default_rng(check_seed(seed))
    return np.random.default_rng(np.random.SeedSequence(check_seed(seed), spawn_key=tuple(keys)))
