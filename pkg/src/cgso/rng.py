"""Keyed, counter-based random streams.

Every random draw in the package comes from ``stream(seed, *keys)``. The
same (seed, keys) always yields the same Philox stream, and distinct keys
give statistically independent streams, so repeats and grid cells can run
in any order without sharing state.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key(k) -> int:
    if isinstance(k, str):
        return int.from_bytes(hashlib.blake2b(k.encode(), digest_size=8).digest(), "little")
    return int(k) & 0xFFFFFFFFFFFFFFFF


def seed_sequence(seed: int, *keys) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(_key(k) for k in keys)
    )


def stream(seed: int, *keys) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *keys)))


def derive_seed(seed: int, *keys) -> int:
    """A 64-bit child seed, for handing to code that takes a plain integer."""
    return int(seed_sequence(seed, *keys).generate_state(1, np.uint64)[0])
