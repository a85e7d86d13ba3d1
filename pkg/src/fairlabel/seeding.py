"""Deterministic derivation of independent random streams."""

import hashlib

import numpy as np


def derive_seed(seed: int, *stage) -> int:
    """Hash ``(seed, stage...)`` into a 63-bit seed.

    Adding a new stage name never shifts the stream of an existing one.
    """
    key = ":".join([str(int(seed)), *map(str, stage)]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little") >> 1


def rng_for(seed: int, *stage) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *stage))
