"""Deterministic seed derivation.

Every source of randomness in the pipeline is a numpy Generator seeded from
a 64-bit value derived here. Derivation hashes the parent seed together with
a stream name, so parallel execution order can never change results.
"""

import hashlib

import numpy as np


def derive_seed(seed: int, *names) -> int:
    """Derive a child 64-bit seed from ``seed`` and a tuple of stream names."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for name in names:
        h.update(b"\x00")
        h.update(str(name).encode())
    return int.from_bytes(h.digest(), "little")


def derive_rng(seed: int, *names) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *names))
