"""Deterministic, portable RNG streams.

Every random decision in the toolkit draws from a numpy PCG64 generator
seeded with the SHA-256 digest of the global seed plus a path of string
tokens (e.g. ``("attack", utterance_id)``). This keeps runs reproducible
across platforms and processes, independent of Python hash randomization,
and gives independent streams per utterance and per embedded language.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, *path: str) -> int:
    """128-bit integer derived from a global seed and a path of strings."""
    h = hashlib.sha256()
    h.update(str(int(seed)).encode("utf-8"))
    for part in path:
        h.update(b"\x1f")
        h.update(part.encode("utf-8"))
    return int.from_bytes(h.digest()[:16], "big")


def derive_rng(seed: int, *path: str) -> np.random.Generator:
    """Fresh PCG64 generator on the stream named by ``path``."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *path)))
