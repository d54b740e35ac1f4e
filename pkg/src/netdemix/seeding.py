"""Deterministic RNG substream derivation.

Every stochastic component in the library draws from a substream derived
from a master seed plus a tuple of string/int tags.  Substreams are stable
across runs and platforms, and independent draws from sibling substreams do
not interact, so dataset generation and per-cell experiment runs can be
parallelized without changing results.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_to_u32(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    return zlib.crc32(str(tag).encode("utf-8"))


def seed_sequence(master_seed: int, *tags) -> np.random.SeedSequence:
    """SeedSequence for the substream identified by ``tags`` under ``master_seed``."""
    key = tuple(_tag_to_u32(t) for t in tags)
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)


def substream(master_seed: int, *tags) -> np.random.Generator:
    """A fresh Generator on the (master_seed, *tags) substream."""
    return np.random.default_rng(seed_sequence(master_seed, *tags))
