"""Named random substreams derived from a single run seed.

Splitting rule: the stream for ``(seed, name, *keys)`` is a PCG64 generator
seeded by ``SeedSequence(seed, spawn_key=(crc32(name), *keys))``. Each GA
phase (init, selection, crossover, mutation) draws from its own stream,
re-derived per generation, so the evolution path depends only on the seed
and never on logging, timing, or the order in which evaluations complete.
"""

from __future__ import annotations

import zlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def _seed_sequence(seed: int, name: str, keys: tuple[int, ...]) -> np.random.SeedSequence:
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.SeedSequence(int(seed), spawn_key=(_name_key(name), *map(int, keys)))


def substream(seed: int, name: str, *keys: int) -> np.random.Generator:
    """Independent generator for the named purpose and integer keys."""
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed, name, keys)))


def derive_seed(seed: int, name: str, *keys: int) -> int:
    """A 64-bit integer seed for the named purpose, e.g. a per-task seed."""
    lo, hi = _seed_sequence(seed, name, keys).generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)
