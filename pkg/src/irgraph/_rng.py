"""Seed derivation helpers.

All randomness in the package flows from explicit integer master seeds.
Substreams are derived with ``numpy.random.SeedSequence`` keyed on integer
paths, so any component (a harness replication, a sampler row, a clock item)
gets its own stream independent of execution order and thread count.
"""

from __future__ import annotations

import numpy as np

# Fixed tags keeping unrelated substreams of one master seed apart.
TAG_WEIGHTS = 0x57454947
TAG_GRAPH = 0x47524150
TAG_EXPLORE = 0x4558504C
TAG_REPLICATION = 0x52455053

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def seed_sequence(master_seed: int, *path: int) -> np.random.SeedSequence:
    """SeedSequence for ``(master_seed, *path)``; path entries are small ints."""
    return np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *map(int, path)])


def generator(master_seed: int, *path: int) -> np.random.Generator:
    """A PCG64 generator on the substream addressed by ``path``."""
    return np.random.default_rng(seed_sequence(master_seed, *path))


def kernel_seed(master_seed: int, *path: int) -> np.uint64:
    """A 64-bit state for the in-kernel counter-based streams."""
    return np.uint64(seed_sequence(master_seed, *path).generate_state(1, np.uint64)[0])


def mix64(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """SplitMix64 finalizer; bijective on uint64, vectorizes over arrays."""
    z = np.uint64(z) if np.isscalar(z) else z.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed64: np.uint64, count: int) -> np.ndarray:
    """Per-index uniforms in [0, 1): item ``k`` depends only on (seed, k).

    This is the counter-based substream used for the exponential-clock
    sampler: the value at index k never depends on how many other values
    are drawn, so results are identical under any parallel split.
    """
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = mix64((np.uint64(seed64) ^ mix64(idx)) + _GOLDEN)
    return (x >> np.uint64(11)) * (1.0 / 9007199254740992.0)
