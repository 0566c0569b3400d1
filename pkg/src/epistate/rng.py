"""Seeded randomness.

Every random decision in the package is drawn from an explicit generator.
Bulk experiments draw a fixed-width row of uniforms per shot from
per-block streams keyed by ``(seed, stream, block)``, which makes each
shot's record a function of the seed and shot index alone, no matter how
blocks are distributed over workers.
"""
from __future__ import annotations

import numpy as np

BLOCK_SHOTS = 1 << 16
BOOTSTRAP_STREAM = 0xB007
MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """A PCG64 generator for ``seed`` and an optional spawn key path."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def block_draws(seed: int, stream: int, block: int, n: int, width: int) -> np.ndarray:
    """Uniform draws for shots ``block*BLOCK_SHOTS .. +n`` of one stream."""
    if n > BLOCK_SHOTS:
        raise ValueError("a block holds at most BLOCK_SHOTS shots")
    return make_rng(seed, stream, block).random((n, width))


def shot_draws(seed: int, stream: int, start: int, stop: int, width: int) -> np.ndarray:
    """Draw rows for an arbitrary shot range, stitched from whole blocks."""
    if stop <= start:
        return np.empty((0, width))
    first, last = start // BLOCK_SHOTS, (stop - 1) // BLOCK_SHOTS
    parts = []
    for b in range(first, last + 1):
        rows = block_draws(seed, stream, b, BLOCK_SHOTS, width)
        lo = max(start - b * BLOCK_SHOTS, 0)
        hi = min(stop - b * BLOCK_SHOTS, BLOCK_SHOTS)
        parts.append(rows[lo:hi])
    return np.concatenate(parts)


class RowRng:
    """Serves one shot's pre-drawn uniforms through ``random()``.

    Lets the object-level engines replay exactly the randomness a bulk
    kernel consumed for the same shot.
    """

    def __init__(self, row):
        self._row = [float(x) for x in row]
        self.used = 0

    def random(self) -> float:
        if self.used >= len(self._row):
            raise RuntimeError("shot consumed more draws than its row holds")
        u = self._row[self.used]
        self.used += 1
        return u
