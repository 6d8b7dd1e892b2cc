"""Pure numpy replication kernels, used when the compiled extension is absent."""

from __future__ import annotations

import math

import numpy as np

from .rng import normals_block

_BLOCK_ELEMENTS = 1 << 21


def _blocks(start: int, stop: int, width: int):
    step = max(_BLOCK_ELEMENTS // max(width, 1), 1)
    for lo in range(start, stop, step):
        yield lo, min(lo + step, stop)


def count_equicorrelated(n: int, rho: float, cutoff: float, seed: int, start: int, stop: int) -> int:
    """Replications in ``[start, stop)`` where some ``X_i`` exceeds ``cutoff``."""
    a = math.sqrt(rho)
    b = math.sqrt(1.0 - rho)
    hits = 0
    for lo, hi in _blocks(start, stop, n + 1):
        z = normals_block(seed, lo, hi, n + 1)
        x = a * z[:, :1] + b * z[:, 1:]
        hits += int(np.count_nonzero((x > cutoff).any(axis=1)))
    return hits


def count_general(factor: np.ndarray, cutoff: float, seed: int, start: int, stop: int) -> int:
    L = np.ascontiguousarray(factor, dtype=float)
    n = L.shape[0]
    hits = 0
    for lo, hi in _blocks(start, stop, n):
        z = normals_block(seed, lo, hi, n)
        hit = np.zeros(hi - lo, dtype=bool)
        for i in range(n):
            # accumulate in ascending k to match the compiled kernel bit for bit
            acc = np.zeros(hi - lo)
            for k in range(i + 1):
                acc = acc + L[i, k] * z[:, k]
            hit |= acc > cutoff
        hits += int(np.count_nonzero(hit))
    return hits
