"""Counter-based random stream keyed by ``(seed, replication, position)``.

Every variate is a pure function of its three coordinates, so replications can
be computed in any order or partition and still give bitwise-identical results.
The compiled kernel implements the same construction; keep the two in sync.

    key(seed)          = mix64(seed mod 2^64)
    key(seed, rep)     = mix64(key(seed) + (rep + 1) * GAMMA)
    word(seed, rep, j) = mix64(key(seed, rep) + (j + 1) * GAMMA2)
    uniform            = ((word >> 11) + 0.5) * 2^-53        in (0, 1)
    normal             = std_normal_quantile(uniform)

``mix64`` is the SplitMix64 finalizer. All arithmetic is modulo 2^64.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from ..special import _A, _B, _C, _D, NEWTON_STEPS, P_LOW, SQRT2, SQRT2PI, std_normal_quantile

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
GAMMA2 = 0xD1B54A32D192ED03
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB
TWO_M53 = 2.0 ** -53


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * M1) & MASK
    z = ((z ^ (z >> 27)) * M2) & MASK
    return z ^ (z >> 31)


def seed_key(seed: int) -> int:
    return mix64(int(seed) & MASK)


def stream_key(seed: int, rep: int) -> int:
    return mix64(seed_key(seed) + (rep + 1) * GAMMA)


class CounterStream:
    """Variates of one replication; position ``j`` is addressed directly."""

    def __init__(self, seed: int, replication: int) -> None:
        self.seed = int(seed)
        self.replication = int(replication)
        self._key = stream_key(seed, replication)

    def word(self, j: int) -> int:
        return mix64(self._key + (j + 1) * GAMMA2)

    def uniform(self, j: int) -> float:
        return ((self.word(j) >> 11) + 0.5) * TWO_M53

    def normal(self, j: int) -> float:
        return std_normal_quantile(self.uniform(j))

    def uniforms(self, count: int) -> np.ndarray:
        return uniforms_block(self.seed, self.replication, self.replication + 1, count)[0]

    def normals(self, count: int) -> np.ndarray:
        return np.array([self.normal(j) for j in range(count)])


# --- vectorized equivalents (uint64 arithmetic wraps modulo 2^64) ---

def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(M2)
    return z ^ (z >> np.uint64(31))


def uniforms_block(seed: int, rep_start: int, rep_stop: int, count: int) -> np.ndarray:
    """Uniforms for replications ``[rep_start, rep_stop)`` and positions ``[0, count)``."""
    with np.errstate(over="ignore"):
        reps = np.arange(rep_start, rep_stop, dtype=np.uint64)
        keys = _mix64_array(np.uint64(seed_key(seed)) + (reps + np.uint64(1)) * np.uint64(GAMMA))
        pos = (np.arange(count, dtype=np.uint64) + np.uint64(1)) * np.uint64(GAMMA2)
        words = _mix64_array(keys[:, None] + pos[None, :])
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * TWO_M53


def quantile_array(p: np.ndarray) -> np.ndarray:
    """Elementwise :func:`std_normal_quantile` for ``p`` in (0, 1)."""
    p = np.asarray(p, dtype=float)
    upper = p > 0.5
    lo = np.where(upper, 1.0 - p, p)
    tail = lo < P_LOW
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.sqrt(-2.0 * np.log(np.where(tail, lo, 0.5)))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        y_tail = num / den
    c = lo - 0.5
    r = c * c
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * c
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    y = np.where(tail, y_tail, num / den)
    for _ in range(NEWTON_STEPS):
        y = y - (0.5 * special.erfc(-y / SQRT2) - lo) / (np.exp(-0.5 * y * y) / SQRT2PI)
    return np.where(upper, -y, y)


def normals_block(seed: int, rep_start: int, rep_stop: int, count: int) -> np.ndarray:
    return quantile_array(uniforms_block(seed, rep_start, rep_stop, count))


def check_seed(seed) -> int:
    seed = int(seed)
    if not (-(1 << 63) <= seed <= MASK):
        raise ValueError("seed must fit in 64 bits")
    return seed

