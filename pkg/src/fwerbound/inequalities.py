"""Degree-two upper bounds on the probability of a union of events.

Both bounds use only the marginals ``P(A_i)`` and the pairwise intersections
``P(A_i & A_j)``. :func:`union_oracle` computes the exact union probability
on a finite event space and exists to test them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidSystemError

SLACK = 1e-12


@dataclass(frozen=True)
class PairwiseSystem:
    marginals: np.ndarray
    pairwise: np.ndarray

    def __init__(self, marginals: Sequence[float], pairwise) -> None:
        m = np.asarray(marginals, dtype=float)
        p = np.array(pairwise, dtype=float)
        n = m.shape[0]
        if m.ndim != 1 or n < 2:
            raise InvalidSystemError("need at least two events")
        if p.shape != (n, n):
            raise InvalidSystemError(f"pairwise matrix must be {n}x{n}, got {p.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(p))):
            raise InvalidSystemError("probabilities must be finite")
        if np.any(m < 0) or np.any(m > 1):
            raise InvalidSystemError("marginals must lie in [0, 1]")
        np.fill_diagonal(p, 0.0)
        if not np.allclose(p, p.T, rtol=0.0, atol=SLACK):
            raise InvalidSystemError("pairwise matrix must be symmetric")
        cap = np.minimum.outer(m, m)
        off = ~np.eye(n, dtype=bool)
        if np.any(p[off] < -SLACK) or np.any(p[off] > cap[off] + SLACK):
            raise InvalidSystemError("need 0 <= P(Ai & Aj) <= min(P(Ai), P(Aj))")
        p.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "marginals", m)
        object.__setattr__(self, "pairwise", p)

    @property
    def n(self) -> int:
        return self.marginals.shape[0]

    @property
    def s1(self) -> float:
        return float(self.marginals.sum())

    @property
    def s2(self) -> float:
        return float(np.triu(self.pairwise, 1).sum())

    def row_sums(self) -> np.ndarray:
        return self.pairwise.sum(axis=1)


def _clamp(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def kwerel_upper(system: PairwiseSystem, clamp: bool = True) -> float:
    """Sobel-Uppuluri / Kwerel bound ``S1 - (2/n) S2``."""
    raw = system.s1 - 2.0 / system.n * system.s2
    return _clamp(raw) if clamp else raw


def kounias_upper(system: PairwiseSystem, clamp: bool = True) -> tuple[float, int]:
    """Kounias bound ``S1 - max_i sum_{j != i} P(Ai & Aj)`` and the maximizing row.

    Ties go to the smallest index.
    """
    rows = system.row_sums()
    i = int(np.argmax(rows))  # argmax returns the first maximizer
    raw = system.s1 - float(rows[i])
    return (_clamp(raw) if clamp else raw), i


@dataclass(frozen=True)
class FiniteEventSpace:
    atom_probabilities: tuple[float, ...]
    membership: tuple[frozenset[int], ...]

    def __init__(self, atom_probabilities: Sequence[float], membership: Sequence[Sequence[int]]) -> None:
        probs = tuple(float(p) for p in atom_probabilities)
        if any(p < 0 for p in probs):
            raise InvalidSystemError("atom probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > SLACK:
            raise InvalidSystemError(f"atom probabilities sum to {sum(probs)!r}, not 1")
        events = tuple(frozenset(int(a) for a in ev) for ev in membership)
        for ev in events:
            if any(a < 0 or a >= len(probs) for a in ev):
                raise InvalidSystemError("event references an unknown atom")
        object.__setattr__(self, "atom_probabilities", probs)
        object.__setattr__(self, "membership", events)

    def prob(self, atoms) -> float:
        # rounding can push a near-certain event a hair above 1
        return min(math.fsum(self.atom_probabilities[a] for a in atoms), 1.0)

    def pairwise_system(self) -> PairwiseSystem:
        n = len(self.membership)
        marginals = [self.prob(ev) for ev in self.membership]
        pairwise = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                pairwise[i, j] = pairwise[j, i] = self.prob(self.membership[i] & self.membership[j])
        return PairwiseSystem(marginals, pairwise)


def union_oracle(space: FiniteEventSpace) -> float:
    """Exact ``P(union of events)`` by summing the atoms any event contains."""
    covered = frozenset().union(*space.membership)
    return space.prob(sorted(covered))


def random_event_space(rng: np.random.Generator, max_atoms: int = 10, max_events: int = 5) -> FiniteEventSpace:
    """Random space with 2..max_events events over 1..max_atoms atoms."""
    n_atoms = int(rng.integers(1, max_atoms + 1))
    n_events = int(rng.integers(2, max_events + 1))
    weights = rng.exponential(size=n_atoms)
    probs = weights / weights.sum()
    probs[-1] = 1.0 - probs[:-1].sum()
    membership = [np.flatnonzero(rng.random(n_atoms) < rng.random()).tolist() for _ in range(n_events)]
    return FiniteEventSpace(probs, membership)
