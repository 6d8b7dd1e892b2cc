"""Reproducible Monte Carlo estimation of the Bonferroni FWER under the global null.

Replication ``r`` draws its normals from the counter stream ``(seed, r)``; the
estimate is the fraction of replications in which some component exceeds the
Bonferroni cutoff. Replications are split into contiguous blocks, one per
worker, and the per-block hit counts are summed, so the result does not
depend on the number of workers.

The replication loop runs in a compiled extension when it is built and falls
back to numpy otherwise. Set ``FWER_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..equicorrelated import Equicorrelation, TestProblem, baseline_alpha_one_minus_rho, best_bound
from ..errors import DomainError
from ..general import CorrelationMatrix
from . import _fallback
from .rng import CounterStream, check_seed, seed_key

try:
    if os.environ.get("FWER_BACKEND", "").lower() == "python":
        raise ImportError("compiled backend disabled by FWER_BACKEND")
    from . import _kernel
except ImportError:
    _kernel = None

BACKEND = "compiled" if _kernel is not None else "python"

DEFAULT_REPS = 10_000
DEFAULT_SEED = 42
MIN_REPS = 100
DEFAULT_GRID = tuple(k / 40 for k in range(41))

Model = Union[Equicorrelation, CorrelationMatrix, float]


def default_threads() -> int:
    value = os.environ.get("FWER_THREADS")
    return max(int(value), 1) if value else 1


def sample_equicorrelated(n: int, rho: float, stream: CounterStream) -> np.ndarray:
    """One draw ``X_i = sqrt(rho) Z_0 + sqrt(1 - rho) Z_i``; ``Z_0`` is stream position 0."""
    if not (0.0 <= rho <= 1.0):
        raise DomainError(f"rho must lie in [0, 1], got {rho!r}")
    z = stream.normals(n + 1)
    return math.sqrt(rho) * z[0] + math.sqrt(1.0 - rho) * z[1:]


def sample_general(factor: np.ndarray, stream: CounterStream) -> np.ndarray:
    """One draw ``X = L Z`` for a lower-triangular factor ``L``."""
    L = np.asarray(factor, dtype=float)
    n = L.shape[0]
    z = stream.normals(n)
    x = np.empty(n)
    for i in range(n):
        acc = 0.0
        for k in range(i + 1):
            acc = acc + L[i, k] * z[k]
        x[i] = acc
    return x


def _count_block(model, cutoff: float, seed: int, start: int, stop: int, backend: str) -> int:
    compiled = backend == "compiled"
    if isinstance(model, CorrelationMatrix):
        if compiled:
            return _kernel.count_general(np.ascontiguousarray(model.factor), cutoff, seed_key(seed), start, stop)
        return _fallback.count_general(model.factor, cutoff, seed, start, stop)
    n, rho = model
    if compiled:
        return _kernel.count_equicorrelated(n, rho, cutoff, seed_key(seed), start, stop)
    return _fallback.count_equicorrelated(n, rho, cutoff, seed, start, stop)


def count_exceedances(model, cutoff: float, reps: int, seed: int,
                      threads: int | None = None, backend: str | None = None) -> int:
    """Number of replications in ``[0, reps)`` with ``max_i X_i > cutoff``.

    ``model`` is a :class:`CorrelationMatrix` or an ``(n, rho)`` pair.
    """
    backend = backend or BACKEND
    if backend == "compiled" and _kernel is None:
        raise RuntimeError("compiled backend is not available")
    threads = threads or default_threads()
    workers = max(1, min(threads, reps))
    edges = [reps * k // workers for k in range(workers + 1)]
    blocks = list(zip(edges[:-1], edges[1:]))
    if workers == 1:
        return _count_block(model, cutoff, seed, 0, reps, backend)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        counts = pool.map(lambda b: _count_block(model, cutoff, seed, b[0], b[1], backend), blocks)
        return sum(counts)


@dataclass(frozen=True)
class SimEstimate:
    fwer_hat: float
    stderr: float
    reps: int
    seed: int
    rejections_at_least_one: int

    @classmethod
    def from_count(cls, hits: int, reps: int, seed: int) -> "SimEstimate":
        p = hits / reps
        return cls(p, math.sqrt(p * (1.0 - p) / reps), reps, seed, hits)


def estimate_fwer(problem: TestProblem, model: Model, reps: int = DEFAULT_REPS, seed: int = DEFAULT_SEED,
                  threads: int | None = None, backend: str | None = None) -> SimEstimate:
    """Monte Carlo FWER of the Bonferroni procedure for ``problem`` under ``model``."""
    if isinstance(reps, bool) or int(reps) != reps or reps < MIN_REPS:
        raise DomainError(f"reps must be an integer >= {MIN_REPS}, got {reps!r}")
    reps = int(reps)
    seed = check_seed(seed)
    if isinstance(model, CorrelationMatrix):
        if model.dim != problem.n:
            raise DomainError(f"problem has n={problem.n} but the matrix is {model.dim}x{model.dim}")
        spec = model
    else:
        rho = model.rho if isinstance(model, Equicorrelation) else Equicorrelation(float(model)).rho
        spec = (problem.n, rho)
    hits = count_exceedances(spec, problem.x, reps, seed, threads, backend)
    return SimEstimate.from_count(hits, reps, seed)


@dataclass(frozen=True)
class SweepRow:
    rho: float
    fwer_hat: float
    stderr: float
    bound_value: float
    bound_method: str
    baseline_alpha_one_minus_rho: float


def sweep(problem: TestProblem, rho_grid: Sequence[float] = DEFAULT_GRID, reps: int = DEFAULT_REPS,
          seed: int = DEFAULT_SEED, threads: int | None = None, backend: str | None = None) -> list[SweepRow]:
    """Estimate, best bound and ``alpha (1 - rho)`` at each grid correlation.

    Every grid point reuses the same seed, so neighbouring estimates share
    random numbers and the curve is smooth in ``rho``.
    """
    grid = sorted(float(r) for r in rho_grid)
    for r in grid:
        if not (0.0 <= r <= 1.0):
            raise DomainError(f"grid value {r} outside [0, 1]")
    rows = []
    for rho in grid:
        est = estimate_fwer(problem, rho, reps, seed, threads, backend)
        bound = best_bound(problem, rho)
        rows.append(SweepRow(rho, est.fwer_hat, est.stderr, bound.value, bound.method,
                             baseline_alpha_one_minus_rho(problem, rho)))
    return rows


CSV_COLUMNS = ("rho", "fwer_hat", "stderr", "bound_value", "bound_method", "alpha_one_minus_rho")


def fmt(value: float) -> str:
    """Ten significant digits."""
    return f"{value:.10g}"


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([fmt(r.rho), fmt(r.fwer_hat), fmt(r.stderr), fmt(r.bound_value), r.bound_method,
                         fmt(r.baseline_alpha_one_minus_rho)])
    return buf.getvalue()


__all__ = [
    "BACKEND", "CounterStream", "DEFAULT_REPS", "DEFAULT_SEED", "DEFAULT_GRID", "SimEstimate", "SweepRow",
    "count_exceedances", "estimate_fwer", "sample_equicorrelated", "sample_general", "sweep", "sweep_to_csv",
]
