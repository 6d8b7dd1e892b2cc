"""FWER upper bounds for Bonferroni under an arbitrary nonnegative correlation matrix.

All bounds apply the Kounias inequality through the row ``i*`` of ``R`` with
the largest off-diagonal sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .equicorrelated import PI, THM33_X_MAX, BoundResult, TestProblem, make_result, select_best
from .errors import DomainError, MatrixError
from .special import monhor_integral
from .tables import C_TABLE

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10


def tolerant_cholesky(a: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Lower factor ``L`` with ``L @ L.T == a`` for PSD ``a``.

    Pivots in ``[-tol, tol]`` are treated as zero (rank deficiency); a pivot
    below ``-tol`` means ``a`` is not positive semidefinite.
    """
    n = a.shape[0]
    L = np.zeros_like(a, dtype=float)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if pivot < -tol:
            raise MatrixError(f"matrix is not positive semidefinite (pivot {pivot:.3g} at index {j})")
        if pivot <= tol:
            residual = a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]
            if np.any(np.abs(residual) > math.sqrt(tol)):
                raise MatrixError(f"matrix is not positive semidefinite (singular pivot at index {j})")
            continue
        d = math.sqrt(pivot)
        L[j, j] = d
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / d
    return L


class CorrelationMatrix:
    """Validated, read-only correlation matrix with nonnegative entries.

    Validation runs once at construction; the instance is immutable afterwards.
    """

    def __init__(self, entries) -> None:
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MatrixError(f"matrix must be square, got shape {a.shape}")
        n = a.shape[0]
        if n < 2:
            raise MatrixError("matrix dimension must be at least 2")
        if not np.all(np.isfinite(a)):
            raise MatrixError("matrix entries must be finite")
        if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_TOL):
            raise MatrixError("matrix is not symmetric")
        if not np.all(np.diag(a) == 1.0):
            raise MatrixError("diagonal entries must equal 1")
        a = 0.5 * (a + a.T)
        off = a[~np.eye(n, dtype=bool)]
        if np.any(off < 0.0):
            raise MatrixError("off-diagonal entries must be nonnegative")
        if np.any(off >= 1.0):
            raise MatrixError("off-diagonal entries must be below 1")
        self._factor = tolerant_cholesky(a)
        a.setflags(write=False)
        self._factor.setflags(write=False)
        self._entries = a

    @classmethod
    def equicorrelated(cls, n: int, rho: float) -> "CorrelationMatrix":
        a = np.full((n, n), float(rho))
        np.fill_diagonal(a, 1.0)
        return cls(a)

    @classmethod
    def from_csv(cls, path: str | Path) -> "CorrelationMatrix":
        return cls(parse_matrix_csv(Path(path).read_text()))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def factor(self) -> np.ndarray:
        """Lower-triangular Cholesky factor."""
        return self._factor

    def __repr__(self) -> str:
        return f"CorrelationMatrix(dim={self.dim})"


def parse_matrix_csv(text: str) -> np.ndarray:
    """Parse comma-separated rows of decimals; errors name the 1-based row and column."""
    rows = []
    for r, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for c, cell in enumerate(line.split(","), start=1):
            try:
                row.append(float(cell.strip()))
            except ValueError:
                raise MatrixError(f"row {r}, column {c}: cannot parse {cell.strip()!r} as a number") from None
        rows.append((r, row))
    if not rows:
        raise MatrixError("matrix file is empty")
    dim = len(rows)
    for r, row in rows:
        if len(row) != dim:
            raise MatrixError(f"row {r}: expected {dim} values, found {len(row)}")
    return np.array([row for _, row in rows])


@dataclass(frozen=True)
class RowStats:
    istar: int
    jstar: int
    rho_bar: float
    rho_min: float
    row: tuple[float, ...]  # off-diagonal entries of row istar

    @property
    def rho_max(self) -> float:
        return max(self.row)


def row_stats(R: CorrelationMatrix) -> RowStats:
    a = R.entries
    n = R.dim
    # fsum makes equal multisets of entries give identical sums, so ties are exact
    sums = [math.fsum(a[i, j] for j in range(n) if j != i) for i in range(n)]
    istar = max(range(n), key=lambda i: (sums[i], -i))
    others = [j for j in range(n) if j != istar]
    jstar = min(others, key=lambda j: (a[istar, j], j))
    row = tuple(float(a[istar, j]) for j in others)
    return RowStats(istar, jstar, sums[istar] / (n - 1), float(a[istar, jstar]), row)


def _check_dims(problem: TestProblem, R: CorrelationMatrix) -> RowStats:
    if problem.n != R.dim:
        raise DomainError(f"problem has n={problem.n} but the matrix is {R.dim}x{R.dim}")
    return row_stats(R)


def _extra(stats: RowStats, **more) -> dict:
    return {"istar": stats.istar, "jstar": stats.jstar, "rho_bar": stats.rho_bar,
            "rho_min": stats.rho_min, **more}


def _grouped_sum(values, fn) -> float:
    """``sum(fn(v) for v in values)`` evaluating ``fn`` once per distinct value."""
    uniq, counts = np.unique(np.asarray(values), return_counts=True)
    return math.fsum(int(k) * fn(float(v)) for v, k in zip(uniq, counts))


def _scaled_alpha_rho_bar(problem: TestProblem, stats: RowStats) -> float:
    return (problem.n - 1) / problem.n * problem.alpha * stats.rho_bar


def bound_thm41(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    x = problem.x
    return make_result(
        problem, "Thm4.1", [("rho_{i*j} < 1 for all j", s.rho_max < 1.0)],
        lambda: _grouped_sum(s.row, lambda r: monhor_integral(x, r).value) / (2 * PI),
        rho=None, extra=_extra(s),
    )


def bound_cor41(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    n, alpha = problem.n, problem.alpha
    return make_result(
        problem, "Cor4.1", [("rho_{i*j*} <= alpha/n", s.rho_min <= problem.level)],
        lambda: (n - 1) / n * alpha * s.rho_min, rho=None, quadratic=False, extra=_extra(s),
    )


def bound_thm42(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    return make_result(
        problem, "Thm4.2", [("x <= 2", problem.x <= 2.0), ("rho_{i*j*} >= 0.5", s.rho_min >= 0.5)],
        lambda: _scaled_alpha_rho_bar(problem, s) / 6, rho=None, extra=_extra(s),
    )


def bound_thm43(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    return make_result(
        problem, "Thm4.3",
        [("x <= 2", problem.x <= 2.0), ("rho_{i*j*} > alpha/n", s.rho_min > problem.level)],
        lambda: _scaled_alpha_rho_bar(problem, s) * 2 / (5 * PI), rho=None, extra=_extra(s),
    )


def bound_cor42(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    x = problem.x
    return make_result(
        problem, "Cor4.2", [("x >= 2", x >= 2.0)],
        lambda: _grouped_sum(s.row, lambda r: math.asin(r) * math.exp(-x * x / (1 + r / 2))) / (2 * PI),
        rho=None, extra=_extra(s),
    )


def bound_thm44(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    x = problem.x
    c = C_TABLE.lookup(x)
    return make_result(
        problem, "Thm4.4",
        [("2 <= x <= 4.23", 2.0 <= x <= THM33_X_MAX), ("rho_{i*j*} >= 0.5", s.rho_min >= 0.5)],
        lambda: _scaled_alpha_rho_bar(problem, s) / 6 * c, rho=None, extra=_extra(s, table_constant=c),
    )


def bound_trivial_general(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    s = _check_dims(problem, R)
    return make_result(problem, "Bonferroni-trivial", [], lambda: 0.0, rho=None, quadratic=False, extra=_extra(s))


BOUNDS_GENERAL = {
    "Thm4.1": bound_thm41,
    "Cor4.1": bound_cor41,
    "Cor4.2": bound_cor42,
    "Thm4.4": bound_thm44,
    "Thm4.2": bound_thm42,
    "Thm4.3": bound_thm43,
    "Bonferroni-trivial": bound_trivial_general,
}


def all_bounds_general(problem: TestProblem, R: CorrelationMatrix) -> list[BoundResult]:
    return [fn(problem, R) for fn in BOUNDS_GENERAL.values()]


def best_bound_general(problem: TestProblem, R: CorrelationMatrix) -> BoundResult:
    return select_best(all_bounds_general(problem, R))
