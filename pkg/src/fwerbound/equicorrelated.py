"""FWER upper bounds for Bonferroni under an equicorrelated Gaussian null.

Every bound has the shape ``alpha - quadratic_term - correlation_term`` where
``quadratic_term = ((n-1)/n) * alpha^2 / n`` comes from the independent part of
the pairwise intersections and ``correlation_term`` lower-bounds the excess due
to correlation with progressively cruder closed forms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

from .errors import DomainError
from .special import monhor_integral, std_normal_quantile
from .tables import C_TABLE, d_table_for_rho

PI = math.pi
THM33_X_MAX = 4.23
THM34_X_MAX = 4.42
THM34_RHO_MIN = 0.01
TRIVIAL = "Bonferroni-trivial"


@dataclass(frozen=True)
class TestProblem:
    """``n`` one-sided tests at Bonferroni level ``alpha``; ``x`` is the per-test cutoff."""

    n: int
    alpha: float
    x: float = field(init=False)

    __test__ = False  # not a pytest class

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.alpha / self.n >= 0.5:
            raise DomainError("alpha/n must be below 0.5 so the cutoff is positive")
        object.__setattr__(self, "x", std_normal_quantile(1.0 - self.alpha / self.n))

    @property
    def level(self) -> float:
        """Per-test level ``alpha / n``."""
        return self.alpha / self.n

    @property
    def quadratic_term(self) -> float:
        return (self.n - 1) / self.n * self.alpha**2 / self.n


@dataclass(frozen=True)
class Equicorrelation:
    rho: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.rho <= 1.0):
            raise DomainError(f"rho must lie in [0, 1], got {self.rho!r}")


CorrLike = Union[Equicorrelation, float]


def _rho(corr: CorrLike) -> float:
    if isinstance(corr, Equicorrelation):
        return corr.rho
    return Equicorrelation(float(corr)).rho


@dataclass
class BoundResult:
    value: float
    method: str
    applicable: bool
    conditions: list[tuple[str, bool]]
    alpha_term: float
    quadratic_term: float
    correlation_term: float
    n: int
    alpha: float
    x: float
    rho: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def terms(self) -> dict[str, float]:
        return {
            "alpha_term": self.alpha_term,
            "quadratic_term": self.quadratic_term,
            "correlation_term": self.correlation_term,
        }

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "alpha": self.alpha,
            "x": self.x,
            "rho": self.rho,
            "method": self.method,
            "value": self.value,
            "applicable": self.applicable,
            "conditions": [{"predicate": p, "pass": ok} for p, ok in self.conditions],
            "terms": self.terms,
        }
        out.update(self.extra)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def make_result(
    problem: TestProblem,
    method: str,
    conditions: list[tuple[str, bool]],
    correlation_term,
    *,
    rho: float | None,
    quadratic: bool = True,
    extra: dict | None = None,
) -> BoundResult:
    """Assemble a result; ``correlation_term`` is a thunk evaluated only when applicable.

    An inapplicable bound reports the trivially valid value ``alpha``.
    """
    applicable = all(ok for _, ok in conditions)
    alpha = problem.alpha
    if applicable:
        quad = problem.quadratic_term if quadratic else 0.0
        corr = float(correlation_term())
        value = alpha - quad - corr
    else:
        quad = corr = 0.0
        value = alpha
    return BoundResult(
        value=value,
        method=method,
        applicable=applicable,
        conditions=conditions,
        alpha_term=alpha,
        quadratic_term=quad,
        correlation_term=corr,
        n=problem.n,
        alpha=alpha,
        x=problem.x,
        rho=rho,
        extra=extra or {},
    )


def bound_trivial(problem: TestProblem, corr: CorrLike = 0.0) -> BoundResult:
    return make_result(problem, TRIVIAL, [], lambda: 0.0, rho=_rho(corr), quadratic=False)


def bound_thm31(problem: TestProblem, corr: CorrLike) -> BoundResult:
    """Kwerel's inequality with the exact pairwise intersection probability."""
    rho = _rho(corr)
    if rho >= 1.0:
        raise DomainError("the integral form needs rho < 1")
    n, x = problem.n, problem.x
    return make_result(
        problem, "Thm3.1", [("0 <= rho < 1", True)],
        lambda: (n - 1) / (2 * PI) * monhor_integral(x, rho).value, rho=rho,
    )


def bound_cor31(problem: TestProblem, corr: CorrLike) -> BoundResult:
    rho = _rho(corr)
    n, alpha = problem.n, problem.alpha
    return make_result(
        problem, "Cor3.1", [("rho <= alpha/n", rho <= problem.level)],
        lambda: (n - 1) / n * alpha * rho, rho=rho, quadratic=False,
    )


def bound_cor32(problem: TestProblem, corr: CorrLike) -> BoundResult:
    rho = _rho(corr)
    n, x = problem.n, problem.x
    return make_result(
        problem, "Cor3.2", [("x >= 2", x >= 2.0)],
        lambda: (n - 1) / (2 * PI) * math.asin(rho) * math.exp(-x * x / (1 + rho / 2)), rho=rho,
    )


def _scaled_alpha_rho(problem: TestProblem, rho: float) -> float:
    return (problem.n - 1) / problem.n * problem.alpha * rho


def bound_thm33(problem: TestProblem, corr: CorrLike) -> BoundResult:
    rho = _rho(corr)
    x = problem.x
    c = C_TABLE.lookup(x)
    return make_result(
        problem, "Thm3.3",
        [("2 <= x <= 4.23", 2.0 <= x <= THM33_X_MAX), ("rho >= 0.5", rho >= 0.5)],
        lambda: _scaled_alpha_rho(problem, rho) / 6 * c, rho=rho,
        extra={"table_constant": c},
    )


def bound_thm34(problem: TestProblem, corr: CorrLike) -> BoundResult:
    rho = _rho(corr)
    x = problem.x
    table = d_table_for_rho(rho)
    d = table.lookup(x) if table is not None else None
    return make_result(
        problem, "Thm3.4",
        [
            ("2 <= x <= 4.42", 2.0 <= x <= THM34_X_MAX),
            ("0.01 <= rho < 0.5", THM34_RHO_MIN <= rho < 0.5),
            ("x inside the D table of the rho band", d is not None),
        ],
        lambda: _scaled_alpha_rho(problem, rho) / (2 * PI) * d, rho=rho,
        extra={"table_constant": d, "table_id": table.table_id if table else None},
    )


def bound_thm35(problem: TestProblem, corr: CorrLike) -> BoundResult:
    rho = _rho(corr)
    return make_result(
        problem, "Thm3.5", [("x <= 2", problem.x <= 2.0), ("rho >= 0.5", rho >= 0.5)],
        lambda: _scaled_alpha_rho(problem, rho) / 6, rho=rho,
    )


def bound_thm36(problem: TestProblem, corr: CorrLike) -> BoundResult:
    rho = _rho(corr)
    return make_result(
        problem, "Thm3.6", [("x <= 2", problem.x <= 2.0)],
        lambda: _scaled_alpha_rho(problem, rho) * 2 / (5 * PI), rho=rho,
    )


BOUNDS = {
    "Thm3.1": bound_thm31,
    "Cor3.1": bound_cor31,
    "Cor3.2": bound_cor32,
    "Thm3.3": bound_thm33,
    "Thm3.4": bound_thm34,
    "Thm3.5": bound_thm35,
    "Thm3.6": bound_thm36,
    TRIVIAL: bound_trivial,
}


def all_bounds(problem: TestProblem, corr: CorrLike) -> list[BoundResult]:
    """Every bound evaluated at ``(problem, rho)``; the integral form is skipped at rho = 1."""
    rho = _rho(corr)
    return [fn(problem, rho) for name, fn in BOUNDS.items() if not (name == "Thm3.1" and rho >= 1.0)]


def select_best(candidates: list[BoundResult]) -> BoundResult:
    """Smallest applicable value; earlier candidates win ties."""
    best = None
    for res in candidates:
        if res.applicable and (best is None or res.value < best.value):
            best = res
    assert best is not None  # the trivial bound always applies
    return best


def best_bound(problem: TestProblem, corr: CorrLike) -> BoundResult:
    return select_best(all_bounds(problem, corr))


def baseline_alpha_one_minus_rho(problem: TestProblem, rho: float) -> float:
    """The asymptotic ``alpha (1 - rho)`` line, for comparison only."""
    return problem.alpha * (1.0 - rho)
