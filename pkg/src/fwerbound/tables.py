"""Piecewise-constant lookup tables used by the table-based bounds."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

PI = math.pi


@dataclass(frozen=True)
class PiecewiseTable:
    """Constants on consecutive x-intervals ``[b_k, b_{k+1})``.

    The final interval is closed on the right: a value equal to the last
    breakpoint takes the last constant.
    """

    table_id: str
    breakpoints: tuple[float, ...]
    constants: tuple[float, ...]
    rho_lower: float  # lower end of the correlation range the table serves

    def __post_init__(self) -> None:
        if len(self.breakpoints) != len(self.constants) + 1:
            raise ValueError("need exactly one more breakpoint than constants")
        if any(b >= a for a, b in zip(self.breakpoints[1:], self.breakpoints[:-1])):
            raise ValueError("breakpoints must be strictly ascending")
        if any(c <= 0 for c in self.constants):
            raise ValueError("constants must be positive")
        if any(b > a for a, b in zip(self.constants, self.constants[1:])):
            raise ValueError("constants must be nonincreasing")

    @property
    def x_min(self) -> float:
        return self.breakpoints[0]

    @property
    def x_max(self) -> float:
        return self.breakpoints[-1]

    def lookup(self, x: float) -> float | None:
        """Constant for the interval containing ``x``, or None outside the table."""
        if not (self.x_min <= x <= self.x_max):
            return None
        if x == self.x_max:
            return self.constants[-1]
        return self.constants[bisect.bisect_right(self.breakpoints, x) - 1]

    def levels(self) -> list[tuple[float, float, float]]:
        b = self.breakpoints
        return [(b[k], b[k + 1], c) for k, c in enumerate(self.constants)]


C_TABLE = PiecewiseTable(
    "C",
    (2.0, 2.56, 3.06, 3.33, 3.71, 3.93, 4.23),
    (1.0, 1 / 2, 1 / PI, 1 / (2 * PI), 1 / PI**2, 1 / (6 * PI)),
    rho_lower=0.5,
)

_D = (1.0, 1 / 2, 1 / PI, 1 / (2 * PI), 1 / PI**2, 1 / PI**3, 1 / PI**4,
      1 / (4 * PI**4), 1 / (16 * PI**4))

D1_TABLE = PiecewiseTable(
    "D1", (2.0, 2.3, 2.76, 3.0, 3.36, 3.56, 4.0, 4.42), _D[0:7], rho_lower=1 / 3
)
D2_TABLE = PiecewiseTable(
    "D2", (2.0, 2.49, 2.72, 3.04, 3.23, 3.66, 4.03, 4.42), _D[1:8], rho_lower=1 / (2 * PI)
)
D3_TABLE = PiecewiseTable(
    "D3", (2.0, 2.28, 2.5, 2.8, 2.97, 3.37, 3.72, 4.1, 4.42), _D[1:9], rho_lower=0.01
)

D_TABLES = (D1_TABLE, D2_TABLE, D3_TABLE)


def d_table_for_rho(rho: float) -> PiecewiseTable | None:
    """The D table whose correlation band ``[lower, next lower)`` holds ``rho``."""
    if rho >= 0.5:
        return None
    for table in D_TABLES:
        if rho >= table.rho_lower:
            return table
    return None
