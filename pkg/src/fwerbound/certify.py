"""Grid certification of the numeric claims behind the table-based bounds."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .special import std_normal_sf, threshold_G, threshold_H, threshold_M, threshold_Mc
from .tables import C_TABLE, D_TABLES, PiecewiseTable

CERT_GRID_STEP = 1e-4


@dataclass
class IntervalCheck:
    x_start: float
    x_end: float
    constant: float
    grid_min: float
    argmin: float
    passed: bool


@dataclass
class CertificationReport:
    table_id: str
    intervals: list[IntervalCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(iv.passed for iv in self.intervals)

    def failures(self) -> list[IntervalCheck]:
        return [iv for iv in self.intervals if not iv.passed]

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "intervals": [
                {
                    "x_start": iv.x_start,
                    "x_end": iv.x_end,
                    "constant": iv.constant,
                    "grid_min": iv.grid_min,
                    "pass": iv.passed,
                }
                for iv in self.intervals
            ],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _grid(a: float, b: float, step: float) -> np.ndarray:
    # endpoints always included so the check cannot alias past them
    count = max(int(np.ceil((b - a) / step - 1e-9)), 1)
    return np.linspace(a, b, count + 1)


def certify_table(
    levels: Sequence[tuple[float, float, float]],
    threshold: Callable[[float], float],
    grid_step: float = CERT_GRID_STEP,
    table_id: str = "custom",
) -> CertificationReport:
    """Check ``threshold(x) >= constant`` on a grid over each closed interval."""
    if grid_step <= 0 or grid_step > 1e-3:
        raise ValueError("grid_step must lie in (0, 1e-3]")
    for (a, b, _), (c, _, _) in zip(levels, levels[1:]):
        if c < b:
            raise ValueError("intervals must be ordered and non-overlapping")
    report = CertificationReport(table_id)
    for a, b, constant in levels:
        if b < a:
            raise ValueError(f"interval [{a}, {b}] is reversed")
        xs = _grid(a, b, grid_step)
        values = np.array([threshold(float(x)) for x in xs])
        k = int(np.argmin(values))
        report.intervals.append(
            IntervalCheck(a, b, constant, float(values[k]), float(xs[k]), bool(values[k] >= constant))
        )
    return report


def certify_c_table(grid_step: float = CERT_GRID_STEP) -> CertificationReport:
    return certify_table(C_TABLE.levels(), threshold_M, grid_step, table_id="C")


def certify_d_table(table: PiecewiseTable, grid_step: float = CERT_GRID_STEP) -> CertificationReport:
    # Reconstructed threshold: the band's lower correlation plays the role 0.5 plays for C.
    c = table.rho_lower
    return certify_table(table.levels(), lambda x: threshold_Mc(x, c), grid_step, table_id=table.table_id)


def certify_d_tables(grid_step: float = CERT_GRID_STEP) -> list[CertificationReport]:
    return [certify_d_table(t, grid_step) for t in D_TABLES]


def _claim_report(table_id: str, x_end: float, gap: Callable[[float], float], grid_step: float):
    # Certify gap(x) >= 0 on (0, x_end]; the left end is open so start one step in.
    return certify_table([(grid_step, x_end, 0.0)], gap, grid_step, table_id=table_id)


def certify_g_claim(grid_step: float = CERT_GRID_STEP) -> CertificationReport:
    """``G(x) >= 1 - Phi(x)`` on ``(0, 2.2]``."""
    return _claim_report("G", 2.2, lambda x: threshold_G(x) - std_normal_sf(x), grid_step)


def certify_h_claim(grid_step: float = CERT_GRID_STEP) -> CertificationReport:
    """``H(x) >= 0.8 (1 - Phi(x))`` on ``(0, 2]``."""
    return _claim_report("H", 2.0, lambda x: threshold_H(x) - 0.8 * std_normal_sf(x), grid_step)


def certify_all(grid_step: float = CERT_GRID_STEP) -> list[CertificationReport]:
    return [
        certify_c_table(grid_step),
        *certify_d_tables(grid_step),
        certify_g_claim(grid_step),
        certify_h_claim(grid_step),
    ]
