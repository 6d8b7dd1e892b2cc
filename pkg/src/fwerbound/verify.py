"""End-to-end verification suite behind ``fwerbound verify``.

Each check returns a :class:`CheckResult` carrying a verdict, human-readable
lines and the raw per-point records it was judged on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import equicorrelated as eq
from . import general as gen
from .certify import certify_c_table, certify_d_tables, certify_g_claim, certify_h_claim
from .equicorrelated import TestProblem, best_bound
from .inequalities import kounias_upper, kwerel_upper, random_event_space, union_oracle, PairwiseSystem
from .montecarlo import DEFAULT_SEED, DEFAULT_GRID, estimate_fwer, sweep, sweep_to_csv
from .reference import reference_cells
from .special import bvn_cdf_equal, bvn_cdf_oracle, bvn_lower_bound_monhor, bvn_lower_bound_thm32

TABLE2_REPS = 10_000
TABLE2_TOL = 0.02
DOMINANCE_CONFIGS = ((10, 0.3), (100, 0.05), (500, 0.05), (100, 0.01))
DOMINANCE_GRID = tuple(k / 40 for k in range(40))  # 0 .. 0.975
BASELINE_CONFIGS = ((100, 0.01), (500, 0.05))
BASELINE_REPS = 1_000_000
ANCHOR_CONFIGS = ((10, 0.3), (100, 0.05))
ANCHOR_REPS = 100_000
IDENTITY_X = tuple(0.5 * k for k in range(1, 10))
IDENTITY_RHO = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
IDENTITY_TOL = 1e-8
LOWER_BOUND_X = tuple(round(2.0 + 0.01 * k, 2) for k in range(243))  # 2 .. 4.42
LOWER_BOUND_RHO = tuple(round(0.05 * k, 2) for k in range(1, 20))
INEQ_SPACES = 1000
INEQ_SLACK = 1e-12
REDUCTION_TRIPLES = 50
REDUCTION_TOL = 1e-12

REDUCTION_PAIRS = (
    ("Thm4.1", "Thm3.1"), ("Cor4.1", "Cor3.1"), ("Thm4.2", "Thm3.5"),
    ("Thm4.3", "Thm3.6"), ("Cor4.2", "Cor3.2"), ("Thm4.4", "Thm3.3"),
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    lines: list[str] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)

    def summary(self) -> dict:
        return {"check": self.name, "pass": self.passed, "details": self.lines}


def check_table2(reps: int = TABLE2_REPS, seed: int = DEFAULT_SEED, threads: int | None = None) -> CheckResult:
    res = CheckResult("table2", True)
    for n, alpha, rho, published, printed_bound in reference_cells():
        problem = TestProblem(n, alpha)
        est = estimate_fwer(problem, rho, reps, seed, threads)
        bound = best_bound(problem, rho)
        close = abs(est.fwer_hat - published) <= TABLE2_TOL
        dominates = bound.value >= est.fwer_hat - 3 * est.stderr
        ok = close and dominates
        res.passed &= ok
        res.records.append(dict(n=n, alpha=alpha, rho=rho, fwer_hat=est.fwer_hat, stderr=est.stderr,
                                published=published, bound=bound.value, method=bound.method,
                                printed_bound=printed_bound, close=close, dominates=dominates))
        res.lines.append(
            f"{'PASS' if ok else 'FAIL'} (n={n}, alpha={alpha}, rho={rho}): estimate {est.fwer_hat:.4f} "
            f"vs published {published:.4f}; bound {bound.value:.4f} [{bound.method}] "
            f"(printed {printed_bound:.4f})"
        )
    return res


def check_dominance(reps: int = TABLE2_REPS, seed: int = DEFAULT_SEED, threads: int | None = None) -> CheckResult:
    res = CheckResult("dominance", True)
    for n, alpha in DOMINANCE_CONFIGS:
        problem = TestProblem(n, alpha)
        worst = math.inf
        for row in sweep(problem, DOMINANCE_GRID, reps, seed, threads):
            margin = row.bound_value - (row.fwer_hat - 3 * row.stderr)
            worst = min(worst, margin)
            res.records.append(dict(n=n, alpha=alpha, rho=row.rho, fwer_hat=row.fwer_hat, stderr=row.stderr,
                                    bound=row.bound_value, method=row.bound_method, margin=margin))
        ok = worst >= 0
        res.passed &= ok
        res.lines.append(f"{'PASS' if ok else 'FAIL'} (n={n}, alpha={alpha}): smallest margin "
                         f"bound - (estimate - 3 se) = {worst:.5f} over {len(DOMINANCE_GRID)} points")
    return res


def check_baseline_failure(reps: int = BASELINE_REPS, seed: int = DEFAULT_SEED,
                           threads: int | None = None) -> CheckResult:
    res = CheckResult("baseline", True)
    for n, alpha in BASELINE_CONFIGS:
        problem = TestProblem(n, alpha)
        hits = []
        for row in sweep(problem, DEFAULT_GRID, reps, seed, threads):
            excess = (row.fwer_hat - row.baseline_alpha_one_minus_rho) / row.stderr if row.stderr > 0 else -math.inf
            exceeded = row.fwer_hat > row.baseline_alpha_one_minus_rho + 3 * row.stderr
            res.records.append(dict(n=n, alpha=alpha, rho=row.rho, fwer_hat=row.fwer_hat, stderr=row.stderr,
                                    baseline=row.baseline_alpha_one_minus_rho, z=excess, exceeded=exceeded))
            if exceeded:
                hits.append(f"{row.rho:g} (z={excess:.1f})")
        ok = bool(hits)
        res.passed &= ok
        res.lines.append(f"{'PASS' if ok else 'FAIL'} (n={n}, alpha={alpha}, reps={reps}): alpha(1-rho) exceeded "
                         f"by more than 3 se at rho = {', '.join(hits) if hits else 'none'}")
    return res


def check_anchors(reps: int = ANCHOR_REPS, seed: int = DEFAULT_SEED, threads: int | None = None) -> CheckResult:
    res = CheckResult("anchors", True)
    for n, alpha in ANCHOR_CONFIGS:
        problem = TestProblem(n, alpha)
        for rho, exact in ((0.0, 1 - (1 - alpha / n) ** n), (1.0, alpha / n)):
            est = estimate_fwer(problem, rho, reps, seed, threads)
            ok = abs(est.fwer_hat - exact) <= 3 * est.stderr
            res.passed &= ok
            res.records.append(dict(n=n, alpha=alpha, rho=rho, fwer_hat=est.fwer_hat, stderr=est.stderr, exact=exact))
            res.lines.append(f"{'PASS' if ok else 'FAIL'} (n={n}, alpha={alpha}, rho={rho:g}): estimate "
                             f"{est.fwer_hat:.5f} vs exact {exact:.5f} (3 se = {3 * est.stderr:.5f})")
    return res


def check_identity() -> CheckResult:
    res = CheckResult("identity", True)
    worst = 0.0
    for x in IDENTITY_X:
        for rho in IDENTITY_RHO:
            diff = abs(bvn_cdf_equal(x, rho) - bvn_cdf_oracle(x, rho))
            worst = max(worst, diff)
            res.records.append(dict(x=x, rho=rho, diff=diff))
    res.passed = worst <= IDENTITY_TOL
    res.lines.append(f"{'PASS' if res.passed else 'FAIL'}: max |integral form - conditioning oracle| = "
                     f"{worst:.2e} over {len(res.records)} points (tol {IDENTITY_TOL:g})")
    return res


def check_lower_bound() -> CheckResult:
    res = CheckResult("lower_bound", True)
    below = sharper = 0
    for x in LOWER_BOUND_X:
        for rho in LOWER_BOUND_RHO:
            lower = bvn_lower_bound_thm32(x, rho)
            oracle = bvn_cdf_oracle(x, rho)
            older = bvn_lower_bound_monhor(x, rho)
            ok_lower = lower <= oracle + IDENTITY_TOL
            ok_sharp = lower >= older
            below += ok_lower
            sharper += ok_sharp
            res.records.append(dict(x=x, rho=rho, lower=lower, oracle=oracle, older=older))
    total = len(res.records)
    res.passed = below == total and sharper == total
    res.lines.append(f"{'PASS' if res.passed else 'FAIL'}: lower bound <= CDF at {below}/{total} points, "
                     f">= older bound at {sharper}/{total} points")
    return res


def check_tables() -> CheckResult:
    """C table and the G/H claims must pass; D tables are recorded either way."""
    res = CheckResult("tables", True)
    for report in (certify_c_table(), certify_g_claim(), certify_h_claim()):
        res.passed &= report.passed
        res.records.append(report.to_dict())
        res.lines.append(f"{'PASS' if report.passed else 'FAIL'} {report.table_id}")
        for iv in report.failures():
            res.lines.append(f"    [{iv.x_start}, {iv.x_end}]: min {iv.grid_min:.6g} at x={iv.argmin:.4f} "
                             f"< constant {iv.constant:.6g}")
    for report in certify_d_tables():
        res.records.append(report.to_dict())
        status = "PASS" if report.passed else "DISCREPANCY"
        res.lines.append(f"{status} {report.table_id} (recorded only)")
        for iv in report.failures():
            res.lines.append(f"    [{iv.x_start}, {iv.x_end}]: min {iv.grid_min:.6g} < constant {iv.constant:.6g}")
    return res


def check_inequalities(spaces: int = INEQ_SPACES, seed: int = DEFAULT_SEED) -> CheckResult:
    res = CheckResult("inequalities", True)
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(spaces):
        space = random_event_space(rng)
        system = space.pairwise_system()
        exact = union_oracle(space)
        kou, _ = kounias_upper(system)
        kwe = kwerel_upper(system)
        if not (exact <= kou + INEQ_SLACK and kou <= kwe + INEQ_SLACK):
            bad += 1
    # equal pairwise intersections: the two bounds coincide
    equal_bad = 0
    for _ in range(spaces // 10):
        n = int(rng.integers(2, 8))
        m = rng.uniform(0.05, 0.2, size=n)
        q = rng.uniform(0, m.min())
        system = PairwiseSystem(m, np.full((n, n), q))
        if abs(kounias_upper(system, clamp=False)[0] - kwerel_upper(system, clamp=False)) > INEQ_SLACK:
            equal_bad += 1
    res.passed = bad == 0 and equal_bad == 0
    res.lines.append(f"{'PASS' if res.passed else 'FAIL'}: exact <= Kounias <= Kwerel violated in {bad}/{spaces} "
                     f"spaces; Kounias != Kwerel in {equal_bad} equal-intersection systems")
    return res


def random_reduction_triples(rng: np.random.Generator, count: int = REDUCTION_TRIPLES):
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 60))
        alpha = float(rng.uniform(0.001, 0.5))
        rho = float(rng.uniform(0.0, 0.99))
        out.append((n, alpha, rho))
    return out


def check_reduction(seed: int = DEFAULT_SEED) -> CheckResult:
    res = CheckResult("reduction", True)
    rng = np.random.default_rng(seed)
    worst = 0.0
    mismatched = []
    for n, alpha, rho in random_reduction_triples(rng):
        problem = TestProblem(n, alpha)
        R = gen.CorrelationMatrix.equicorrelated(n, rho)
        for general_id, equi_id in REDUCTION_PAIRS:
            g = gen.BOUNDS_GENERAL[general_id](problem, R)
            e = eq.BOUNDS[equi_id](problem, rho)
            # Thm4.3 additionally assumes rho_{i*j*} > alpha/n
            expected_applicable = e.applicable and not (general_id == "Thm4.3" and rho <= problem.level)
            if g.applicable != expected_applicable:
                mismatched.append((n, alpha, rho, general_id))
                continue
            if g.applicable:
                diff = abs(g.value - e.value)
                worst = max(worst, diff)
                res.records.append(dict(n=n, alpha=alpha, rho=rho, pair=(general_id, equi_id), diff=diff))
    res.passed = worst <= REDUCTION_TOL and not mismatched
    res.lines.append(f"{'PASS' if res.passed else 'FAIL'}: max |general - equicorrelated| = {worst:.2e} over "
                     f"{len(res.records)} comparisons; applicability mismatches: {len(mismatched)}")
    return res


def check_determinism(reps: int = TABLE2_REPS, seed: int = DEFAULT_SEED) -> CheckResult:
    res = CheckResult("determinism", True)
    problem = TestProblem(100, 0.05)
    grid = (0.0, 0.3, 0.6, 0.9, 1.0)
    outputs = {t: sweep_to_csv(sweep(problem, grid, reps, seed, threads=t)) for t in (1, 2, 4)}
    outputs["repeat"] = sweep_to_csv(sweep(problem, grid, reps, seed, threads=1))
    distinct = len(set(outputs.values()))
    res.passed = distinct == 1
    res.lines.append(f"{'PASS' if res.passed else 'FAIL'}: {len(outputs)} sweeps at 1/2/4 threads and a repeat "
                     f"produced {distinct} distinct CSV output(s)")
    return res


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "table2": check_table2,
    "dominance": check_dominance,
    "baseline": check_baseline_failure,
    "identity": check_identity,
    "lower_bound": check_lower_bound,
    "tables": check_tables,
    "inequalities": check_inequalities,
    "reduction": check_reduction,
    "anchors": check_anchors,
    "determinism": check_determinism,
}


def run(only: list[str] | None = None) -> list[CheckResult]:
    names = only or list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks: {', '.join(unknown)}")
    return [CHECKS[name]() for name in names]
