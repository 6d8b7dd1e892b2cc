import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from conftest import exact_fwer
from fwerbound import CorrelationMatrix, TestProblem
from fwerbound.errors import DomainError
from fwerbound.montecarlo import (
    BACKEND,
    DEFAULT_GRID,
    CounterStream,
    SimEstimate,
    count_exceedances,
    estimate_fwer,
    sample_equicorrelated,
    sample_general,
    sweep,
    sweep_to_csv,
)
from fwerbound.montecarlo import rng as crng
from fwerbound.special import std_normal_quantile

compiled = pytest.mark.skipif(BACKEND != "compiled", reason="compiled kernel not built")


def test_mix64_matches_splitmix64_reference():
    # first SplitMix64 output for state 0
    assert crng.mix64(crng.GAMMA) == 0xE220A8397B1DCDAF


def test_uniforms_in_open_interval_and_block_matches_scalar():
    block = crng.uniforms_block(42, 10, 14, 6)
    for r in range(4):
        s = CounterStream(42, 10 + r)
        assert [s.uniform(j) for j in range(6)] == block[r].tolist()
    assert np.all((block > 0) & (block < 1))


def test_streams_differ_by_seed_and_replication():
    a = CounterStream(1, 0).uniforms(4)
    assert not np.array_equal(a, CounterStream(2, 0).uniforms(4))
    assert not np.array_equal(a, CounterStream(1, 1).uniforms(4))


def test_negative_and_large_seeds():
    assert crng.check_seed(-5) == -5
    assert CounterStream(-1, 0).uniform(0) == CounterStream(2**64 - 1, 0).uniform(0)
    with pytest.raises(ValueError):
        crng.check_seed(2**64)


def test_quantile_array_close_to_scalar():
    p = crng.uniforms_block(7, 0, 200, 50).ravel()
    scalar = np.array([std_normal_quantile(float(v)) for v in p])
    assert np.max(np.abs(crng.quantile_array(p) - scalar)) < 1e-14


@compiled
def test_kernel_rng_bitwise_equal():
    from fwerbound.montecarlo import _kernel

    key = crng.seed_key(42)
    for rep in (0, 1, 999, 123456):
        s = CounterStream(42, rep)
        for j in (0, 1, 77):
            assert _kernel.uniform(key, rep, j) == s.uniform(j)
    for p in crng.uniforms_block(3, 0, 50, 40).ravel():
        assert _kernel.normal_quantile(float(p)) == std_normal_quantile(float(p))


@compiled
@pytest.mark.parametrize("n,rho", [(10, 0.0), (10, 0.5), (100, 0.1), (100, 0.9), (50, 0.999999), (20, 1.0)])
def test_backend_parity_equicorrelated(n, rho):
    x = TestProblem(n, 0.05).x
    assert count_exceedances((n, rho), x, 3000, 42, 1, "compiled") == \
        count_exceedances((n, rho), x, 3000, 42, 1, "python")


@compiled
def test_backend_parity_general():
    rng = np.random.default_rng(0)
    w = rng.uniform(size=(12, 2))
    cov = w @ w.T + np.eye(12) * 0.3
    d = np.sqrt(np.diag(cov))
    r = cov / np.outer(d, d)
    np.fill_diagonal(r, 1.0)
    R = CorrelationMatrix(r)
    x = TestProblem(12, 0.2).x
    assert count_exceedances(R, x, 3000, 9, 1, "compiled") == count_exceedances(R, x, 3000, 9, 1, "python")


def test_scalar_samplers_agree_with_counts():
    n, rho, reps = 8, 0.4, 400
    x = TestProblem(n, 0.3).x
    hits = sum(bool(np.any(sample_equicorrelated(n, rho, CounterStream(5, r)) > x)) for r in range(reps))
    assert hits == count_exceedances((n, rho), x, reps, 5, 1)
    R = CorrelationMatrix.equicorrelated(n, rho)
    hits = sum(bool(np.any(sample_general(R.factor, CounterStream(5, r)) > x)) for r in range(reps))
    assert hits == count_exceedances(R, x, reps, 5, 1)


def test_one_factor_sampler_moments():
    z = crng.normals_block(1, 0, 100_000, 3)
    for rho in (0.0, 0.5):
        x = math.sqrt(rho) * z[:, :1] + math.sqrt(1 - rho) * z[:, 1:]
        assert np.corrcoef(x[:, 0], x[:, 1])[0, 1] == pytest.approx(rho, abs=0.01)
    s = sample_equicorrelated(5, 1.0, CounterStream(3, 0))
    assert np.all(s == s[0])
    with pytest.raises(DomainError):
        sample_equicorrelated(5, 1.5, CounterStream(3, 0))


def test_general_sampler_matches_one_factor_in_distribution():
    n, rho, draws = 5, 0.6, 100_000
    z = crng.normals_block(2, 0, draws, n + 1)
    one_factor = (math.sqrt(rho) * z[:, :1] + math.sqrt(1 - rho) * z[:, 1:]).max(axis=1)
    L = CorrelationMatrix.equicorrelated(n, rho).factor
    z2 = crng.normals_block(3, 0, draws, n)
    cholesky = (z2 @ L.T).max(axis=1)
    assert stats.ks_2samp(one_factor, cholesky).statistic < 0.01
    R = CorrelationMatrix([[1, 0.5, 0.3], [0.5, 1, 0.2], [0.3, 0.2, 1]])
    x = crng.normals_block(4, 0, draws, 3) @ R.factor.T
    assert np.corrcoef(x.T)[0, 1] == pytest.approx(0.5, abs=0.01)
    assert np.corrcoef(x.T)[1, 2] == pytest.approx(0.2, abs=0.01)


def test_identity_factor_gives_iid():
    s = sample_general(np.eye(4), CounterStream(8, 2))
    assert s.tolist() == CounterStream(8, 2).normals(4).tolist()


def test_sim_estimate():
    est = SimEstimate.from_count(250, 1000, 1)
    assert est.fwer_hat == 0.25
    assert est.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 1000))
    assert SimEstimate.from_count(0, 1000, 1).stderr == 0.0


def test_estimate_validation():
    p = TestProblem(10, 0.3)
    with pytest.raises(DomainError):
        estimate_fwer(p, 0.5, reps=50)
    with pytest.raises(DomainError):
        estimate_fwer(p, 1.2, reps=1000)
    with pytest.raises(DomainError):
        estimate_fwer(p, CorrelationMatrix.equicorrelated(4, 0.2), reps=1000)


@pytest.mark.parametrize("rho", [0.0, 1.0])
def test_closed_form_anchors(rho):
    p = TestProblem(10, 0.3)
    exact = 1 - 0.97**10 if rho == 0 else 0.03
    est = estimate_fwer(p, rho, reps=100_000)
    assert abs(est.fwer_hat - exact) <= 3 * est.stderr


def test_estimates_track_exact_fwer():
    for n, alpha, rho in [(10, 0.3, 0.5), (100, 0.05, 0.3), (500, 0.05, 0.7)]:
        est = estimate_fwer(TestProblem(n, alpha), rho, reps=100_000)
        assert abs(est.fwer_hat - exact_fwer(n, alpha, rho)) <= 4 * est.stderr


def test_table_cell_and_trend():
    assert estimate_fwer(TestProblem(10, 0.3), 0.5).fwer_hat == pytest.approx(0.1688, abs=0.02)
    p = TestProblem(500, 0.05)
    lo, hi = estimate_fwer(p, 0.9), estimate_fwer(p, 0.1)
    assert hi.fwer_hat - lo.fwer_hat >= 5 * max(lo.stderr, hi.stderr)


def test_general_model_estimate():
    est = estimate_fwer(TestProblem(6, 0.2), CorrelationMatrix.equicorrelated(6, 0.3), reps=20_000)
    assert abs(est.fwer_hat - exact_fwer(6, 0.2, 0.3)) <= 4 * est.stderr


def test_determinism_across_threads():
    p = TestProblem(100, 0.05)
    base = estimate_fwer(p, 0.4, reps=5001, threads=1)
    for t in (2, 3, 7):
        assert estimate_fwer(p, 0.4, reps=5001, threads=t) == base
    assert estimate_fwer(p, 0.4, reps=5001, seed=43) != base


def test_sweep_rows_and_csv():
    p = TestProblem(10, 0.3)
    rows = sweep(p, [0.5, 0.0, 1.0], reps=2000)
    assert [r.rho for r in rows] == [0.0, 0.5, 1.0]
    assert rows[0].baseline_alpha_one_minus_rho == 0.3
    text = sweep_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "rho,fwer_hat,stderr,bound_value,bound_method,alpha_one_minus_rho"
    assert len(lines) == 4
    assert lines[2].split(",")[4] == "Thm3.1"
    assert sweep_to_csv(sweep(p, [0.5, 0.0, 1.0], reps=2000, threads=3)) == text
    with pytest.raises(DomainError):
        sweep(p, [1.5])


def test_default_grid():
    assert len(DEFAULT_GRID) == 41 and DEFAULT_GRID[1] == 0.025 and DEFAULT_GRID[-1] == 1.0


def test_backend_env_override():
    code = "from fwerbound.montecarlo import BACKEND; print(BACKEND)"
    env = {**os.environ, "FWER_BACKEND": "python"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
