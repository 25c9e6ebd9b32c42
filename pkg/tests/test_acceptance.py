"""Acceptance criteria, one test (or parametrized family) per criterion.

Every check reports a PASS/FAIL line; the lines are repeated in a summary
section at the end of the pytest run. Run directly with
``python tests/test_acceptance.py``.
"""

import json
import math
import sys
import time

import numpy as np
import pytest
from click.testing import CliRunner

from roughsig.cli import cli, manifest_path
from roughsig.dataio import write_curves, write_paths
from roughsig.montecarlo import ExperimentConfig, GridSpec, run_experiment
from roughsig.signature import (
    activity_signature_tt,
    median_provider,
    point_estimate,
    roughness_signature,
    SignatureCurve,
)
from roughsig.simulate import (
    FbmParams,
    GammaBssParams,
    Mixture,
    TemperedStableParams,
    default_mixture_jumps,
    simulate_gamma_bss,
)
from roughsig.variation import IncrementScheme, Path, power_variation

from conftest import record
from oracles import fbm_moment_check, gamma_bss_variogram_check, tempered_stable_count_check

GRID = GridSpec().values
R = 500


def on(lo, hi):
    return (GRID >= lo - 1e-9) & (GRID <= hi + 1e-9)


def max_dev(values, target, mask):
    return float(np.max(np.abs(values[mask] - target[mask])))


def test_criterion_1_gamma_bss():
    start = time.perf_counter()
    outcomes = []
    for alpha, seed in ((-0.25, 101), (-0.4, 102)):
        s = run_experiment(ExperimentConfig(GammaBssParams(alpha), 2000, R, master_seed=seed))
        level = np.full(GRID.size, alpha + 0.5)
        dev = max_dev(s.median, level, on(0.5, 8))
        band = bool(np.all((s.quantile(0.25) <= level) & (level <= s.quantile(0.75))))
        outcomes.append(dev <= 0.03 and band)
        record(1, dev <= 0.03, f"gamma-BSS alpha={alpha}: max |median - {alpha + 0.5:g}| on [0.5, 8] = {dev:.4f} (tol 0.03)")
        record(1, band, f"gamma-BSS alpha={alpha}: interquartile band contains {alpha + 0.5:g} at all {GRID.size} grid points: {band}")
    elapsed = time.perf_counter() - start
    record(1, elapsed < 120, f"runtime {elapsed:.1f}s for both experiments (target < 120s)")
    assert all(outcomes) and elapsed < 120


@pytest.mark.slow
@pytest.mark.parametrize("beta, seed", [(0.5, 201), (1.0, 202), (1.5, 203)])
def test_criterion_2_tempered_stable(beta, seed):
    spec = TemperedStableParams.symmetric(beta)
    runs = {n: run_experiment(ExperimentConfig(spec, n, R, master_seed=seed)) for n in (2000, 500)}
    med = runs[2000].median
    low = on(0, 0.8 * beta)
    high = on(2 * beta, 10)
    dev_low = max_dev(med, np.full(GRID.size, 1 / beta), low)
    dev_high = max_dev(med, 1 / GRID, high)
    k = int(np.argmin(np.abs(GRID - beta)))
    kink = {n: abs(s.median[k] - 1 / beta) for n, s in runs.items()}
    ok_low, ok_high, ok_kink = dev_low <= 0.05, dev_high <= 0.05, kink[500] > kink[2000]
    record(2, ok_low, f"beta={beta}: max |median - 1/beta| on p <= {0.8 * beta:g} = {dev_low:.4f} (tol 0.05)")
    record(2, ok_high, f"beta={beta}: max |median - 1/p| on p >= {2 * beta:g} = {dev_high:.4f} (tol 0.05)")
    record(2, ok_kink, f"beta={beta}: deviation at p={GRID[k]:g} is {kink[500]:.4f} for n=500 vs {kink[2000]:.4f} for n=2000")
    assert ok_low and ok_high and ok_kink


def test_criterion_3_mixture():
    g = GammaBssParams(-0.25)
    s = run_experiment(ExperimentConfig(Mixture(g, default_mixture_jumps(g)), 2000, R, master_seed=301))
    dev_low = max_dev(s.median, np.full(GRID.size, 0.25), on(0.5, 3))
    dev_high = max_dev(s.median, 1 / GRID, on(6, 10))
    record(3, dev_low <= 0.05, f"mixture: max |median - 0.25| on [0.5, 3] = {dev_low:.4f} (tol 0.05)")
    record(3, dev_high <= 0.07, f"mixture: max |median - 1/p| on [6, 10] = {dev_high:.4f} (tol 0.07)")
    assert dev_low <= 0.05 and dev_high <= 0.07


def test_criterion_4_brownian():
    s = run_experiment(ExperimentConfig(FbmParams(0.5), 2000, R, master_seed=401))
    dev = max_dev(s.median, np.full(GRID.size, 0.5), on(0.5, 4))
    record(4, dev <= 0.03, f"Brownian motion: max |median - 0.5| on [0.5, 4] = {dev:.4f} (tol 0.03)")
    assert dev <= 0.03


def test_criterion_5_exact_identities():
    rng = np.random.default_rng(501)
    powers = rng.uniform(0.1, 10, 10)
    even_odd = affine = reciprocal = 0
    worst_affine = worst_reciprocal = 0.0
    for i in range(100):
        n = int(rng.integers(20, 3000))
        path = Path(np.cumsum(rng.standard_normal(n)) * rng.uniform(0.01, 100))
        a, c = rng.uniform(-10, 10), rng.choice([-1, 1]) * rng.uniform(0.1, 10)
        moved = path.with_values(a + c * path.values)
        ok = ok_affine = ok_recip = True
        for p in powers:
            whole = power_variation(path, p, IncrementScheme(2))
            phases = [power_variation(path, p, IncrementScheme(2, subsampling="decimated", phase=k)) for k in (0, 1)]
            ok &= whole == phases[0] + phases[1]
            h = roughness_signature(path, p)
            err = abs(roughness_signature(moved, p) - h) / abs(h)
            worst_affine = max(worst_affine, err)
            ok_affine &= err <= 1e-12
            product = roughness_signature(path, p, 2, subsampling="decimated") * activity_signature_tt(path, p, 2)
            worst_reciprocal = max(worst_reciprocal, abs(product - 1))
            ok_recip &= abs(product - 1) <= 4 * np.finfo(float).eps
        even_odd += ok
        affine += ok_affine
        reciprocal += ok_recip
    record(5, even_odd == 100, f"even/odd decomposition bit-for-bit on {even_odd}/100 paths x 10 powers")
    record(5, affine == 100, f"affine invariance on {affine}/100 paths, worst relative error {worst_affine:.2e} (tol 1e-12)")
    record(
        5,
        reciprocal == 100,
        f"decimated signature x activity = 1 on {reciprocal}/100 paths, worst |product - 1| = {worst_reciprocal:.2e}",
    )
    worst_const = 0.0
    for level in (0.05, 0.1, 0.25, 0.5, 0.9, 1.5):
        for tau in (0.1, 0.5):
            est = point_estimate(lambda p: level, tau, 0.01)
            worst_const = max(worst_const, abs(est.h_hat - level) / level)
    record(5, worst_const <= 1e-12, f"point estimate of constant curves, worst relative error {worst_const:.2e} (tol 1e-12)")
    assert even_odd == affine == reciprocal == 100 and worst_const <= 1e-12


def test_criterion_6_simulator_fidelity():
    checks = []
    for alpha, seed in ((-0.25, 606), (-0.4, 610)):
        checks += gamma_bss_variogram_check(GammaBssParams(alpha), seed)
    for hurst, seed in ((0.25, 607), (0.75, 611)):
        checks += fbm_moment_check(hurst, seed)
    for beta, seed in ((0.5, 608), (1.5, 609)):
        checks.append(tempered_stable_count_check(beta, seed))
    for c in checks:
        record(6, c.ok(), f"{c} (3 SE)")
    assert all(c.ok() for c in checks)


def test_criterion_7_determinism(tmp_path):
    runner = CliRunner()

    def run(*args):
        result = runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)
        assert result.exit_code == 0, result.output
        return result

    paths = tmp_path / "paths.csv"
    run("simulate", "--model", "mix", "--alpha", -0.25, "--n", 2000, "--paths", 3, "--seed", 7, "--out", paths)
    grid = np.linspace(0.1, 10, 100)
    write_curves([SignatureCurve(grid, np.full(100, 0.3), label="flat")], tmp_path / "flat.csv")
    outputs = {
        "simulate": paths,
        "signature": tmp_path / "sig.csv",
        "quantile-signature": tmp_path / "q.json",
        "point-estimate (paths)": tmp_path / "h.json",
        "point-estimate (curves)": tmp_path / "h2.json",
        "montecarlo gbss": tmp_path / "mc_gbss.csv",
        "montecarlo ts": tmp_path / "mc_ts.json",
    }
    run("signature", "--input", paths, "--out", outputs["signature"])
    run("quantile-signature", "--input", paths, "--quantiles", "0.1,0.5,0.9", "--out", outputs["quantile-signature"])
    run("point-estimate", "--input", paths, "--out", outputs["point-estimate (paths)"])
    run("point-estimate", "--curves", tmp_path / "flat.csv", "--out", outputs["point-estimate (curves)"])
    run("montecarlo", "--model", "gbss", "--alpha", -0.4, "--n", 500, "--replications", 24, "--seed", 3, "--workers", 1, "--out", outputs["montecarlo gbss"])
    run("montecarlo", "--model", "ts", "--beta", 1.2, "--gamma-max", 1e4, "--n", 500, "--replications", 24, "--seed", 4, "--workers", 1, "--out", outputs["montecarlo ts"])

    all_ok = True
    for name, out in outputs.items():
        before = out.read_bytes()
        variants = [("replay", [])]
        if name.startswith("montecarlo"):
            variants = [("replay --workers 1", ["--workers", 1]), ("replay --workers 8", ["--workers", 8])]
        for label, extra in variants:
            out.unlink()
            result = runner.invoke(cli, ["replay", str(manifest_path(out)), *map(str, extra)])
            ok = result.exit_code == 0 and out.read_bytes() == before
            all_ok &= ok
            record(7, ok, f"{name}: {label} byte-identical")
    assert all_ok


@pytest.mark.parametrize("alpha, seed", [(-0.25, 801), (-0.4, 802)])
def test_criterion_8_point_estimator(alpha, seed):
    # one long stationary path cut into 10 consecutive periods of 2000 observations
    long = simulate_gamma_bss(GammaBssParams(alpha), 20_000, 1 / 2000, seed)
    periods = [Path(long.values[k * 2000 : (k + 1) * 2000], 1 / 2000) for k in range(10)]
    est = point_estimate(median_provider(periods), 0.5, vectorized=True)
    err = abs(est.h_hat - (alpha + 0.5))
    record(8, err <= 0.03, f"alpha={alpha}: pooled H_hat = {est.h_hat:.4f} vs {alpha + 0.5:g} (|error| {err:.4f}, tol 0.03)")
    assert err <= 0.03


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
