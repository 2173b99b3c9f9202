"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every line; the
whole module takes a few minutes because several criteria use 10^5 - 10^6
Monte Carlo runs.
"""

from __future__ import annotations

import math
import os
import time

import numpy as np
import pytest
from scipy import stats as sps

from dynwalk import (
    at_start_prob,
    at_start_prob_recursive,
    azuma_check,
    brute_force_step_distribution,
    clt_check,
    expected_covered,
    expected_covered_asymptote,
    expected_visits,
    full_report,
    moves_in_interval,
    no_return_prob,
    no_return_prob_recursive,
    run_walk,
    simulate_many,
    step_return_prob,
    variance_covered,
    variance_covered_asymptote,
    verify,
    visit_prob,
)
from dynwalk.analytic import visit_prob_profile
from dynwalk.cli import main

from conftest import make_config

THREADS = min(os.cpu_count() or 1, 4)
HEAVY_RUNS = 1_000_000

GRID_HORIZON = 200
GRID_K0 = range(3, 11)
GRID_LAMBDA = (0.1, 0.5, 1.0, 2.0, 5.0)

IDENTITY_RTOL = 1e-12
ORACLE_TOL = 1e-12
ASYMPTOTE_RTOL = 0.05


def _report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def _relgap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


@pytest.fixture(scope="module")
def heavy_verdicts():
    """10^6-run verdict lists for (k0=3, lambda=1) at each acceptance horizon."""
    result = {}
    for horizon in (1, 5, 20):
        cfg = make_config(k0=3, lam=1.0, horizon=horizon, seed=0)
        result[horizon] = verify(cfg, HEAVY_RUNS, threads=THREADS)
    return result


def test_criterion_01_formula_identity_suite():
    started = time.perf_counter()
    worst = {"covered": 0.0, "no_return": 0.0, "at_start": 0.0}
    for k0 in GRID_K0:
        for lam in GRID_LAMBDA:
            for horizon in range(1, GRID_HORIZON + 1):
                gap = _relgap(
                    expected_covered(horizon, k0, lam),
                    1.0 + float(visit_prob_profile(horizon, k0, lam).sum()),
                )
                worst["covered"] = max(worst["covered"], gap)
                gap = _relgap(
                    no_return_prob(horizon, k0, lam),
                    no_return_prob_recursive(horizon, k0, lam),
                )
                worst["no_return"] = max(worst["no_return"], gap)
                gap = _relgap(
                    at_start_prob(horizon, k0, lam),
                    at_start_prob_recursive(horizon, k0, lam),
                )
                worst["at_start"] = max(worst["at_start"], gap)
    # the profile is the vectorized form of visit_prob; spot-check the scalar op
    rng = np.random.default_rng(0)
    for _ in range(300):
        k0 = int(rng.integers(3, 11))
        horizon = int(rng.integers(1, GRID_HORIZON + 1))
        lam = float(rng.choice(GRID_LAMBDA))
        j = int(rng.integers(2, k0 + horizon))
        profile = visit_prob_profile(horizon, k0, lam)
        assert _relgap(visit_prob(j, horizon, k0, lam), float(profile[j - 2])) <= 1e-13
    elapsed = time.perf_counter() - started
    ok = all(gap <= IDENTITY_RTOL for gap in worst.values()) and elapsed < 5.0
    _report(
        1,
        ok,
        f"worst relative gaps {worst} over T<=200, k0 in 3..10, "
        f"lambda in {GRID_LAMBDA}; elapsed {elapsed:.2f}s (< 5s)",
    )
    assert worst["covered"] <= IDENTITY_RTOL
    assert worst["no_return"] <= IDENTITY_RTOL
    assert worst["at_start"] <= IDENTITY_RTOL
    assert elapsed < 5.0


def test_criterion_02_degenerate_exactness():
    horizons = (1, 3, 10)
    analytics_exact = all(
        expected_covered(t, 3, 0.0) == 1.0
        and variance_covered(t, 3, 0.0) == 0.0
        and expected_visits(t, 3, 0.0) == 0.0
        and at_start_prob(t, 3, 0.0) == 1.0
        and at_start_prob_recursive(t, 3, 0.0) == 1.0
        for t in horizons
    )
    report0 = full_report(make_config(lam=0.0, horizon=0))
    zero_horizon_exact = report0.values["E[N_T]"] == 1.0 and report0.values["Var(N_T)"] == 0.0

    table = simulate_many(make_config(lam=0.0, horizon=10), 500)
    simulated_exact = (
        bool(np.all(table.covered == 1))
        and bool(np.all(table.visits_to_start == 0))
        and bool(np.all(table.at_start_at_horizon))
        and bool(np.all(table.final_vertex_count == 13))
    )
    verdicts = verify(make_config(lam=0.0, horizon=10), 100)
    verify_exact = all(
        v.z_score == 0.0 and v.estimate.mean == v.analytic
        for v in verdicts
        if v.passed is not None
    )
    ok = analytics_exact and zero_horizon_exact and simulated_exact and verify_exact
    _report(2, ok, "lambda=0 exact in analytic and simulated paths")
    assert analytics_exact
    assert zero_horizon_exact
    assert simulated_exact
    assert verify_exact


def test_criterion_03_mc_vs_analytic(heavy_verdicts):
    details = []
    ok = True
    for horizon, verdicts in sorted(heavy_verdicts.items()):
        for v in verdicts:
            if v.passed is None:
                continue
            details.append(f"T={horizon} {v.quantity} z={v.z_score:+.2f}")
            ok = ok and v.passed
    _report(3, ok, f"{HEAVY_RUNS} runs; " + "; ".join(details))
    for horizon, verdicts in heavy_verdicts.items():
        for v in verdicts:
            if v.passed is not None:
                assert v.passed, f"T={horizon} {v.quantity}: z={v.z_score:.2f}"


def test_criterion_04_asymptotics():
    horizon, k0 = 2000, 3
    gaps = {}
    for lam in (0.5, 1.0, 2.0):
        mean_gap = _relgap(
            expected_covered(horizon, k0, lam) / horizon, expected_covered_asymptote(lam)
        )
        var_gap = _relgap(
            variance_covered(horizon, k0, lam) / horizon, variance_covered_asymptote(lam)
        )
        gaps[lam] = (mean_gap, var_gap)
    ok = all(m < ASYMPTOTE_RTOL and v < ASYMPTOTE_RTOL for m, v in gaps.values())
    _report(
        4,
        ok,
        "relative gaps at T=2000: "
        + "; ".join(f"lam={lam}: mean {m:.4f}, var {v:.4f}" for lam, (m, v) in gaps.items()),
    )
    for lam, (m, v) in gaps.items():
        assert m < ASYMPTOTE_RTOL, f"mean ratio gap at lambda={lam}: {m}"
        assert v < ASYMPTOTE_RTOL, f"variance ratio gap at lambda={lam}: {v}"


def test_criterion_05_step_distribution_oracle():
    worst = 0.0
    for k0 in range(3, 11):
        for p in (0.0, 1.0 / k0, 1.0):
            start = np.full(k0, (1.0 - p) / (k0 - 1))
            start[0] = p
            for r in range(51):
                oracle = brute_force_step_distribution(start, r)[0]
                worst = max(worst, abs(step_return_prob(r, p, k0) - oracle))
    ok = worst <= ORACLE_TOL
    _report(5, ok, f"max |closed - kernel iteration| = {worst:.2e} over r<=50, k0<=10")
    assert worst <= ORACLE_TOL


def _poisson_chi2(samples: np.ndarray, lam: float) -> tuple[float, float, int]:
    """Chi-square GOF statistic, critical value at 1e-3, and dof."""
    n = len(samples)
    kmax = int(samples.max())
    observed = np.bincount(samples, minlength=kmax + 2).astype(float)
    expected = n * sps.poisson.pmf(np.arange(kmax + 2), lam)
    expected[-1] = n * sps.poisson.sf(kmax, lam)  # right tail mass
    # pool cells from the right until every expected count reaches 5
    while len(expected) > 2 and expected[-1] < 5.0:
        expected[-2] += expected[-1]
        observed[-2] += observed[-1]
        expected = expected[:-1]
        observed = observed[:-1]
    stat = float(((observed - expected) ** 2 / expected).sum())
    dof = len(expected) - 1
    return stat, float(sps.chi2.ppf(1.0 - 1e-3, dof)), dof


def test_criterion_06_poisson_interval_structure():
    cfg = make_config(k0=3, lam=1.0, horizon=5, seed=0)
    n = 100_000
    counts = np.empty((n, 3), dtype=np.int64)
    for i in range(n):
        _, log = run_walk(cfg, i, collect_log=True)
        counts[i] = (
            moves_in_interval(log, 1),
            moves_in_interval(log, 2),
            moves_in_interval(log, 4),
        )
    stat1, crit1, dof1 = _poisson_chi2(counts[:, 0], cfg.lam)
    stat4, crit4, dof4 = _poisson_chi2(counts[:, 2], cfg.lam)
    rho = float(np.corrcoef(counts[:, 1], counts[:, 2])[0, 1])
    ok = stat1 < crit1 and stat4 < crit4 and abs(rho) < 0.01
    _report(
        6,
        ok,
        f"chi2 M_1 {stat1:.1f} < {crit1:.1f} (dof {dof1}); "
        f"chi2 M_4 {stat4:.1f} < {crit4:.1f} (dof {dof4}); "
        f"corr(M_2, M_4) = {rho:+.5f} (|rho| < 0.01); {n} runs",
    )
    assert stat1 < crit1
    assert stat4 < crit4
    assert abs(rho) < 0.01


def test_criterion_07_clt_ks_distance():
    cfg = make_config(k0=3, lam=1.0, horizon=500, seed=0)
    result = clt_check(cfg, 10_000, threads=THREADS)
    # the covered count is integer-valued: its exact distribution keeps a KS
    # distance of at least (max pmf)/2 ~ 1/(2 sd sqrt(2 pi)) from any
    # continuous law, which at T=500 (sd ~ 9.14) is ~0.0218
    sd = math.sqrt(variance_covered(cfg.horizon, cfg.k0, cfg.lam))
    floor = 1.0 / (2.0 * sd * math.sqrt(2.0 * math.pi))
    _report(
        7,
        result.passed,
        f"KS distance {result.ks_distance:.4f} vs threshold 0.02 at T=500, "
        f"10^4 runs (discreteness floor ~{floor:.4f})",
    )
    assert result.ks_distance < 0.02, (
        f"KS distance {result.ks_distance:.4f} >= 0.02: the integer-valued "
        f"covered count has sd {sd:.2f} at T=500, so any sample's KS distance "
        f"to a continuous distribution is bounded below by about half the "
        f"modal probability, {floor:.4f}; the 0.02 threshold sits under that "
        f"floor and cannot be met at this horizon"
    )


def test_criterion_08_azuma_tail_bound():
    cfg = make_config(k0=3, lam=1.0, horizon=100, seed=0)
    rows = azuma_check(cfg, 100_000, [5.0, 10.0, 20.0, 40.0], threads=THREADS)
    ok = all(r.passed for r in rows)
    _report(
        8,
        ok,
        "; ".join(
            f"t={r.threshold:g}: tail {r.empirical_tail:.2e} <= "
            f"bound {r.bound:.2e} + 3se"
            for r in rows
        ),
    )
    for r in rows:
        assert r.passed, f"tail at t={r.threshold} exceeds bound"


def test_criterion_09_no_return_report(heavy_verdicts):
    # the two implementations agree (also exercised across criterion 1's grid)
    spot_ok = all(
        _relgap(no_return_prob(t, k0, lam), no_return_prob_recursive(t, k0, lam))
        <= IDENTITY_RTOL
        for (t, k0, lam) in [(1, 3, 1.0), (50, 10, 0.7), (200, 3, 5.0)]
    )
    info = next(v for v in heavy_verdicts[5] if v.quantity == "P(T,k0)")
    _report(
        9,
        spot_ok and info.passed is None,
        f"closed form == recursion; informational never-revisit comparison at "
        f"T=5: formula {info.analytic:.4f} vs simulated frequency "
        f"{info.estimate.mean:.4f} (z={info.z_score:+.1f}, not gated)",
    )
    assert spot_ok
    assert info.passed is None  # reported, never gated


def test_criterion_10_reproducibility(capsys, tmp_path):
    simulate_argv = [
        "simulate", "--k0", "3", "--lambda", "1", "--horizon", "5",
        "--runs", "300", "--seed", "11",
    ]
    outputs = []
    for threads in ("1", "1", "3"):
        assert main(simulate_argv + ["--threads", threads]) == 0
        outputs.append(capsys.readouterr().out)
    cli_identical = outputs[0] == outputs[1] == outputs[2]

    verify_argv = [
        "verify", "--k0", "3", "--lambda", "1", "--horizon", "3",
        "--runs", "2000", "--seed", "7",
    ]
    assert main(verify_argv + ["--threads", "1"]) == 0
    first = capsys.readouterr().out
    assert main(verify_argv + ["--threads", "2"]) == 0
    second = capsys.readouterr().out
    verify_identical = first == second

    cfg = make_config(horizon=8, seed=23)
    direct = np.array_equal(
        simulate_many(cfg, 128, threads=1).covered,
        simulate_many(cfg, 128, threads=3).covered,
    )
    ok = cli_identical and verify_identical and direct
    _report(
        10,
        ok,
        "identical bytes across reruns and across --threads for simulate "
        "and verify; tables invariant to worker count",
    )
    assert cli_identical
    assert verify_identical
    assert direct
