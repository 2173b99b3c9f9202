"""Million-run simulation checks of single closed-form values.

These pin specific (config, statistic) pairs beyond the broader verdict
gates in the acceptance module; each takes tens of seconds.
"""

from __future__ import annotations

import os

import pytest

from dynwalk import (
    Statistic,
    at_start_prob,
    clt_check,
    estimate,
    expected_covered,
    expected_visits,
)

from conftest import make_config

THREADS = min(os.cpu_count() or 1, 4)
N_RUNS = 1_000_000


def test_one_interval_covered_mean_in_ci95():
    est = estimate(
        make_config(k0=3, lam=1.0, horizon=1, seed=0),
        Statistic.COVERED,
        N_RUNS,
        threads=THREADS,
    )
    target = expected_covered(1, 3, 1.0)
    assert est.ci95[0] <= target <= est.ci95[1]


def test_at_start_probability_in_ci95():
    est = estimate(
        make_config(k0=3, lam=1.0, horizon=4, seed=0),
        Statistic.AT_START_AT_HORIZON,
        N_RUNS,
        threads=THREADS,
    )
    target = at_start_prob(4, 3, 1.0)
    assert est.ci95[0] <= target <= est.ci95[1]


def test_at_start_probability_faster_walker():
    est = estimate(
        make_config(k0=3, lam=1.5, horizon=4, seed=0),
        Statistic.AT_START_AT_HORIZON,
        N_RUNS,
        threads=THREADS,
    )
    target = at_start_prob(4, 3, 1.5)
    assert abs(est.mean - target) <= 3 * est.stderr


def test_expected_start_arrivals_over_horizon():
    est = estimate(
        make_config(k0=3, lam=1.0, horizon=5, seed=0),
        Statistic.VISITS_TO_START,
        N_RUNS,
        threads=THREADS,
    )
    target = expected_visits(5, 3, 1.0)
    assert abs(est.mean - target) <= 3 * est.stderr


def test_normality_check_passes_on_fine_lattice():
    # at horizon 2000 the standardized coverage lattice is fine enough
    # (sd ~18.3, discreteness floor ~0.011) for the 0.02 threshold
    result = clt_check(make_config(k0=3, lam=1.0, horizon=2000, seed=0),
                       10_000, threads=THREADS)
    assert result.passed
    assert result.ks_distance < 0.02
