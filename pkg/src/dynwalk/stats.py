"""Monte Carlo aggregation and analytic-vs-simulation verification.

The execution engine runs realizations with run indices ``0 .. n_runs - 1``
and stores each per-run field in an array slot keyed by run index, so the
aggregate is identical however the runs are partitioned across workers
(``threads`` names the worker-pool size; workers are separate processes).

Verdict policy: an analytic value and its Monte Carlo estimate agree when
``|z| <= 4`` (z = estimate minus analytic over the estimate's standard
error), a two-sided one-in-16000 false-alarm rate per comparison.  The
sample variance of the covered count gets its standard error from a
delete-one jackknife.  The no-second-visit formula is reported with its
z-score but never gated: it does not track the simulated never-revisit
frequency (see :mod:`dynwalk.analytic`).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import analytic
from .model import ModelConfig, validate
from .simulate import run_walk

__all__ = [
    "Statistic",
    "McEstimate",
    "Verdict",
    "RunTable",
    "CltResult",
    "AzumaRow",
    "LlnPoint",
    "Z_THRESHOLD",
    "KS_THRESHOLD",
    "simulate_many",
    "summary_rows",
    "estimate",
    "jackknife_variance",
    "verify",
    "lln_trace",
    "clt_check",
    "azuma_check",
]

Z_THRESHOLD = 4.0
KS_THRESHOLD = 0.02


class Statistic(enum.Enum):
    COVERED = "covered"
    VISITS_TO_START = "visits_to_start"
    AT_START_AT_HORIZON = "at_start_at_horizon"
    NO_SECOND_VISIT = "no_second_visit"


@dataclass(frozen=True)
class McEstimate:
    """Aggregated Monte Carlo estimate of one per-run statistic."""

    mean: float
    sample_variance: float
    stderr: float
    n_runs: int
    ci95: tuple[float, float]

    @classmethod
    def from_values(cls, values: np.ndarray) -> "McEstimate":
        n = len(values)
        if n < 2:
            raise ValueError("need at least 2 runs")
        mean = float(values.mean())
        var = float(values.var(ddof=1))
        stderr = math.sqrt(var / n)
        return cls(
            mean=mean,
            sample_variance=var,
            stderr=stderr,
            n_runs=n,
            ci95=(mean - 1.96 * stderr, mean + 1.96 * stderr),
        )

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "sample_variance": self.sample_variance,
            "stderr": self.stderr,
            "n_runs": self.n_runs,
            "ci95": list(self.ci95),
        }


@dataclass(frozen=True)
class Verdict:
    """One analytic-vs-Monte-Carlo comparison.

    ``passed`` is None for informational comparisons that carry a z-score
    but are not gated.  ``z_score`` is None when the estimate has zero
    standard error while the two sides differ (no scale to compare on).
    """

    quantity: str
    analytic: float
    estimate: McEstimate
    z_score: float | None
    passed: bool | None

    def to_json_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "analytic": self.analytic,
            "estimate": self.estimate.to_json_dict(),
            "z_score": self.z_score,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class RunTable:
    """Per-run summary fields for runs ``0 .. n_runs - 1``, one slot per run."""

    covered: np.ndarray
    visits_to_start: np.ndarray
    at_start_at_horizon: np.ndarray
    no_second_visit: np.ndarray
    final_vertex_count: np.ndarray

    @property
    def n_runs(self) -> int:
        return len(self.covered)

    def column(self, statistic: Statistic) -> np.ndarray:
        return getattr(self, statistic.value).astype(float)


def summary_rows(table: RunTable) -> list[dict]:
    """Plain-dict rows of a run table, one per run, for serialization."""
    return [
        {
            "run": i,
            "covered": int(table.covered[i]),
            "visits_to_start": int(table.visits_to_start[i]),
            "at_start_at_horizon": bool(table.at_start_at_horizon[i]),
            "no_second_visit": bool(table.no_second_visit[i]),
            "final_vertex_count": int(table.final_vertex_count[i]),
        }
        for i in range(table.n_runs)
    ]


def _collect(config: ModelConfig, start: int, stop: int) -> RunTable:
    n = stop - start
    covered = np.empty(n, dtype=np.int64)
    visits = np.empty(n, dtype=np.int64)
    at_start = np.empty(n, dtype=bool)
    no_second = np.empty(n, dtype=bool)
    final = np.empty(n, dtype=np.int64)
    for i in range(n):
        s = run_walk(config, start + i)
        covered[i] = s.covered
        visits[i] = s.visits_to_start
        at_start[i] = s.at_start_at_horizon
        no_second[i] = s.no_second_visit
        final[i] = s.final_vertex_count
    return RunTable(covered, visits, at_start, no_second, final)


def _collect_chunk(args) -> tuple[int, RunTable]:
    config, start, stop = args
    return start, _collect(config, start, stop)


def simulate_many(config: ModelConfig, n_runs: int, threads: int = 1) -> RunTable:
    """Run ``n_runs`` realizations (indices 0..n_runs-1) and tabulate them.

    The result is independent of ``threads``: chunks land in their
    index-determined slots.
    """
    validate(config)
    if n_runs < 1:
        raise ValueError("n_runs must be positive")
    if threads <= 1 or n_runs < 4 * threads:
        return _collect(config, 0, n_runs)
    bounds = np.linspace(0, n_runs, threads + 1, dtype=int)
    jobs = [
        (config, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b
    ]
    table = RunTable(
        covered=np.empty(n_runs, dtype=np.int64),
        visits_to_start=np.empty(n_runs, dtype=np.int64),
        at_start_at_horizon=np.empty(n_runs, dtype=bool),
        no_second_visit=np.empty(n_runs, dtype=bool),
        final_vertex_count=np.empty(n_runs, dtype=np.int64),
    )
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for start, chunk in pool.map(_collect_chunk, jobs):
            stop = start + chunk.n_runs
            table.covered[start:stop] = chunk.covered
            table.visits_to_start[start:stop] = chunk.visits_to_start
            table.at_start_at_horizon[start:stop] = chunk.at_start_at_horizon
            table.no_second_visit[start:stop] = chunk.no_second_visit
            table.final_vertex_count[start:stop] = chunk.final_vertex_count
    return table


def estimate(
    config: ModelConfig,
    statistic: Statistic,
    n_runs: int,
    threads: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of one summary statistic (booleans as 0/1)."""
    if n_runs < 2:
        raise ValueError("need at least 2 runs")
    table = simulate_many(config, n_runs, threads)
    return McEstimate.from_values(table.column(statistic))


def jackknife_variance(values: np.ndarray) -> tuple[float, float]:
    """Sample variance of ``values`` and its delete-one jackknife stderr.

    The delete-one variances come from running sums, so the whole
    computation is one vectorized pass.  Values are centered first to
    avoid cancellation in the squared sums.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 values for a jackknife")
    y = x - x.mean()
    s1 = y.sum()
    s2 = (y * y).sum()
    mean_i = (s1 - y) / (n - 1)
    ssq_i = s2 - y * y
    theta_i = (ssq_i - (n - 1) * mean_i**2) / (n - 2)
    theta_bar = theta_i.mean()
    var_jack = (n - 1) / n * ((theta_i - theta_bar) ** 2).sum()
    return float(y.var(ddof=1)), math.sqrt(var_jack)


def _z_score(mc: float, ref: float, stderr: float) -> float | None:
    if stderr > 0:
        return (mc - ref) / stderr
    return 0.0 if mc == ref else None


def verify(config: ModelConfig, n_runs: int, threads: int = 1) -> list[Verdict]:
    """Compare every closed-form quantity with its Monte Carlo counterpart.

    Requires deterministic insertion.  Gated quantities: expected covered
    count, covered-count variance, at-start probability, expected start
    arrivals.  The no-second-visit row is informational.
    """
    report = analytic.full_report(config)
    table = simulate_many(config, n_runs, threads)
    verdicts = []

    def gated(quantity: str, values: np.ndarray) -> None:
        est = McEstimate.from_values(values)
        z = _z_score(est.mean, report.values[quantity], est.stderr)
        passed = z is not None and abs(z) <= Z_THRESHOLD
        verdicts.append(Verdict(quantity, report.values[quantity], est, z, passed))

    gated("E[N_T]", table.column(Statistic.COVERED))

    covered = table.column(Statistic.COVERED)
    var_hat, var_stderr = jackknife_variance(covered)
    # keep the stderr = sqrt(sample_variance / n) invariant for the pseudo-estimate
    var_est = McEstimate(
        mean=var_hat,
        sample_variance=var_stderr**2 * len(covered),
        stderr=var_stderr,
        n_runs=len(covered),
        ci95=(var_hat - 1.96 * var_stderr, var_hat + 1.96 * var_stderr),
    )
    z_var = _z_score(var_hat, report.values["Var(N_T)"], var_stderr)
    verdicts.append(
        Verdict(
            "Var(N_T)",
            report.values["Var(N_T)"],
            var_est,
            z_var,
            z_var is not None and abs(z_var) <= Z_THRESHOLD,
        )
    )

    gated("Q(T,k0)", table.column(Statistic.AT_START_AT_HORIZON))
    gated("E1[T]", table.column(Statistic.VISITS_TO_START))

    never = McEstimate.from_values(table.column(Statistic.NO_SECOND_VISIT))
    z_never = _z_score(never.mean, report.values["P(T,k0)"], never.stderr)
    verdicts.append(
        Verdict("P(T,k0)", report.values["P(T,k0)"], never, z_never, None)
    )
    return verdicts


@dataclass(frozen=True)
class LlnPoint:
    horizon: int
    ratio: float

    def to_json_dict(self) -> dict:
        return {"horizon": self.horizon, "ratio": self.ratio}


def lln_trace(
    k0: int,
    lam: float,
    horizons: list[int],
    n_runs: int,
    seed: int = 0,
    threads: int = 1,
) -> list[LlnPoint]:
    """Mean covered count over horizon, per horizon of an increasing grid.

    Demonstrates convergence of the per-time coverage toward
    ``lam / (1 + lam)``.
    """
    if list(horizons) != sorted(set(int(h) for h in horizons)) or not horizons:
        raise ValueError("horizons must be strictly increasing and non-empty")
    if min(horizons) < 1:
        raise ValueError("horizons must be >= 1")
    points = []
    for horizon in horizons:
        config = validate(ModelConfig(k0=k0, lam=lam, horizon=int(horizon), seed=seed))
        table = simulate_many(config, n_runs, threads)
        points.append(LlnPoint(int(horizon), float(table.covered.mean()) / horizon))
    return points


@dataclass(frozen=True)
class CltResult:
    ks_distance: float
    passed: bool
    n_runs: int
    horizon: int

    def to_json_dict(self) -> dict:
        return {
            "ks_distance": self.ks_distance,
            "threshold": KS_THRESHOLD,
            "passed": self.passed,
            "n_runs": self.n_runs,
            "horizon": self.horizon,
        }


def clt_check(config: ModelConfig, n_runs: int, threads: int = 1) -> CltResult:
    """Kolmogorov-Smirnov distance of the standardized covered count to normal.

    Standardizes per-run covered counts with the analytic mean and standard
    deviation, then computes the one-sample KS distance to the standard
    normal distribution function.  ``passed`` is the plain threshold
    comparison; it is only meaningful in the check's design domain
    (horizon >= 500, n_runs >= 10^4).

    Raises:
        ValueError: when the analytic variance is zero (no standardization).
    """
    validate(config)
    if config.horizon < 1 or config.lam == 0:
        raise ValueError("degenerate variance")
    var = analytic.variance_covered(config.horizon, config.k0, config.lam)
    if var <= 0:
        raise ValueError("degenerate variance")
    mu = analytic.expected_covered(config.horizon, config.k0, config.lam)
    table = simulate_many(config, n_runs, threads)
    z = np.sort((table.covered - mu) / math.sqrt(var))
    cdf = ndtr(z)
    steps = np.arange(1, len(z) + 1) / len(z)
    distance = float(max((steps - cdf).max(), (cdf - (steps - 1.0 / len(z))).max()))
    return CltResult(
        ks_distance=distance,
        passed=distance < KS_THRESHOLD,
        n_runs=n_runs,
        horizon=config.horizon,
    )


@dataclass(frozen=True)
class AzumaRow:
    threshold: float
    empirical_tail: float
    bound: float
    stderr: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "empirical_tail": self.empirical_tail,
            "bound": self.bound,
            "stderr": self.stderr,
            "passed": self.passed,
        }


def azuma_check(
    config: ModelConfig,
    n_runs: int,
    thresholds: list[float],
    threads: int = 1,
) -> list[AzumaRow]:
    """Empirical covered-count tails against the concentration bound.

    A row passes when the empirical frequency of a deviation of at least
    ``t`` from the analytic mean stays within the bound plus three binomial
    standard errors.
    """
    validate(config)
    if any(t < 0 for t in thresholds):
        raise ValueError("thresholds must be non-negative")
    if config.horizon >= 1:
        mu = analytic.expected_covered(config.horizon, config.k0, config.lam)
    else:
        mu = 1.0
    table = simulate_many(config, n_runs, threads)
    deviations = np.abs(table.covered - mu)
    rows = []
    for t in thresholds:
        emp = float((deviations >= t).mean())
        bound = analytic.azuma_tail_bound(t, config.horizon, config.k0)
        stderr = math.sqrt(emp * (1.0 - emp) / n_runs)
        rows.append(
            AzumaRow(
                threshold=float(t),
                empirical_tail=emp,
                bound=bound,
                stderr=stderr,
                passed=emp <= bound + 3.0 * stderr,
            )
        )
    return rows
