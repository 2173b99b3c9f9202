"""Closed-form quantities of the growing-graph walk, with recursion cross-checks.

Notation used throughout: ``horizon`` (integer number of unit intervals,
written T in the quantity keys), ``k0`` (initial vertex count), ``lam``
(move rate).  ``H(n)`` denotes the n-th harmonic number.  Every
exponential of a harmonic difference is evaluated as
``exp(-lam * (H(b) - H(a)))`` with the difference formed first, which stays
stable for large horizons where the individual exponentials would
under/overflow.

Two quantities are computed along two independent routes each (a direct
closed form and a forward recursion) so the test suite can cross-check
them to near machine precision:

* ``no_return_prob`` / ``no_return_prob_recursive``: the no-second-visit
  formula.  Note this expression exceeds 1 for small ``lam * horizon``; it
  is exposed unclamped (see ``full_report`` for how it is labelled).
* ``at_start_prob`` / ``at_start_prob_recursive``: probability of occupying
  the start vertex at an integer time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ConfigError,
    Deterministic,
    ModelConfig,
    harmonic_table,
    validate,
)

__all__ = [
    "visit_prob",
    "visit_prob_profile",
    "expected_covered",
    "expected_covered_asymptote",
    "variance_covered",
    "variance_covered_asymptote",
    "azuma_tail_bound",
    "no_return_prob",
    "no_return_prob_recursive",
    "step_return_prob",
    "unit_time_at_v",
    "at_start_prob",
    "at_start_prob_recursive",
    "at_start_profile",
    "expected_visits_unit",
    "expected_visits",
    "AnalyticReport",
    "full_report",
]


def _check_common(horizon: int, k0: int, lam: float, min_horizon: int = 0) -> None:
    if k0 < 3:
        raise ConfigError("k0 must be >= 3")
    if lam < 0 or not math.isfinite(lam):
        raise ConfigError("lambda must be a finite non-negative real")
    if horizon < min_horizon:
        raise ConfigError(f"horizon must be >= {min_horizon}")


def visit_prob(j: int, horizon: int, k0: int, lam: float) -> float:
    """Probability that vertex ``j`` is visited at least once by the horizon.

    Vertex 1 is the start (probability 1); vertices inserted at or after
    the horizon cannot be reached (probability 0).  Requires horizon >= 1;
    at horizon 0 exactly the start vertex is covered, which callers handle
    separately.
    """
    _check_common(horizon, k0, lam, min_horizon=1)
    if j < 1:
        raise ConfigError("vertex ids start at 1")
    if j == 1:
        return 1.0
    if j >= k0 + horizon:
        return 0.0
    h = harmonic_table(k0 + horizon)
    top = h[k0 + horizon - 2]
    if j <= k0:
        return 1.0 - math.exp(-lam * (top - h[k0 - 2]))
    return 1.0 - math.exp(-lam * (top - h[j - 2]))


def visit_prob_profile(horizon: int, k0: int, lam: float) -> np.ndarray:
    """Vector of visit probabilities for vertices ``2 .. k0 + horizon - 1``."""
    _check_common(horizon, k0, lam, min_horizon=1)
    h = harmonic_table(k0 + horizon)
    top = h[k0 + horizon - 2]
    u = np.empty(k0 + horizon - 2)
    u[: k0 - 1] = 1.0 - math.exp(-lam * (top - h[k0 - 2]))
    inserted = np.arange(k0 + 1, k0 + horizon)
    u[k0 - 1 :] = 1.0 - np.exp(-lam * (top - h[inserted - 2]))
    return u


def expected_covered(horizon: int, k0: int, lam: float) -> float:
    """Expected number of distinct vertices visited by the horizon."""
    _check_common(horizon, k0, lam, min_horizon=1)
    h = harmonic_table(k0 + horizon)
    top = h[k0 + horizon - 2]
    unvisited = (k0 - 1) * math.exp(-lam * (top - h[k0 - 2]))
    inserted = np.arange(k0 + 1, k0 + horizon)
    unvisited += float(np.exp(-lam * (top - h[inserted - 2])).sum())
    return (k0 + horizon - 1) - unvisited


def expected_covered_asymptote(lam: float) -> float:
    """Limit of expected covered count per unit time: lam / (1 + lam)."""
    if lam < 0:
        raise ConfigError("lambda must be non-negative")
    return lam / (1.0 + lam)


def variance_covered(horizon: int, k0: int, lam: float) -> float:
    """Variance of the covered count: sum of u_j (1 - u_j) over vertices."""
    u = visit_prob_profile(horizon, k0, lam)
    return float((u * (1.0 - u)).sum())


def variance_covered_asymptote(lam: float) -> float:
    """Limit of covered-count variance per unit time: lam / ((lam+1)(2 lam+1))."""
    if lam < 0:
        raise ConfigError("lambda must be non-negative")
    return lam / ((lam + 1.0) * (2.0 * lam + 1.0))


def azuma_tail_bound(t: float, horizon: int, k0: int) -> float:
    """Concentration bound exp(-2 t^2 / (k0 + horizon)) on the covered-count tail.

    Bounds the probability that the covered count deviates from its mean
    by at least ``t``; follows from viewing the count as a sum of
    independent bounded indicators.
    """
    if t < 0:
        raise ConfigError("t must be non-negative")
    _check_common(horizon, k0, 0.0)
    return math.exp(-2.0 * t * t / (k0 + horizon))


# ---------------------------------------------------------------------------
# Visits to the start vertex
# ---------------------------------------------------------------------------


def no_return_prob(horizon: int, k0: int, lam: float) -> float:
    """No-second-visit formula for the start vertex, direct closed form.

    Caution: the value exceeds 1 for small ``lam * horizon`` (degenerate
    at lam = 0), so it is not a probability on the whole parameter range.
    It is exposed unclamped because its role is to be cross-checked against
    :func:`no_return_prob_recursive` and reported alongside the simulated
    never-revisit frequency, which it does not generally match.
    """
    _check_common(horizon, k0, lam)
    if horizon == 0:
        return 1.0
    h = harmonic_table(k0 + horizon)
    top = h[k0 + horizon - 2]
    i = np.arange(horizon)
    front = 1.0 + 1.0 / (k0 - 2 + i)
    exponent = i + (top - h[k0 - 2 + i])
    return math.exp(-lam * horizon) + float((front * np.exp(-lam * exponent)).sum())


def no_return_prob_recursive(horizon: int, k0: int, lam: float) -> float:
    """Same quantity as :func:`no_return_prob`, by iterating its recursion.

    Iterates ``P(t, m) = e^{-lam} P(t-1, m+1) + ((m-1)/(m-2)) e^{-lam (H(m+t-2) - H(m-2))}``
    upward from ``P(0, k0 + horizon) = 1``; no recursion depth is involved.
    """
    _check_common(horizon, k0, lam)
    h = harmonic_table(k0 + horizon)
    decay = math.exp(-lam)
    p = 1.0
    for t in range(1, horizon + 1):
        m = k0 + horizon - t  # evaluating P(t, m); horizon end is m + t
        fresh = (m - 1.0) / (m - 2.0) * math.exp(-lam * (h[m + t - 2] - h[m - 2]))
        p = decay * p + fresh
    return p


def step_return_prob(r: int, p: float, k0: int) -> float:
    """Probability of occupying a marked vertex after ``r`` uniform moves.

    The walker moves on a fixed complete graph with ``k0`` vertices; ``p``
    is the probability of starting on the marked vertex.  Geometric
    contraction toward the uniform mass 1/k0 with ratio -1/(k0-1).
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError("p must be a probability")
    if k0 < 3:
        raise ConfigError("k0 must be >= 3")
    if r < 0:
        raise ConfigError("r must be non-negative")
    return 1.0 / k0 - (1.0 - p * k0) / k0 * (-1.0 / (k0 - 1.0)) ** r


def unit_time_at_v(p: float, k0: int, lam: float) -> float:
    """Probability of occupying the marked vertex after one unit interval.

    Averages :func:`step_return_prob` over a Poisson(lam) number of moves;
    the vertex count stays ``k0`` throughout the interval.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError("p must be a probability")
    _check_common(0, k0, lam)
    return 1.0 / k0 - (1.0 - p * k0) / k0 * math.exp(-lam * k0 / (k0 - 1.0))


def at_start_profile(horizon: int, k0: int, lam: float) -> np.ndarray:
    """Array ``q`` with ``q[t]`` = probability of being at the start vertex at time t.

    Built by the forward recursion
    ``q[t] = q[t-1] e^{-lam a_t} + (1 - e^{-lam a_t}) / (k0 + t - 1)`` with
    ``a_t = (k0 + t - 1)/(k0 + t - 2)``, so one pass serves every prefix.
    """
    _check_common(horizon, k0, lam)
    q = np.empty(horizon + 1)
    q[0] = 1.0
    value = 1.0
    for t in range(1, horizon + 1):
        decay = math.exp(-lam * (k0 + t - 1.0) / (k0 + t - 2.0))
        value = value * decay + (1.0 - decay) / (k0 + t - 1.0)
        q[t] = value
    return q


def at_start_prob_recursive(horizon: int, k0: int, lam: float) -> float:
    """Probability of being at the start vertex at the horizon, by recursion."""
    return float(at_start_profile(horizon, k0, lam)[horizon])


def at_start_prob(horizon: int, k0: int, lam: float) -> float:
    """Probability of being at the start vertex at the horizon, closed form.

    The product form telescopes into
    ``e^{-S_T} + sum_j e^{-(S_T - S_j)} (1 - e^{-lam a_j}) / (k0 + j - 1)``
    with ``S_j`` the partial sums of ``lam a_i``; forming each exponent as
    a difference keeps every factor in [0, 1] at any horizon.
    """
    _check_common(horizon, k0, lam)
    if horizon == 0:
        return 1.0
    t = np.arange(1, horizon + 1)
    alpha = lam * (k0 + t - 1.0) / (k0 + t - 2.0)
    s = np.cumsum(alpha)
    total = s[-1]
    terms = np.exp(-(total - s)) * (1.0 - np.exp(-alpha)) / (k0 + t - 1.0)
    return math.exp(-total) + float(terms.sum())


def expected_visits_unit(p: float, k0: int, lam: float) -> float:
    """Expected arrivals at the marked vertex during one unit interval.

    ``p`` is the probability of starting the interval on the marked vertex;
    the vertex count stays ``k0``.  The initial placement does not count as
    an arrival.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError("p must be a probability")
    _check_common(0, k0, lam)
    stationary = lam / k0
    tilt = (1.0 - p * k0) / (k0 * k0) * (1.0 - math.exp(-lam * k0 / (k0 - 1.0)))
    return stationary + tilt


def expected_visits(horizon: int, k0: int, lam: float) -> float:
    """Expected arrivals at the start vertex over the whole horizon.

    Sums the per-interval expectation with the at-start probability of each
    interval's opening instant; the at-start sequence is produced once so
    the total cost is linear in the horizon.
    """
    _check_common(horizon, k0, lam)
    if horizon == 0:
        return 0.0
    q = at_start_profile(horizon - 1, k0, lam).tolist()
    total = 0.0
    for i in range(horizon):
        m = k0 + i
        decay = math.exp(-lam * m / (m - 1.0))
        total += lam / m + (1.0 - q[i] * m) / (m * m) * (1.0 - decay)
    return total


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

_REFS = {
    "E[N_T]": "expected distinct vertices covered by the horizon (closed form)",
    "Var(N_T)": "variance of the covered count (independent indicator sum)",
    "P(T,k0)": "no-second-visit formula (unclamped; exceeds 1 for small lambda*T)",
    "Q(T,k0)": "probability of occupying the start vertex at the horizon",
    "E1[T]": "expected arrivals at the start vertex by the horizon",
}


@dataclass(frozen=True)
class AnalyticReport:
    """Evaluated closed forms for one configuration.

    ``values`` maps a quantity key to its value and ``refs`` carries a
    human-readable description per key.  All entries except ``P(T,k0)``
    are genuine probabilities or moments within their natural ranges;
    ``P(T,k0)`` is the raw formula value (see :func:`no_return_prob`).
    """

    config: ModelConfig
    values: dict[str, float]
    refs: dict[str, str]

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "values": dict(self.values),
            "refs": dict(self.refs),
        }


def full_report(config: ModelConfig) -> AnalyticReport:
    """Evaluate every closed-form quantity for ``config``.

    Only deterministic insertion is supported: the closed forms are derived
    for one insertion per unit interval.
    """
    validate(config)
    if not isinstance(config.insertion, Deterministic):
        raise ConfigError("analytic report requires deterministic insertion")
    horizon, k0, lam = config.horizon, config.k0, config.lam
    if horizon == 0:
        values = {
            "E[N_T]": 1.0,
            "Var(N_T)": 0.0,
            "P(T,k0)": 1.0,
            "Q(T,k0)": 1.0,
            "E1[T]": 0.0,
        }
    else:
        values = {
            "E[N_T]": expected_covered(horizon, k0, lam),
            "Var(N_T)": variance_covered(horizon, k0, lam),
            "P(T,k0)": no_return_prob(horizon, k0, lam),
            "Q(T,k0)": at_start_prob(horizon, k0, lam),
            "E1[T]": expected_visits(horizon, k0, lam),
        }
    return AnalyticReport(config=config, values=values, refs=dict(_REFS))
