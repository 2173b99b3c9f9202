"""Random walks on a growing complete graph.

A walker jumps at Poisson-distributed times between the vertices of a
complete graph that gains a new, fully connected vertex at each insertion
time.  The package evaluates the model's closed-form quantities (coverage
moments, return and occupancy probabilities, visit counts), simulates the
process exactly, and verifies each side against the other statistically.
"""

from .analytic import (
    AnalyticReport,
    at_start_prob,
    at_start_prob_recursive,
    azuma_tail_bound,
    expected_covered,
    expected_covered_asymptote,
    expected_visits,
    expected_visits_unit,
    full_report,
    no_return_prob,
    no_return_prob_recursive,
    step_return_prob,
    unit_time_at_v,
    variance_covered,
    variance_covered_asymptote,
    visit_prob,
)
from .model import (
    ConfigError,
    Deterministic,
    EventLog,
    ModelConfig,
    PoissonRate,
    SimulationSummary,
    harmonic,
    harmonic_bounds,
    validate,
)
from .simulate import (
    brute_force_step_distribution,
    moves_in_interval,
    run_walk,
    stream_for_run,
)
from .stats import (
    AzumaRow,
    CltResult,
    LlnPoint,
    McEstimate,
    Statistic,
    Verdict,
    azuma_check,
    clt_check,
    estimate,
    lln_trace,
    simulate_many,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticReport",
    "AzumaRow",
    "CltResult",
    "ConfigError",
    "Deterministic",
    "EventLog",
    "LlnPoint",
    "McEstimate",
    "ModelConfig",
    "PoissonRate",
    "SimulationSummary",
    "Statistic",
    "Verdict",
    "at_start_prob",
    "at_start_prob_recursive",
    "azuma_check",
    "azuma_tail_bound",
    "brute_force_step_distribution",
    "clt_check",
    "estimate",
    "expected_covered",
    "expected_covered_asymptote",
    "expected_visits",
    "expected_visits_unit",
    "full_report",
    "harmonic",
    "harmonic_bounds",
    "lln_trace",
    "moves_in_interval",
    "no_return_prob",
    "no_return_prob_recursive",
    "run_walk",
    "simulate_many",
    "step_return_prob",
    "stream_for_run",
    "unit_time_at_v",
    "validate",
    "variance_covered",
    "variance_covered_asymptote",
    "verify",
    "visit_prob",
]
