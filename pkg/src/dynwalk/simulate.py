"""Exact discrete-event simulation of the growing-graph walk.

Sampling construction, per run: the move count over ``[0, horizon]`` is
drawn Poisson(lam * horizon) and the move instants are sorted uniforms,
the conditional-uniform construction of a homogeneous Poisson process, so
per-unit-interval move counts come out independent Poisson(lam).  Poisson
insertions are drawn the same way; deterministic insertions sit at the
integer times.  The number of vertices present at each move instant is
then a vectorized merge (inserts win exact-time ties, making the new
vertex available to a simultaneous move), and only the walker's sequential
target choices remain as a tight Python loop.

Every draw happens in a fixed order that does not depend on any recording
flag, so a given ``(seed, run_index)`` pair always yields the same
realization.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    Deterministic,
    EventLog,
    InsertEvent,
    ModelConfig,
    MoveEvent,
    SimulationSummary,
    validate,
)

__all__ = [
    "stream_for_run",
    "run_walk",
    "moves_in_interval",
    "brute_force_step_distribution",
]


def stream_for_run(seed: int, run_index: int) -> np.random.Generator:
    """Independent deterministic random stream for one run of one experiment."""
    return np.random.default_rng(np.random.SeedSequence((seed, run_index)))


def _draw_realization(rng: np.random.Generator, config: ModelConfig):
    """Draw (move_times, insert_times, target_choices) for one run.

    ``target_choices[i]`` is uniform on ``0 .. count_at_move - 2`` and maps
    to a concrete vertex only once the walker's position is known.
    """
    horizon, k0 = config.horizon, config.k0
    n_moves = int(rng.poisson(config.lam * horizon))
    move_times = np.sort(rng.random(n_moves) * horizon)
    if isinstance(config.insertion, Deterministic):
        insert_times = np.arange(1.0, horizon + 1.0)
    else:
        n_inserts = int(rng.poisson(config.insertion.beta * horizon))
        insert_times = np.sort(rng.random(n_inserts) * horizon)
    counts = k0 + np.searchsorted(insert_times, move_times, side="right")
    if n_moves:
        choices = rng.integers(0, counts - 1)
    else:
        choices = np.empty(0, dtype=np.int64)
    return move_times, insert_times, choices


def run_walk(
    config: ModelConfig,
    run_index: int,
    *,
    first_visits: bool = False,
    collect_log: bool = False,
):
    """Simulate one realization over ``[0, horizon]``.

    Returns a :class:`SimulationSummary`, or ``(summary, EventLog)`` when
    ``collect_log`` is set.  ``first_visits`` additionally records the
    first-visit time of every covered vertex on the summary.  Identical
    ``(config.seed, run_index)`` always reproduces the same realization
    regardless of these flags.
    """
    validate(config)
    rng = stream_for_run(config.seed, run_index)
    move_times, insert_times, choices = _draw_realization(rng, config)
    final_count = config.k0 + len(insert_times)

    if not (first_visits or collect_log):
        return _walk_fast(choices, final_count)
    return _walk_full(
        config, move_times, insert_times, choices, final_count, first_visits, collect_log
    )


def _walk_fast(choices: np.ndarray, final_count: int) -> SimulationSummary:
    visited = bytearray(final_count + 1)
    visited[1] = 1
    covered = 1
    visits_to_start = 0
    current = 1
    for raw in choices.tolist():
        v = raw + 1
        if v >= current:
            v += 1
        current = v
        if not visited[v]:
            visited[v] = 1
            covered += 1
        elif v == 1:
            visits_to_start += 1
    return SimulationSummary(
        covered=covered,
        visits_to_start=visits_to_start,
        at_start_at_horizon=current == 1,
        no_second_visit=visits_to_start == 0,
        final_vertex_count=final_count,
    )


def _walk_full(
    config: ModelConfig,
    move_times: np.ndarray,
    insert_times: np.ndarray,
    choices: np.ndarray,
    final_count: int,
    first_visits: bool,
    collect_log: bool,
):
    events: list = []
    prev_time = -math.inf

    def ordered(t: float) -> float:
        # exact ties have probability zero; nudge if one ever materializes
        nonlocal prev_time
        if t <= prev_time:
            t = float(np.nextafter(prev_time, math.inf))
        prev_time = t
        return t

    first_visit: dict[int, float] = {1: 0.0}
    visited = bytearray(final_count + 1)
    visited[1] = 1
    covered = 1
    visits_to_start = 0
    current = 1
    times = move_times.tolist()
    raws = choices.tolist()
    ins = insert_times.tolist()
    next_insert = 0
    next_id = config.k0 + 1
    for i, raw in enumerate(raws):
        t = times[i]
        while next_insert < len(ins) and ins[next_insert] <= t:
            if collect_log:
                events.append(InsertEvent(time=ordered(ins[next_insert]), vertex=next_id))
            next_insert += 1
            next_id += 1
        v = raw + 1
        if v >= current:
            v += 1
        if collect_log:
            events.append(MoveEvent(time=ordered(t), source=current, target=v))
        current = v
        if not visited[v]:
            visited[v] = 1
            covered += 1
            first_visit[v] = t
        elif v == 1:
            visits_to_start += 1
    while next_insert < len(ins):
        if collect_log:
            events.append(InsertEvent(time=ordered(ins[next_insert]), vertex=next_id))
        next_insert += 1
        next_id += 1

    summary = SimulationSummary(
        covered=covered,
        visits_to_start=visits_to_start,
        at_start_at_horizon=current == 1,
        no_second_visit=visits_to_start == 0,
        final_vertex_count=final_count,
        first_visit_time=first_visit if first_visits else None,
    )
    if collect_log:
        return summary, EventLog(config=config, events=tuple(events))
    return summary


def moves_in_interval(log: EventLog, t: int) -> int:
    """Number of move events of ``log`` with time in ``[t - 1, t)``."""
    if not 1 <= t <= log.config.horizon:
        raise ValueError(f"interval index {t} outside 1..{log.config.horizon}")
    lo, hi = float(t - 1), float(t)
    return sum(
        1 for ev in log.events if isinstance(ev, MoveEvent) and lo <= ev.time < hi
    )


def brute_force_step_distribution(p0, r: int) -> np.ndarray:
    """Apply the uniform-move kernel ``r`` times to a distribution vector.

    The kernel on a fixed complete graph sends the mass at each vertex
    uniformly to the others: ``p'_v = (1 - p_v) / (n - 1)``.  Serves as the
    enumeration oracle for :func:`dynwalk.analytic.step_return_prob`.
    """
    p = np.asarray(p0, dtype=float).copy()
    if p.ndim != 1 or len(p) < 3:
        raise ValueError("p0 must be a vector over at least 3 vertices")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("p0 must be a probability vector")
    if r < 0:
        raise ValueError("r must be non-negative")
    n = len(p)
    for _ in range(r):
        p = (1.0 - p) / (n - 1.0)
    return p
