"""Domain types and shared numeric helpers.

The model: a complete graph starts with ``k0`` vertices (ids ``1..k0``) and
gains one vertex per insertion event, each new vertex connected to all
existing ones.  A walker starts on vertex 1 at time 0 and jumps at the
arrival times of a Poisson process of rate ``lam`` to a vertex chosen
uniformly among the *other* currently present vertices.  Insertions happen
either at integer times ``1..horizon`` (one vertex each) or at the arrival
times of an independent Poisson process of rate ``beta``.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

__all__ = [
    "ConfigError",
    "Deterministic",
    "PoissonRate",
    "Insertion",
    "ModelConfig",
    "validate",
    "MoveEvent",
    "InsertEvent",
    "Event",
    "EventLog",
    "SimulationSummary",
    "harmonic",
    "harmonic_bounds",
    "harmonic_table",
    "EULER_MASCHERONI",
]


class ConfigError(ValueError):
    """Raised when a configuration violates a model constraint."""


@dataclass(frozen=True)
class Deterministic:
    """One new vertex joins at each integer time ``1..horizon``."""

    def to_json(self) -> str:
        return "deterministic"


@dataclass(frozen=True)
class PoissonRate:
    """New vertices join at the arrival times of a rate-``beta`` Poisson process."""

    beta: float

    def to_json(self) -> dict:
        return {"poisson": self.beta}


Insertion = Union[Deterministic, PoissonRate]


def _insertion_from_json(obj) -> Insertion:
    if obj == "deterministic":
        return Deterministic()
    if isinstance(obj, dict) and set(obj) == {"poisson"}:
        return PoissonRate(float(obj["poisson"]))
    raise ConfigError(f"unrecognized insertion spec: {obj!r}")


@dataclass(frozen=True)
class ModelConfig:
    """Full specification of one experiment.

    Attributes:
        k0: number of vertices present at time 0 (at least 3).
        lam: walker move rate; moves per unit interval are Poisson(lam).
        horizon: number of unit intervals simulated or evaluated.
        insertion: vertex insertion law.
        seed: master seed; combined with a run index it determines every
            draw of a run.
    """

    k0: int
    lam: float
    horizon: int
    insertion: Insertion = field(default_factory=Deterministic)
    seed: int = 0

    def to_json_dict(self) -> dict:
        return {
            "k0": self.k0,
            "lambda": self.lam,
            "horizon": self.horizon,
            "insertion": self.insertion.to_json(),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "ModelConfig":
        try:
            cfg = cls(
                k0=int(obj["k0"]),
                lam=float(obj["lambda"]),
                horizon=int(obj["horizon"]),
                insertion=_insertion_from_json(obj.get("insertion", "deterministic")),
                seed=int(obj.get("seed", 0)),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc.args[0]}") from None
        return validate(cfg)

    @classmethod
    def from_json(cls, text: str) -> "ModelConfig":
        return cls.from_json_dict(json.loads(text))


def validate(config: ModelConfig) -> ModelConfig:
    """Return ``config`` unchanged if every model constraint holds.

    Raises:
        ConfigError: naming the violated constraint.
    """
    if not isinstance(config.k0, int) or isinstance(config.k0, bool):
        raise ConfigError("k0 must be an integer")
    if config.k0 < 3:
        raise ConfigError("k0 must be >= 3")
    if not math.isfinite(config.lam) or config.lam < 0:
        raise ConfigError("lambda must be a finite non-negative real")
    if not isinstance(config.horizon, int) or config.horizon < 0:
        raise ConfigError("horizon must be a non-negative integer")
    if isinstance(config.insertion, PoissonRate):
        beta = config.insertion.beta
        if not math.isfinite(beta) or beta <= 0:
            raise ConfigError("beta must be a finite positive real")
    elif not isinstance(config.insertion, Deterministic):
        raise ConfigError(f"unrecognized insertion law: {config.insertion!r}")
    if not isinstance(config.seed, int) or not 0 <= config.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return config


# ---------------------------------------------------------------------------
# Events and per-run records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MoveEvent:
    time: float
    source: int
    target: int


@dataclass(frozen=True)
class InsertEvent:
    time: float
    vertex: int


Event = Union[MoveEvent, InsertEvent]


@dataclass(frozen=True)
class EventLog:
    """Time-ordered record of the moves and insertions of one realization."""

    config: ModelConfig
    events: tuple[Event, ...]

    def check(self) -> None:
        """Verify the structural invariants of the log; raise on violation.

        Checks strict time ordering, that every move starts from the
        walker's current vertex and targets a distinct, already-inserted
        vertex, and (deterministic insertion) that inserts happen exactly
        at times ``1..horizon`` with sequential ids.
        """
        k0 = self.config.k0
        horizon = self.config.horizon
        prev_time = -math.inf
        vertex_count = k0
        position = 1
        inserts: list[InsertEvent] = []
        for ev in self.events:
            if not 0.0 <= ev.time <= horizon:
                raise ValueError(f"event time {ev.time} outside [0, {horizon}]")
            if ev.time <= prev_time:
                raise ValueError(f"event times not strictly increasing at {ev.time}")
            prev_time = ev.time
            if isinstance(ev, InsertEvent):
                if ev.vertex != vertex_count + 1:
                    raise ValueError(
                        f"insert id {ev.vertex}, expected {vertex_count + 1}"
                    )
                vertex_count += 1
                inserts.append(ev)
            else:
                if ev.source != position:
                    raise ValueError(
                        f"move from {ev.source} but walker is at {position}"
                    )
                if ev.target == ev.source:
                    raise ValueError("move target equals source")
                if not 1 <= ev.target <= vertex_count:
                    raise ValueError(
                        f"move target {ev.target} not inserted yet "
                        f"({vertex_count} vertices at t={ev.time})"
                    )
                position = ev.target
        if isinstance(self.config.insertion, Deterministic):
            expected = [(float(t), k0 + t) for t in range(1, horizon + 1)]
            actual = [(ev.time, ev.vertex) for ev in inserts]
            if actual != expected:
                raise ValueError(
                    "deterministic insertions must occur exactly at times "
                    f"1..{horizon} with ids {k0 + 1}..{k0 + horizon}"
                )


@dataclass(frozen=True)
class SimulationSummary:
    """Per-run statistics of one realization.

    ``covered`` counts distinct vertices visited (the start vertex counts),
    ``visits_to_start`` counts move events landing on vertex 1 (the initial
    placement is not a visit), and ``first_visit_time`` maps each visited
    vertex to the time of its first visit when recording was requested.
    """

    covered: int
    visits_to_start: int
    at_start_at_horizon: bool
    no_second_visit: bool
    final_vertex_count: int
    first_visit_time: Mapping[int, float] | None = None

    def check(self) -> None:
        """Verify the summary's internal consistency; raise on violation."""
        if not 1 <= self.covered <= self.final_vertex_count:
            raise ValueError(f"covered {self.covered} outside [1, {self.final_vertex_count}]")
        if self.no_second_visit != (self.visits_to_start == 0):
            raise ValueError("no_second_visit inconsistent with visits_to_start")
        if self.first_visit_time is not None:
            if len(self.first_visit_time) != self.covered:
                raise ValueError("first_visit_time size differs from covered")
            if self.first_visit_time.get(1) != 0.0:
                raise ValueError("start vertex must map to first visit time 0")


# ---------------------------------------------------------------------------
# Harmonic numbers
# ---------------------------------------------------------------------------

EULER_MASCHERONI = 0.5772156649015329

_HARMONIC_LOCK = threading.Lock()
_HARMONIC_TABLE = np.zeros(1)
_HARMONIC_COMP = 0.0  # Kahan carry across growths
_HARMONIC_MAX = 10_000_000  # growth is a Python loop; keep the cap sane


def harmonic_table(n: int) -> np.ndarray:
    """Return a read-only array ``h`` with ``h[i]`` = sum of 1/1..1/i for i <= n.

    The table is cached and grown by direct ascending summation with Kahan
    compensation: the strict bracket of :func:`harmonic_bounds` is only
    ~1/(12 n^2) wide near n = 10^6, so every prefix must stay within a few
    ulps of the exact sum.  Callers must not mutate the returned view.
    """
    global _HARMONIC_TABLE, _HARMONIC_COMP
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > _HARMONIC_MAX:
        raise ValueError(f"harmonic table capped at n={_HARMONIC_MAX}")
    with _HARMONIC_LOCK:
        size = len(_HARMONIC_TABLE)
        if n >= size:
            grow_to = max(n + 1, 2 * size, 4096)
            out = np.empty(grow_to)
            out[:size] = _HARMONIC_TABLE
            total = float(_HARMONIC_TABLE[-1])
            comp = _HARMONIC_COMP
            for i in range(size, grow_to):
                y = 1.0 / i - comp
                t = total + y
                comp = (t - total) - y
                total = t
                out[i] = total
            _HARMONIC_TABLE = out
            _HARMONIC_COMP = comp
        return _HARMONIC_TABLE


def harmonic(n: int) -> float:
    """Sum of the first ``n`` harmonic terms; ``harmonic(0)`` is 0."""
    return float(harmonic_table(n)[n])


def harmonic_bounds(n: int) -> tuple[float, float]:
    """Strict lower/upper bounds for ``harmonic(n)``, valid for n >= 1.

    Both bounds are ``ln n`` plus the Euler-Mascheroni constant plus a
    correction: ``1/(2(n+1))`` below, ``1/(2n)`` above.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    base = math.log(n) + EULER_MASCHERONI
    return (base + 1.0 / (2 * (n + 1)), base + 1.0 / (2 * n))
