"""Pydantic request/response models for the HTTP service.

The wire format of a configuration matches the package's JSON convention:
``{"k0": ..., "lambda": ..., "horizon": ..., "insertion": "deterministic" |
{"poisson": beta}, "seed": ...}``.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..model import Deterministic, ModelConfig, PoissonRate, validate


class PoissonInsertion(BaseModel):
    poisson: float = Field(gt=0)


InsertionSpec = Union[Literal["deterministic"], PoissonInsertion]


class ConfigModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k0: int = Field(ge=3)
    lam: float = Field(alias="lambda", ge=0)
    horizon: int = Field(ge=0)
    insertion: InsertionSpec = "deterministic"
    seed: int = Field(default=0, ge=0, lt=2**64)

    def to_config(self) -> ModelConfig:
        if isinstance(self.insertion, PoissonInsertion):
            law = PoissonRate(self.insertion.poisson)
        else:
            law = Deterministic()
        return validate(
            ModelConfig(
                k0=self.k0,
                lam=self.lam,
                horizon=self.horizon,
                insertion=law,
                seed=self.seed,
            )
        )


class AnalyticRequest(BaseModel):
    config: ConfigModel


class AnalyticResponse(BaseModel):
    config: dict
    values: dict[str, float]
    refs: dict[str, str]


class SimulateRequest(BaseModel):
    config: ConfigModel
    n_runs: int = Field(default=1, ge=1)
    threads: int = Field(default=1, ge=1)


class SummaryRow(BaseModel):
    run: int
    covered: int
    visits_to_start: int
    at_start_at_horizon: bool
    no_second_visit: bool
    final_vertex_count: int


class SimulateResponse(BaseModel):
    config: dict
    summaries: list[SummaryRow]


class EstimateModel(BaseModel):
    mean: float
    sample_variance: float
    stderr: float
    n_runs: int
    ci95: tuple[float, float]


class VerdictModel(BaseModel):
    quantity: str
    analytic: float
    estimate: EstimateModel
    z_score: Optional[float]
    passed: Optional[bool]


class VerifyRequest(BaseModel):
    config: ConfigModel
    n_runs: int = Field(default=10_000, ge=2)
    threads: int = Field(default=1, ge=1)


class VerifyResponse(BaseModel):
    config: dict
    verdicts: list[VerdictModel]
    passed: bool


class LlnRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    k0: int = Field(ge=3)
    lam: float = Field(alias="lambda", ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    horizons: list[int]
    n_runs: int = Field(default=10_000, ge=2)
    threads: int = Field(default=1, ge=1)


class LlnPointModel(BaseModel):
    horizon: int
    ratio: float


class LlnResponse(BaseModel):
    points: list[LlnPointModel]


class CltRequest(BaseModel):
    config: ConfigModel
    n_runs: int = Field(default=10_000, ge=2)
    threads: int = Field(default=1, ge=1)


class CltResponse(BaseModel):
    ks_distance: float
    threshold: float
    passed: bool
    n_runs: int
    horizon: int


class AzumaRequest(BaseModel):
    config: ConfigModel
    n_runs: int = Field(default=10_000, ge=2)
    thresholds: list[float] = Field(default=[5.0, 10.0, 20.0, 40.0])
    threads: int = Field(default=1, ge=1)


class AzumaRowModel(BaseModel):
    threshold: float
    empirical_tail: float
    bound: float
    stderr: float
    passed: bool


class AzumaResponse(BaseModel):
    config: dict
    rows: list[AzumaRowModel]


class HealthResponse(BaseModel):
    status: str
