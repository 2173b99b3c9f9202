"""HTTP service wrapping the core package.

All endpoints are stateless and deterministic for a given request body, so
responses are cacheable and safe to retry.  Domain violations that pass
schema validation (for example an analytic report on Poisson insertion)
come back as 400 with a message naming the constraint.
"""

from __future__ import annotations

from contextlib import contextmanager

from fastapi import FastAPI, HTTPException

from .. import stats
from ..analytic import full_report
from ..model import ConfigError
from . import schemas


@contextmanager
def _domain_errors():
    """Translate domain ValueErrors into 400 responses inside a handler."""
    try:
        yield
    except (ConfigError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(
        title="dynwalk",
        description=(
            "Random walk on a growing complete graph: closed-form analytics, "
            "exact Monte Carlo simulation, and analytic-vs-simulation checks."
        ),
    )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/analytic", response_model=schemas.AnalyticResponse)
    def analytic(request: schemas.AnalyticRequest) -> dict:
        with _domain_errors():
            return full_report(request.config.to_config()).to_json_dict()

    @app.post("/simulate", response_model=schemas.SimulateResponse)
    def simulate(request: schemas.SimulateRequest) -> dict:
        with _domain_errors():
            config = request.config.to_config()
            table = stats.simulate_many(config, request.n_runs, request.threads)
        return {"config": config.to_json_dict(), "summaries": stats.summary_rows(table)}

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(request: schemas.VerifyRequest) -> dict:
        with _domain_errors():
            config = request.config.to_config()
            verdicts = stats.verify(config, request.n_runs, request.threads)
        return {
            "config": config.to_json_dict(),
            "verdicts": [v.to_json_dict() for v in verdicts],
            "passed": all(v.passed for v in verdicts if v.passed is not None),
        }

    @app.post("/lln", response_model=schemas.LlnResponse)
    def lln(request: schemas.LlnRequest) -> dict:
        with _domain_errors():
            points = stats.lln_trace(
                request.k0,
                request.lam,
                request.horizons,
                request.n_runs,
                seed=request.seed,
                threads=request.threads,
            )
        return {"points": [p.to_json_dict() for p in points]}

    @app.post("/clt", response_model=schemas.CltResponse)
    def clt(request: schemas.CltRequest) -> dict:
        with _domain_errors():
            config = request.config.to_config()
            result = stats.clt_check(config, request.n_runs, request.threads)
        return result.to_json_dict()

    @app.post("/azuma", response_model=schemas.AzumaResponse)
    def azuma(request: schemas.AzumaRequest) -> dict:
        with _domain_errors():
            config = request.config.to_config()
            rows = stats.azuma_check(
                config, request.n_runs, request.thresholds, request.threads
            )
        return {
            "config": config.to_json_dict(),
            "rows": [r.to_json_dict() for r in rows],
        }

    return app


app = create_app()
