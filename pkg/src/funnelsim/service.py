"""HTTP front end: scenario documents in, traces and metrics out.

The service is stateless; every request carries a complete scenario
document and every response carries everything the caller needs (metrics,
events, feasibility report, optionally the full trace as CSV text).  The
CLI is a thin client of these endpoints.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import __version__, scenarios
from .config import BuiltScenario, ScenarioConfig, build_scenario
from .errors import ConfigError
from .feasibility import StageCheck, max_disturbance
from .sim import Metrics, Trace, run, trace_to_csv

app = FastAPI(
    title="funnelsim",
    version=__version__,
    description="Closed-loop simulation of input-bounded funnel tracking control.",
)


class EventOut(BaseModel):
    kind: str
    stage: str | None
    dim: int | None
    t: float


class AbortOut(BaseModel):
    t: float
    reason: str


class MetricsOut(BaseModel):
    containment_fraction_x: float
    containment_fraction_v: float | None
    max_abs_eps_x: float
    max_abs_eps_v: float | None
    exit_intervals: list[tuple[float, float]]
    recovery_time: float | None
    halt_time: float | None
    saturation_fraction: float
    control_effort: float


class StageCheckOut(BaseModel):
    stage: str
    lhs: list[float]
    rhs: list[float]
    margins: list[float]
    passed: list[bool]
    ok: bool


class FeasibilityOut(BaseModel):
    stage1: StageCheckOut | None
    stage2: StageCheckOut | None
    d_bar_max: list[float] | None


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioConfig
    include_trace: bool = True


class RunResponse(BaseModel):
    status: str  # "ok" | "aborted"
    name: str
    rows: int
    metrics: MetricsOut
    events: list[EventOut]
    feasibility: FeasibilityOut | None
    warnings: list[str]
    abort: AbortOut | None
    trace_csv: str | None


class FeasibilityRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ScenarioConfig


class FeasibilityResponse(BaseModel):
    name: str
    report: FeasibilityOut
    warnings: list[str]


class ScenarioList(BaseModel):
    names: list[str]


def _stage_out(check: StageCheck | None) -> StageCheckOut | None:
    if check is None:
        return None
    return StageCheckOut(
        stage=check.stage,
        lhs=check.lhs.tolist(),
        rhs=check.rhs.tolist(),
        margins=check.margins.tolist(),
        passed=check.passed.tolist(),
        ok=check.ok,
    )


def _metrics_out(metrics: Metrics) -> MetricsOut:
    return MetricsOut(
        containment_fraction_x=metrics.containment_fraction_x,
        containment_fraction_v=metrics.containment_fraction_v,
        max_abs_eps_x=metrics.max_abs_eps_x,
        max_abs_eps_v=metrics.max_abs_eps_v,
        exit_intervals=metrics.exit_intervals,
        recovery_time=metrics.recovery_time,
        halt_time=metrics.halt_time,
        saturation_fraction=metrics.saturation_fraction,
        control_effort=metrics.control_effort,
    )


def _feasibility_out(built: BuiltScenario) -> FeasibilityOut | None:
    if built.stage1 is None:
        return None
    d_max = None
    if built.bounds is not None and built.sim_config.controller.two_stage:
        d_max = max_disturbance(
            built.sim_config.controller.funnel_v,
            built.sim_config.controller.tau_max,
            built.bounds,
        ).tolist()
    return FeasibilityOut(
        stage1=_stage_out(built.stage1),
        stage2=_stage_out(built.stage2),
        d_bar_max=d_max,
    )


def _build_or_422(config: ScenarioConfig) -> BuiltScenario:
    try:
        return build_scenario(config)
    except ConfigError as exc:
        raise HTTPException(
            status_code=422,
            detail={"code": "config_semantic", "message": str(exc)},
        ) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/scenarios", response_model=ScenarioList)
def list_scenarios() -> ScenarioList:
    return ScenarioList(names=list(scenarios.names()))


@app.get("/scenarios/{name}", response_model=ScenarioConfig)
def get_scenario(name: str) -> ScenarioConfig:
    try:
        text = scenarios.document(name)
    except KeyError as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return ScenarioConfig.model_validate_json(text)


@app.post("/run", response_model=RunResponse)
def run_scenario(request: RunRequest) -> RunResponse:
    built = _build_or_422(request.config)
    trace, metrics = run(built.sim_config)
    return RunResponse(
        status="aborted" if trace.abort is not None else "ok",
        name=built.name,
        rows=trace.rows,
        metrics=_metrics_out(metrics),
        events=[EventOut(kind=e.kind, stage=e.stage, dim=e.dim, t=e.t) for e in trace.events],
        feasibility=_feasibility_out(built),
        warnings=built.warnings,
        abort=None if trace.abort is None else AbortOut(t=trace.abort.t, reason=trace.abort.reason),
        trace_csv=trace_to_csv(trace) if request.include_trace else None,
    )


@app.post("/feasibility", response_model=FeasibilityResponse)
def feasibility_report(request: FeasibilityRequest) -> FeasibilityResponse:
    built = _build_or_422(request.config)
    report = _feasibility_out(built)
    if report is None:
        raise HTTPException(
            status_code=422,
            detail={
                "code": "config_semantic",
                "message": "scenario has no feasibility section",
            },
        )
    return FeasibilityResponse(name=built.name, report=report, warnings=built.warnings)
