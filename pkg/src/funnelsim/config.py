"""Declarative scenario documents and their translation into core objects.

A scenario is one self-describing JSON document: plant, reference,
disturbance, controller (funnels + transforms + bounds), optional
feasibility bounds, and integration settings.  Scalars broadcast to the
plant dimension; unknown keys are rejected.  `load_scenario` goes from
document text to ready-to-run core objects, raising ConfigSyntaxError for
malformed JSON and ConfigError (or pydantic's ValidationError) for
semantically broken documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import disturbance as dist_mod
from . import reference as ref_mod
from .controller import ControllerParams
from .errors import ConfigError, ConfigSyntaxError
from .feasibility import FeasibilityBounds, StageCheck, check_stage1, check_stage2, default_a_ref_bar
from .funnel import FunnelSpec
from .plants import OmniPlant, ScaraParams, ScaraPlant
from .sim import SimConfig, _resolve_initial
from .transforms import DEFAULT_ZEROING, SATURATION_KINDS, Transform

Scalars = Union[float, list[float]]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FunnelModel(_Model):
    """p: initial half-widths, q: ultimate half-widths, mu: decay rates."""

    p: Scalars
    q: Scalars
    mu: Scalars


class TransformModel(_Model):
    kind: Literal[
        "saturation_tanh",
        "saturation_logistic",
        "saturation_smooth",
        "zeroing_sine_gauss",
        "zeroing_poly_sine_gauss",
    ]
    a: float | None = None
    c: float | None = None
    renormalize: bool = False


class ScaraPlantModel(_Model):
    plant: Literal["scara2r"]
    m: float = 1.0
    l: float = 1.0
    g: float = 9.81


class OmniPlantModel(_Model):
    plant: Literal["omni"]


PlantModel = Annotated[Union[ScaraPlantModel, OmniPlantModel], Field(discriminator="plant")]


class ConstantReferenceModel(_Model):
    kind: Literal["constant"]
    setpoint: Scalars


class SinusoidReferenceModel(_Model):
    kind: Literal["sinusoid"]
    center: Scalars
    amplitude: Scalars
    angular_frequency: Scalars
    phase: Scalars = 0.0


class CircleJointReferenceModel(_Model):
    kind: Literal["circle_joint"]
    center: list[float]
    radius: float
    angular_frequency: float


ReferenceModel = Annotated[
    Union[ConstantReferenceModel, SinusoidReferenceModel, CircleJointReferenceModel],
    Field(discriminator="kind"),
]


class ZeroDisturbanceModel(_Model):
    kind: Literal["zero"]


class ConstantDisturbanceModel(_Model):
    kind: Literal["constant"]
    value: Scalars


class SinusoidDisturbanceModel(_Model):
    kind: Literal["sinusoid"]
    amplitude: Scalars
    angular_frequency: Scalars
    phase: Scalars = 0.0


class JerkPulseModel(_Model):
    kind: Literal["jerk_pulse"]
    t_start: float
    duration: float
    magnitude: Scalars


class SumDisturbanceModel(_Model):
    kind: Literal["sum"]
    terms: list["DisturbanceModel"]


DisturbanceModel = Annotated[
    Union[
        ZeroDisturbanceModel,
        ConstantDisturbanceModel,
        SinusoidDisturbanceModel,
        JerkPulseModel,
        SumDisturbanceModel,
    ],
    Field(discriminator="kind"),
]
SumDisturbanceModel.model_rebuild()


class ControllerModel(_Model):
    funnel_x: FunnelModel
    transform_x: TransformModel = TransformModel(kind="saturation_smooth", a=5.0)
    v_max: Scalars
    funnel_v: FunnelModel | None = None
    transform_v: TransformModel | None = None
    tau_max: Scalars | None = None


class FeasibilityModel(_Model):
    """`v_ref_bar` and `a_ref_bar` accept "auto": derived from the reference
    and from the stage-one transform's Lipschitz constant respectively.
    The stage-two fields (m_lower, vm_lower, vm_upper, m_i, d_bar) only make
    sense for torque-input scenarios and must be given together."""

    m_lower: float | None = None
    vm_lower: Scalars | None = None
    vm_upper: Scalars | None = None
    m_i: float | None = None
    d_bar: Scalars | None = None
    v_ref_bar: Union[Literal["auto"], Scalars] = "auto"
    a_ref_bar: Union[Literal["auto"], Scalars] = "auto"


class SimModel(_Model):
    dt: float = 1e-3
    horizon: float = 60.0
    log_stride: int = 1
    halt_threshold: float | None = None
    halt_dwell: float = 1.0


class InitialModel(_Model):
    x: list[float] | None = None
    v: list[float] | None = None


class OutputModel(_Model):
    dir: str | None = None


class ScenarioConfig(_Model):
    """Complete declarative record of one run."""

    name: str = ""
    plant: PlantModel
    reference: ReferenceModel
    controller: ControllerModel
    disturbance: DisturbanceModel = ZeroDisturbanceModel(kind="zero")
    feasibility: FeasibilityModel | None = None
    sim: SimModel = SimModel()
    initial: InitialModel | None = None
    output: OutputModel | None = None

    def canonical(self) -> "ScenarioConfig":
        """Equivalent config with scalars broadcast, transform constants
        materialized, and "auto" feasibility entries resolved."""
        built = build_scenario(self)
        return built.canonical_config


def _broadcast(value: Scalars, n: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == n:
        return arr
    if arr.size == 1:
        return np.full(n, arr[0])
    raise ConfigError(f"{name} has {arr.size} entries, expected 1 or {n}")


def _build_transform(model: TransformModel | None) -> Transform | None:
    if model is None:
        return None
    kind = model.kind
    try:
        if kind in SATURATION_KINDS:
            return Transform(kind, a=model.a if model.a is not None else 5.0)
        c_default, a_default = DEFAULT_ZEROING[kind]
        return Transform(
            kind,
            a=model.a if model.a is not None else a_default,
            c=model.c if model.c is not None else c_default,
            renormalize=model.renormalize,
        )
    except ValueError as exc:
        raise ConfigError(f"transform {kind}: {exc}") from exc


def _build_reference(model, n: int):
    if isinstance(model, ConstantReferenceModel):
        return ref_mod.ConstantReference(_broadcast(model.setpoint, n, "reference.setpoint"))
    if isinstance(model, SinusoidReferenceModel):
        return ref_mod.SinusoidReference(
            _broadcast(model.center, n, "reference.center"),
            _broadcast(model.amplitude, n, "reference.amplitude"),
            _broadcast(model.angular_frequency, n, "reference.angular_frequency"),
            _broadcast(model.phase, n, "reference.phase"),
        )
    if n != 2:
        raise ConfigError("circle_joint reference requires a two-dimensional plant")
    try:
        return ref_mod.CircleJointReference(
            np.asarray(model.center, dtype=float), model.radius, model.angular_frequency
        )
    except ValueError as exc:
        raise ConfigError(f"reference: {exc}") from exc


def _build_disturbance(model, n: int):
    if isinstance(model, ZeroDisturbanceModel):
        return dist_mod.ZeroDisturbance(n)
    if isinstance(model, ConstantDisturbanceModel):
        return dist_mod.ConstantDisturbance(_broadcast(model.value, n, "disturbance.value"))
    if isinstance(model, SinusoidDisturbanceModel):
        try:
            return dist_mod.SinusoidDisturbance(
                _broadcast(model.amplitude, n, "disturbance.amplitude"),
                _broadcast(model.angular_frequency, n, "disturbance.angular_frequency"),
                _broadcast(model.phase, n, "disturbance.phase"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(model, JerkPulseModel):
        try:
            return dist_mod.JerkPulse(
                model.t_start, model.duration,
                _broadcast(model.magnitude, n, "disturbance.magnitude"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return dist_mod.SumDisturbance(tuple(_build_disturbance(term, n) for term in model.terms))


def _build_funnel(model: FunnelModel, n: int, label: str) -> FunnelSpec:
    try:
        return FunnelSpec.of(model.p, model.q, model.mu, dim=n)
    except ValueError as exc:
        raise ConfigError(f"{label}: {exc}") from exc


@dataclass
class BuiltScenario:
    """Validated core objects for one scenario document."""

    config: ScenarioConfig
    canonical_config: ScenarioConfig
    sim_config: SimConfig
    bounds: FeasibilityBounds | None
    stage1: StageCheck | None
    stage2: StageCheck | None
    warnings: list[str]

    @property
    def name(self) -> str:
        return self.config.name or "scenario"


def build_scenario(cfg: ScenarioConfig) -> BuiltScenario:
    """Translate a validated document into core objects, running all
    cross-field semantic checks (and the feasibility checks, whose failures
    are warnings rather than errors)."""
    if isinstance(cfg.plant, ScaraPlantModel):
        try:
            plant = ScaraPlant(ScaraParams(cfg.plant.m, cfg.plant.l, cfg.plant.g))
        except ValueError as exc:
            raise ConfigError(f"plant: {exc}") from exc
    else:
        plant = OmniPlant()
    n = plant.n

    reference = _build_reference(cfg.reference, n)
    disturbance = _build_disturbance(cfg.disturbance, n)

    ctl = cfg.controller
    stage2_parts = (ctl.funnel_v, ctl.transform_v, ctl.tau_max)
    if any(p is not None for p in stage2_parts) and not all(p is not None for p in stage2_parts):
        raise ConfigError(
            "controller: funnel_v, transform_v and tau_max must be given together"
        )
    two_stage = ctl.tau_max is not None
    params = ControllerParams(
        funnel_x=_build_funnel(ctl.funnel_x, n, "controller.funnel_x"),
        transform_x=_build_transform(ctl.transform_x),
        v_max=_broadcast(ctl.v_max, n, "controller.v_max"),
        funnel_v=_build_funnel(ctl.funnel_v, n, "controller.funnel_v") if two_stage else None,
        transform_v=_build_transform(ctl.transform_v) if two_stage else None,
        tau_max=_broadcast(ctl.tau_max, n, "controller.tau_max") if two_stage else None,
    )

    x0 = v0 = None
    if cfg.initial is not None:
        if cfg.initial.x is not None:
            x0 = _broadcast(cfg.initial.x, n, "initial.x")
        if cfg.initial.v is not None:
            if not two_stage:
                raise ConfigError("initial.v is meaningless for a single-stage scenario")
            v0 = _broadcast(cfg.initial.v, n, "initial.v")

    sim_config = SimConfig(
        plant=plant,
        disturbance=disturbance,
        reference=reference,
        controller=params,
        dt=cfg.sim.dt,
        horizon=cfg.sim.horizon,
        log_stride=cfg.sim.log_stride,
        x0=x0,
        v0=v0,
        halt_threshold=cfg.sim.halt_threshold,
        halt_dwell=cfg.sim.halt_dwell,
    )
    if not sim_config.dt > 0.0:
        raise ConfigError("sim.dt must be > 0")
    if sim_config.horizon < sim_config.dt:
        raise ConfigError("sim.horizon must be at least one step")
    if sim_config.log_stride < 1:
        raise ConfigError("sim.log_stride must be >= 1")
    _resolve_initial(sim_config)  # dimension and initial-containment checks

    warnings: list[str] = []
    bounds = None
    stage1 = stage2 = None
    feas_canon = None
    if cfg.feasibility is not None:
        feas = cfg.feasibility
        v_ref_bar = (
            reference.velocity_bound()
            if feas.v_ref_bar == "auto"
            else _broadcast(feas.v_ref_bar, n, "feasibility.v_ref_bar")
        )
        a_ref_bar = (
            default_a_ref_bar(params.transform_x, params.v_max)
            if feas.a_ref_bar == "auto"
            else _broadcast(feas.a_ref_bar, n, "feasibility.a_ref_bar")
        )
        stage2_fields = (feas.m_lower, feas.vm_lower, feas.vm_upper, feas.m_i)
        has_stage2 = all(f is not None for f in stage2_fields)
        if any(f is not None for f in stage2_fields) and not has_stage2:
            raise ConfigError(
                "feasibility: m_lower, vm_lower, vm_upper and m_i must be given together"
            )
        if has_stage2 and not two_stage:
            raise ConfigError(
                "feasibility: stage-two bounds given for a single-stage scenario"
            )
        if feas.d_bar is not None and not has_stage2:
            raise ConfigError("feasibility: d_bar needs the stage-two bounds")
        try:
            bounds = FeasibilityBounds(
                m_lower=feas.m_lower if has_stage2 else 1.0,
                vm_lower=_broadcast(feas.vm_lower, n, "feasibility.vm_lower")
                if has_stage2 else np.zeros(n),
                vm_upper=_broadcast(feas.vm_upper, n, "feasibility.vm_upper")
                if has_stage2 else np.zeros(n),
                m_i=feas.m_i if has_stage2 else 1.0,
                v_ref_bar=v_ref_bar,
                a_ref_bar=a_ref_bar,
                d_bar=None if feas.d_bar is None
                else _broadcast(feas.d_bar, n, "feasibility.d_bar"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        stage1 = check_stage1(params.funnel_x, params.v_max, bounds)
        if not stage1.ok:
            warnings.append(
                f"stage-one feasibility fails in dimensions "
                f"{np.nonzero(~stage1.passed)[0].tolist()} (margins {stage1.margins.tolist()})"
            )
        if has_stage2 and bounds.d_bar is not None:
            stage2 = check_stage2(params.funnel_v, params.tau_max, bounds)
            if not stage2.ok:
                warnings.append(
                    f"stage-two feasibility fails in dimensions "
                    f"{np.nonzero(~stage2.passed)[0].tolist()} (margins {stage2.margins.tolist()})"
                )
        if bounds is not None and bounds.d_bar is not None:
            actual = disturbance.bound()
            if np.any(actual > bounds.d_bar):
                warnings.append(
                    f"disturbance can exceed the assumed bound d_bar: worst case "
                    f"{actual.tolist()} vs {bounds.d_bar.tolist()}"
                )
        if not has_stage2:
            bounds = None
        feas_canon = FeasibilityModel(
            m_lower=feas.m_lower,
            vm_lower=bounds.vm_lower.tolist() if bounds is not None else None,
            vm_upper=bounds.vm_upper.tolist() if bounds is not None else None,
            m_i=feas.m_i,
            d_bar=None if bounds is None or bounds.d_bar is None else bounds.d_bar.tolist(),
            v_ref_bar=v_ref_bar.tolist(),
            a_ref_bar=a_ref_bar.tolist(),
        )

    canonical = cfg.model_copy(
        update={
            "controller": _canonical_controller(ctl, params, n),
            "reference": _canonical_reference(cfg.reference, n),
            "disturbance": _canonical_disturbance(cfg.disturbance, n),
            "feasibility": feas_canon,
        }
    )

    return BuiltScenario(
        config=cfg,
        canonical_config=canonical,
        sim_config=sim_config,
        bounds=bounds,
        stage1=stage1,
        stage2=stage2,
        warnings=warnings,
    )


def _canonical_funnel(model: FunnelModel, n: int) -> FunnelModel:
    return FunnelModel(
        p=_broadcast(model.p, n, "p").tolist(),
        q=_broadcast(model.q, n, "q").tolist(),
        mu=_broadcast(model.mu, n, "mu").tolist(),
    )


def _canonical_transform(tr: Transform | None) -> TransformModel | None:
    if tr is None:
        return None
    return TransformModel(kind=tr.kind, a=tr.a, c=tr.c, renormalize=tr.renormalize)


def _canonical_controller(ctl: ControllerModel, params: ControllerParams, n: int) -> ControllerModel:
    return ControllerModel(
        funnel_x=_canonical_funnel(ctl.funnel_x, n),
        transform_x=_canonical_transform(params.transform_x),
        v_max=params.v_max.tolist(),
        funnel_v=_canonical_funnel(ctl.funnel_v, n) if params.two_stage else None,
        transform_v=_canonical_transform(params.transform_v),
        tau_max=params.tau_max.tolist() if params.two_stage else None,
    )


def _canonical_reference(model, n: int):
    if isinstance(model, ConstantReferenceModel):
        return ConstantReferenceModel(
            kind="constant", setpoint=_broadcast(model.setpoint, n, "setpoint").tolist()
        )
    if isinstance(model, SinusoidReferenceModel):
        return SinusoidReferenceModel(
            kind="sinusoid",
            center=_broadcast(model.center, n, "center").tolist(),
            amplitude=_broadcast(model.amplitude, n, "amplitude").tolist(),
            angular_frequency=_broadcast(model.angular_frequency, n, "angular_frequency").tolist(),
            phase=_broadcast(model.phase, n, "phase").tolist(),
        )
    return model


def _canonical_disturbance(model, n: int):
    if isinstance(model, ConstantDisturbanceModel):
        return ConstantDisturbanceModel(
            kind="constant", value=_broadcast(model.value, n, "value").tolist()
        )
    if isinstance(model, SinusoidDisturbanceModel):
        return SinusoidDisturbanceModel(
            kind="sinusoid",
            amplitude=_broadcast(model.amplitude, n, "amplitude").tolist(),
            angular_frequency=_broadcast(model.angular_frequency, n, "angular_frequency").tolist(),
            phase=_broadcast(model.phase, n, "phase").tolist(),
        )
    if isinstance(model, JerkPulseModel):
        return JerkPulseModel(
            kind="jerk_pulse",
            t_start=model.t_start,
            duration=model.duration,
            magnitude=_broadcast(model.magnitude, n, "magnitude").tolist(),
        )
    if isinstance(model, SumDisturbanceModel):
        return SumDisturbanceModel(
            kind="sum", terms=[_canonical_disturbance(t, n) for t in model.terms]
        )
    return model


def parse_scenario(text: str) -> ScenarioConfig:
    """Document text -> validated ScenarioConfig.

    Raises ConfigSyntaxError (with line info) for malformed JSON and
    ConfigError for schema violations.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(text: str) -> BuiltScenario:
    """Document text -> fully validated, ready-to-run scenario."""
    return build_scenario(parse_scenario(text))
