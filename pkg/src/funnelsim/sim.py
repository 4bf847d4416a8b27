"""Fixed-step closed-loop simulation with trace recording and event detection.

The command is evaluated once per step from the sampled state (zero-order
hold) and held constant through the RK4 substages; disturbance and
reference are continuous functions of time.  Containment, events, and
metrics are all assessed at the logged sample instants.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .controller import ControllerParams, stage1_velocity, step as control_step
from .errors import ConfigError, SimulationAbort
from .plants import SECOND_ORDER


@dataclass
class SimConfig:
    """One closed-loop run: plant + disturbance + reference + controller
    plus integration settings.

    dt : integration and control period in s, > 0
    horizon : total simulated time in s, >= dt
    log_stride : steps between logged rows, >= 1
    x0, v0 : initial state; default to the reference at t=0 and zero rates
    halt_threshold : command sup-norm below which the loop counts as quiet;
        defaults to 1e-3 times the largest command bound
    halt_dwell : seconds the loop must stay quiet (and outside its envelope)
        before a halt event is declared
    """

    plant: object
    disturbance: object
    reference: object
    controller: ControllerParams
    dt: float = 1e-3
    horizon: float = 60.0
    log_stride: int = 1
    x0: np.ndarray | None = None
    v0: np.ndarray | None = None
    halt_threshold: float | None = None
    halt_dwell: float = 1.0


@dataclass(frozen=True)
class Event:
    kind: str           # "exit" | "reentry" | "halt"
    stage: str | None   # "x" | "v" | None for halt
    dim: int | None     # first violating dimension for exits
    t: float


@dataclass(frozen=True)
class AbortInfo:
    t: float
    reason: str


@dataclass
class Trace:
    """Time-indexed record of one run.  Velocity-stage columns are None in
    single-stage mode."""

    t: np.ndarray
    x: np.ndarray
    x_ref: np.ndarray
    e_x: np.ndarray
    rho_x: np.ndarray
    cmd: np.ndarray
    d: np.ndarray
    inside_x: np.ndarray
    v: np.ndarray | None = None
    v_r: np.ndarray | None = None
    e_v: np.ndarray | None = None
    rho_v: np.ndarray | None = None
    inside_v: np.ndarray | None = None
    cmd_label: str = "tau"
    cmd_max: np.ndarray = field(default_factory=lambda: np.zeros(0))
    halt_threshold: float = 0.0
    halt_dwell: float = 1.0
    events: list[Event] = field(default_factory=list)
    abort: AbortInfo | None = None

    @property
    def two_stage(self) -> bool:
        return self.v is not None

    @property
    def rows(self) -> int:
        return self.t.size


@dataclass
class Metrics:
    """Scalar summary of one trace."""

    containment_fraction_x: float
    containment_fraction_v: float | None
    max_abs_eps_x: float
    max_abs_eps_v: float | None
    exit_intervals: list[tuple[float, float]]
    recovery_time: float | None
    halt_time: float | None
    saturation_fraction: float
    control_effort: float


def rk4_step(f, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta update of y at time t by dt."""
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    half = 0.5 * dt
    k1 = f(t, y)
    k2 = f(t + half, y + half * k1)
    k3 = f(t + half, y + half * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _resolve_initial(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray | None]:
    n = cfg.plant.n
    params = cfg.controller
    if params.dim != n:
        raise ConfigError(f"controller dimension {params.dim} != plant dimension {n}")
    if cfg.reference.dim != n:
        raise ConfigError(f"reference dimension {cfg.reference.dim} != plant dimension {n}")
    if cfg.disturbance.dim != n:
        raise ConfigError(f"disturbance dimension {cfg.disturbance.dim} != plant dimension {n}")
    two_stage_plant = cfg.plant.order == SECOND_ORDER
    if two_stage_plant != params.two_stage:
        raise ConfigError(
            "second-order plants need a two-stage controller and first-order "
            "plants a single-stage one"
        )

    x_ref0, _ = cfg.reference.eval(0.0)
    x0 = x_ref0.copy() if cfg.x0 is None else np.asarray(cfg.x0, dtype=float).copy()
    if x0.shape != (n,):
        raise ConfigError(f"x0 must have shape ({n},), got {x0.shape}")
    _, inside0 = params.funnel_x.contains(x0 - x_ref0, 0.0)
    if not inside0:
        raise ConfigError(
            "initial position error is not strictly inside the position funnel"
        )
    if not params.two_stage:
        return x0, None

    v0 = np.zeros(n) if cfg.v0 is None else np.asarray(cfg.v0, dtype=float).copy()
    if v0.shape != (n,):
        raise ConfigError(f"v0 must have shape ({n},), got {v0.shape}")
    v_r0, _ = stage1_velocity(params, 0.0, x0, x_ref0)
    _, inside_v0 = params.funnel_v.contains(v0 - v_r0, 0.0)
    if not inside_v0:
        raise ConfigError(
            "initial velocity error is not strictly inside the velocity funnel"
        )
    return x0, v0


def run(cfg: SimConfig) -> tuple[Trace, Metrics]:
    """Integrate the closed loop over [0, horizon] and summarize it.

    A non-finite state aborts the run; the trace rows logged up to the
    failure are kept and `trace.abort` records when and why.
    """
    if not cfg.dt > 0.0:
        raise ConfigError("dt must be > 0")
    if cfg.horizon < cfg.dt:
        raise ConfigError("horizon must be at least one step")
    stride = int(cfg.log_stride)
    if stride < 1:
        raise ConfigError("log_stride must be >= 1")

    params = cfg.controller
    plant = cfg.plant
    disturbance = cfg.disturbance
    reference = cfg.reference
    n = plant.n
    two_stage = params.two_stage
    dt = float(cfg.dt)
    steps = int(round(cfg.horizon / dt))

    x0, v0 = _resolve_initial(cfg)
    y = np.concatenate((x0, v0)) if two_stage else x0.copy()

    cmd_max = params.tau_max if two_stage else params.v_max
    halt_threshold = (
        cfg.halt_threshold
        if cfg.halt_threshold is not None
        else 1e-3 * float(np.max(cmd_max))
    )

    n_rows = steps // stride + 1
    t_log = np.empty(n_rows)
    x_log = np.empty((n_rows, n))
    xref_log = np.empty((n_rows, n))
    ex_log = np.empty((n_rows, n))
    rhox_log = np.empty((n_rows, n))
    cmd_log = np.empty((n_rows, n))
    d_log = np.empty((n_rows, n))
    insx_log = np.empty((n_rows, n), dtype=bool)
    if two_stage:
        v_log = np.empty((n_rows, n))
        vr_log = np.empty((n_rows, n))
        ev_log = np.empty((n_rows, n))
        rhov_log = np.empty((n_rows, n))
        insv_log = np.empty((n_rows, n), dtype=bool)

    funnel_x = params.funnel_x
    funnel_v = params.funnel_v
    rows = 0
    abort: AbortInfo | None = None

    for k in range(steps + 1):
        t = k * dt
        x = y[:n]
        v = y[n:] if two_stage else None
        x_ref, _ = reference.eval(t)
        cmd, diag = control_step(params, t, x, v, x_ref)

        if k % stride == 0:
            i = rows
            t_log[i] = t
            x_log[i] = x
            xref_log[i] = x_ref
            ex_log[i] = diag.e_x
            rhox_log[i] = funnel_x.eval(t)
            cmd_log[i] = cmd
            d_log[i] = disturbance.eval(t)
            insx_log[i] = diag.inside_x
            if two_stage:
                v_log[i] = v
                vr_log[i] = diag.v_r
                ev_log[i] = diag.e_v
                rhov_log[i] = funnel_v.eval(t)
                insv_log[i] = diag.inside_v
            rows += 1

        if k == steps:
            break

        def deriv(tt: float, yy: np.ndarray) -> np.ndarray:
            return plant.derivative(yy, cmd, disturbance.eval(tt))

        try:
            y = rk4_step(deriv, y, t, dt)
        except SimulationAbort as exc:
            abort = AbortInfo(t=t + dt, reason=str(exc))
            break
        if not np.isfinite(y).all():
            abort = AbortInfo(t=t + dt, reason="state became non-finite")
            break

    sl = slice(0, rows)
    trace = Trace(
        t=t_log[sl], x=x_log[sl], x_ref=xref_log[sl], e_x=ex_log[sl],
        rho_x=rhox_log[sl], cmd=cmd_log[sl], d=d_log[sl], inside_x=insx_log[sl],
        v=v_log[sl] if two_stage else None,
        v_r=vr_log[sl] if two_stage else None,
        e_v=ev_log[sl] if two_stage else None,
        rho_v=rhov_log[sl] if two_stage else None,
        inside_v=insv_log[sl] if two_stage else None,
        cmd_label="tau" if two_stage else "u",
        cmd_max=np.asarray(cmd_max, dtype=float),
        halt_threshold=halt_threshold,
        halt_dwell=cfg.halt_dwell,
        abort=abort,
    )
    trace.events = detect_events(trace)
    return trace, compute_metrics(trace)


def _stage_events(t: np.ndarray, inside: np.ndarray, stage: str) -> list[Event]:
    events: list[Event] = []
    was_inside = True
    for i in range(t.size):
        row_inside = bool(inside[i].all())
        if was_inside and not row_inside:
            dim = int(np.argmin(inside[i]))
            events.append(Event("exit", stage, dim, float(t[i])))
        elif not was_inside and row_inside:
            events.append(Event("reentry", stage, None, float(t[i])))
        was_inside = row_inside
    return events


def detect_events(
    trace: Trace,
    halt_threshold: float | None = None,
    halt_dwell: float | None = None,
) -> list[Event]:
    """Envelope exits and reentries per stage, plus at most one halt event.

    A halt is declared at the start of the first window in which the error
    is outside its envelope and the command sup-norm stays below the
    threshold for at least the dwell time.
    """
    if trace.rows == 0:
        return []
    threshold = trace.halt_threshold if halt_threshold is None else halt_threshold
    dwell = trace.halt_dwell if halt_dwell is None else halt_dwell

    events = _stage_events(trace.t, trace.inside_x, "x")
    outside_any = ~trace.inside_x.all(axis=1)
    if trace.two_stage:
        events += _stage_events(trace.t, trace.inside_v, "v")
        outside_any |= ~trace.inside_v.all(axis=1)

    quiet = (np.abs(trace.cmd).max(axis=1) < threshold) & outside_any
    start: int | None = None
    halt: Event | None = None
    for i in range(trace.rows + 1):
        active = i < trace.rows and quiet[i]
        if active and start is None:
            start = i
        elif not active and start is not None:
            if trace.t[i - 1] - trace.t[start] >= dwell:
                halt = Event("halt", None, None, float(trace.t[start]))
                break
            start = None
    if halt is not None:
        events.append(halt)
    return sorted(events, key=lambda e: e.t)


def compute_metrics(trace: Trace) -> Metrics:
    """Containment fractions, worst normalized errors, exit bookkeeping,
    saturation fraction, and integrated control effort for one trace."""
    if trace.rows == 0:
        raise ValueError("cannot compute metrics of an empty trace")

    rows = trace.rows
    inside_x_all = trace.inside_x.all(axis=1)
    frac_x = float(np.count_nonzero(inside_x_all)) / rows
    eps_x = trace.e_x / trace.rho_x
    max_eps_x = float(np.abs(eps_x).max())

    if trace.two_stage:
        inside_v_all = trace.inside_v.all(axis=1)
        frac_v = float(np.count_nonzero(inside_v_all)) / rows
        max_eps_v = float(np.abs(trace.e_v / trace.rho_v).max())
    else:
        frac_v = None
        max_eps_v = None

    # exit intervals track the position stage; an open interval ends at the
    # last logged time
    intervals: list[tuple[float, float]] = []
    exit_t: float | None = None
    for i in range(rows):
        if exit_t is None and not inside_x_all[i]:
            exit_t = float(trace.t[i])
        elif exit_t is not None and inside_x_all[i]:
            intervals.append((exit_t, float(trace.t[i])))
            exit_t = None
    recovery = intervals[0][1] - intervals[0][0] if intervals else None
    if exit_t is not None:  # still outside at the end of the trace
        intervals.append((exit_t, float(trace.t[-1])))

    cmd_inf = np.abs(trace.cmd).max(axis=1)
    above = np.nonzero(cmd_inf >= trace.halt_threshold)[0]
    if above.size == 0:
        halt_time = float(trace.t[0])
    elif above[-1] == rows - 1:
        halt_time = None
    else:
        halt_time = float(trace.t[above[-1] + 1])

    saturated = (np.abs(trace.cmd) > 0.99 * trace.cmd_max).any(axis=1)
    sat_fraction = float(np.count_nonzero(saturated)) / rows

    norms = np.sqrt((trace.cmd ** 2).sum(axis=1))
    effort = float(np.sum(0.5 * (norms[1:] + norms[:-1]) * np.diff(trace.t)))

    return Metrics(
        containment_fraction_x=frac_x,
        containment_fraction_v=frac_v,
        max_abs_eps_x=max_eps_x,
        max_abs_eps_v=max_eps_v,
        exit_intervals=intervals,
        recovery_time=recovery,
        halt_time=halt_time,
        saturation_fraction=sat_fraction,
        control_effort=effort,
    )


def trace_columns(trace: Trace) -> tuple[list[str], np.ndarray]:
    """Column names (dimension-suffixed) and the dense numeric table."""
    n = trace.x.shape[1]
    dims = range(1, n + 1)

    def block(name: str) -> list[str]:
        return [f"{name}_{i}" for i in dims]

    names = ["t"] + block("x") + block("x_ref") + block("e_x") + block("rho_x")
    parts = [trace.t[:, None], trace.x, trace.x_ref, trace.e_x, trace.rho_x]
    if trace.two_stage:
        names += block("v") + block("v_r") + block("e_v") + block("rho_v")
        parts += [trace.v, trace.v_r, trace.e_v, trace.rho_v]
    names += block(trace.cmd_label) + block("d") + block("inside_x")
    parts += [trace.cmd, trace.d, trace.inside_x.astype(float)]
    if trace.two_stage:
        names += block("inside_v")
        parts.append(trace.inside_v.astype(float))
    return names, np.hstack(parts)


def trace_to_csv(trace: Trace) -> str:
    """Render the trace as CSV with exact (round-trippable) float text."""
    names, table = trace_columns(trace)
    out = io.StringIO()
    out.write(",".join(names))
    out.write("\n")
    for row in table.tolist():
        out.write(",".join(repr(value) for value in row))
        out.write("\n")
    return out.getvalue()


def write_trace_csv(trace: Trace, path) -> None:
    with open(path, "w") as fh:
        fh.write(trace_to_csv(trace))
