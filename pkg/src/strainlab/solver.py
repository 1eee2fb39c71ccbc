"""Time integration of the strain models and the mild-solution machinery.

The stepper is a classical fourth-order Runge-Kutta scheme applied to the
heat-transformed variable (integrating factor), so the viscous part is
advanced exactly per mode and only the projected quadratic terms are
integrated numerically.  A Duhamel fixed-point iteration on the same
truncated dynamics provides an independent route to short-time solutions,
and a monitor summarises what a finished run does and does not support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from . import seeds
from .diagnostics import (
    DEFAULT_ALPHAS,
    DEFAULT_QS,
    LEVELS,
    BlowupReport,
    DiagnosticsRecord,
    blowup_report,
    compute_record,
    existence_coefficient,
)
from .nonlinearity import mu_rhs
from .operators import strain_project
from .spectral import (
    Grid3,
    TensorField,
    band_limit,
    physical_from_coeffs,
    pointwise_magnitude,
    sobolev_norm_sq,
)

#: Steps smaller than this abort the run as effectively stalled.
DT_FLOOR = 1e-13


class NumericalFailure(RuntimeError):
    """Raised when a state stops being finite.

    Carries the last good state and, when raised from a run, the
    diagnostics sampled up to that point.
    """

    def __init__(
        self,
        message: str,
        state: "SimState",
        records: "list[DiagnosticsRecord] | None" = None,
    ):
        super().__init__(message)
        self.state = state
        self.records = records


@dataclass(frozen=True)
class InitialSpec:
    """Recipe for the initial strain state.

    kind is one of taylor_green, random_band, amplified_band, snapshot.
    amplitude scales taylor_green directly and fixes ||S0||_L2 for
    random_band; band is the mode cube of the random kinds; margin is the
    safety factor of the amplified seed; path points at a snapshot file.
    """

    kind: str = "taylor_green"
    amplitude: float = 1.0
    seed: int = 0
    band: int = 2
    margin: float = 1.5
    path: str | None = None

    _KINDS = ("taylor_green", "random_band", "amplified_band", "snapshot")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown initial kind {self.kind!r}")
        if self.kind == "snapshot" and not self.path:
            raise ValueError("snapshot initial data needs a path")
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if self.band < 1:
            raise ValueError(f"band must be at least 1, got {self.band}")
        if self.kind == "amplified_band" and self.margin <= 1:
            raise ValueError(f"margin must exceed 1, got {self.margin}")


@dataclass(frozen=True)
class SimConfig:
    """Validated description of one run.

    Exactly one of dt (fixed step) and cfl_factor (adaptive step
    cfl / max(1, ||grad u||_inf)) is active; when neither is given the
    adaptive rule with factor 0.5 applies.  Viscosity is fixed at one; the
    models rescale instead.
    """

    mu: float
    advection: bool = False
    grid_n: int = 32
    dealias_cutoff: int = 0
    dt: float | None = None
    cfl_factor: float | None = None
    t_end: float = 1.0
    sample_every: int = 10
    initial: InitialSpec = field(default_factory=InitialSpec)
    blowup_threshold: float = 1e6
    viscosity: float = 1.0
    diagnostics_level: str = "standard"
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    qs: tuple[float, ...] = DEFAULT_QS

    def __post_init__(self) -> None:
        if self.viscosity != 1.0:
            raise ValueError("viscosity is fixed at 1; rescale the state instead")
        if self.dt is not None and self.cfl_factor is not None:
            raise ValueError("give either dt or cfl_factor, not both")
        if self.dt is None and self.cfl_factor is None:
            object.__setattr__(self, "cfl_factor", 0.5)
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.cfl_factor is not None and self.cfl_factor <= 0:
            raise ValueError(f"cfl_factor must be positive, got {self.cfl_factor}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.sample_every < 1:
            raise ValueError(f"sample_every must be at least 1, got {self.sample_every}")
        if self.blowup_threshold <= 1:
            raise ValueError(
                f"blowup_threshold is a growth multiple and must exceed 1, got {self.blowup_threshold}"
            )
        if self.diagnostics_level not in LEVELS:
            raise ValueError(f"unknown diagnostics level {self.diagnostics_level!r}")
        # Grid3 validates n and the cutoff; fail here so errors carry context.
        self.grid()

    def grid(self) -> Grid3:
        return Grid3(self.grid_n, self.dealias_cutoff)


@dataclass(frozen=True)
class SimState:
    t: float
    strain: TensorField
    step_count: int = 0


@dataclass(frozen=True)
class StepResult:
    state: SimState
    dt_used: float
    blowup_flag: str = "none"  # none | threshold_hit | dt_underflow


def build_initial(cfg: SimConfig) -> TensorField:
    """Construct, band-limit and re-project the configured initial state."""
    grid = cfg.grid()
    spec = cfg.initial
    if spec.kind == "taylor_green":
        s = seeds.taylor_green_strain(grid, spec.amplitude)
    elif spec.kind == "random_band":
        s = seeds.random_band_strain(grid, spec.seed, spec.band, spec.amplitude)
    elif spec.kind == "amplified_band":
        s = seeds.amplified_blowup_seed(grid, spec.seed, spec.band, spec.margin)
    else:
        from .persistence import read_field_snapshot

        loaded, _ = read_field_snapshot(spec.path, grid=grid)
        if loaded.ncomp == 3:
            s = ops.sym_grad(ops.leray_project(loaded))
        else:
            s = loaded
    return strain_project(band_limit(s))


def grad_sup_norm(s: TensorField) -> float:
    """||grad u||_L_inf of the velocity behind S.

    Pointwise |grad u|_F^2 = |S|_F^2 + |w|^2 / 2, the orthogonal split into
    symmetric and antisymmetric parts.
    """
    u = ops._velocity_coeffs(s.grid, s.coeffs)
    g = s.grid
    w = 1j * np.stack(
        [
            g.k2 * u[2] - g.k3 * u[1],
            g.k3 * u[0] - g.k1 * u[2],
            g.k1 * u[1] - g.k2 * u[0],
        ]
    )
    sp = physical_from_coeffs(g, s.coeffs)
    wp = physical_from_coeffs(g, w)
    mag_sq = pointwise_magnitude(sp, 6) ** 2 + 0.5 * np.sum(wp**2, axis=0)
    return float(np.sqrt(np.max(mag_sq)))


def choose_dt(state: SimState, cfg: SimConfig) -> float:
    if cfg.dt is not None:
        return cfg.dt
    return cfg.cfl_factor / max(1.0, grad_sup_norm(state.strain))


def step(state: SimState, cfg: SimConfig, dt: float | None = None) -> StepResult:
    """Advance one step with the integrating-factor RK4 scheme.

    The heat factor is exact per mode, the four stage evaluations see only
    the projected quadratic terms, and the result is re-projected onto the
    constraint space.  A vanishing step (adaptive rule underflow) returns
    the state unchanged with the dt_underflow flag.
    """
    if dt is None:
        dt = choose_dt(state, cfg)
    if dt < DT_FLOOR:
        return StepResult(state, dt, "dt_underflow")
    grid = state.strain.grid
    e_half = np.exp(-0.5 * dt * grid.ksq)
    e_full = e_half * e_half

    def g(coeffs: np.ndarray) -> np.ndarray:
        f = mu_rhs(
            TensorField(grid, coeffs), cfg.mu, cfg.advection, include_laplacian=False
        )
        return f.coeffs

    s0 = state.strain.coeffs
    # Overflow in a diverging stage is the detected failure mode below, not
    # a warning-worthy event.
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = g(s0)
        k2 = g(e_half * (s0 + (0.5 * dt) * k1))
        k3 = g(e_half * s0 + (0.5 * dt) * k2)
        k4 = g(e_full * s0 + dt * (e_half * k3))
        out = e_full * s0 + (dt / 6.0) * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)
        new = strain_project(TensorField(grid, out))
    if not np.all(np.isfinite(new.coeffs)):
        raise NumericalFailure(
            f"state stopped being finite at t={state.t + dt:.6g}", state
        )
    return StepResult(SimState(state.t + dt, new, state.step_count + 1), dt)


@dataclass(frozen=True)
class RunResult:
    initial_state: SimState
    final_state: SimState
    records: list[DiagnosticsRecord]
    stop_reason: str  # t_end | threshold_hit | dt_underflow
    initial_enstrophy: float


def run(cfg: SimConfig, initial: TensorField | None = None) -> RunResult:
    """Integrate to t_end, sampling diagnostics every sample_every steps.

    Stops early when the enstrophy exceeds blowup_threshold times its
    initial value or the adaptive step underflows.  t_end = 0 returns the
    initial diagnostics only.  Deterministic for a fixed configuration.
    """
    s0 = build_initial(cfg) if initial is None else strain_project(band_limit(initial))
    state = SimState(0.0, s0)
    e0 = sobolev_norm_sq(s0)

    def sample(st: SimState) -> DiagnosticsRecord:
        return compute_record(
            st.strain,
            st.t,
            cfg.mu,
            cfg.advection,
            level=cfg.diagnostics_level,
            alphas=cfg.alphas,
            qs=cfg.qs,
        )

    records = [sample(state)]
    initial_state = state
    stop_reason = "t_end"
    while state.t < cfg.t_end - 1e-12 * max(1.0, cfg.t_end):
        dt = min(choose_dt(state, cfg), cfg.t_end - state.t)
        try:
            result = step(state, cfg, dt)
        except NumericalFailure as exc:
            raise NumericalFailure(str(exc), exc.state, records) from None
        if result.blowup_flag == "dt_underflow":
            stop_reason = "dt_underflow"
            break
        state = result.state
        sampled = state.step_count % cfg.sample_every == 0
        if sampled:
            records.append(sample(state))
        if e0 > 0 and sobolev_norm_sq(state.strain) > cfg.blowup_threshold * e0:
            if not sampled:
                records.append(sample(state))
            stop_reason = "threshold_hit"
            break
    if records[-1].t < state.t:
        records.append(sample(state))
    return RunResult(initial_state, state, records, stop_reason, e0)


# ---------------------------------------------------------------------------
# existence bounds and the Duhamel fixed point


@dataclass(frozen=True)
class ExistenceBounds:
    """Guaranteed existence times evaluated from the initial norm."""

    t_general: float
    t_enstrophy: float


def existence_time_bounds(s0: TensorField, mu: float) -> ExistenceBounds:
    """T >= C(mu)/||S0||^4 (any mu) and T >= 1728 pi^4/||S0||^4 (full equation)."""
    norm4 = sobolev_norm_sq(s0) ** 2
    if norm4 == 0.0:
        return ExistenceBounds(math.inf, math.inf)
    return ExistenceBounds(
        existence_coefficient(mu) / norm4, 1728.0 * math.pi**4 / norm4
    )


@dataclass(frozen=True)
class PicardResult:
    """Duhamel fixed-point iteration transcript.

    distances[m] is the sup over mesh times of the L2 gap between iterates
    m and m+1; ratios are their successive quotients (an empirical
    contraction factor).  final is the last iterate at the end time.
    """

    distances: list[float]
    ratios: list[float]
    times: np.ndarray
    final: TensorField

    @property
    def contracting(self) -> bool:
        return bool(self.ratios) and all(r < 1.0 for r in self.ratios)


def picard_fixed_point(
    s0: TensorField, cfg: SimConfig, t_final: float, n_points: int = 33, n_iter: int = 8
) -> PicardResult:
    """Iterate the Duhamel map of the truncated dynamics on a uniform mesh.

    S_{m+1}(t) = e^{t Lap} S0 + int_0^t e^{(t-tau) Lap} G(S_m(tau)) dtau,
    with G the projected quadratic terms and the integral by the trapezoid
    rule.  Starts from the heat flow of S0; the fixed point solves the same
    band-limited dynamics as the stepper, up to mesh quadrature error.
    """
    if t_final <= 0:
        raise ValueError(f"t_final must be positive, got {t_final}")
    if n_points < 2:
        raise ValueError("the mesh needs at least two points")
    grid = s0.grid
    s0 = strain_project(band_limit(s0))
    h = t_final / (n_points - 1)
    times = h * np.arange(n_points)
    decay = np.exp(-h * grid.ksq)

    heat_of_s0 = np.empty((n_points,) + s0.coeffs.shape, dtype=np.complex128)
    heat_of_s0[0] = s0.coeffs
    for i in range(1, n_points):
        heat_of_s0[i] = decay * heat_of_s0[i - 1]

    def g_of(coeffs: np.ndarray) -> np.ndarray:
        return mu_rhs(
            TensorField(grid, coeffs), cfg.mu, cfg.advection, include_laplacian=False
        ).coeffs

    current = heat_of_s0.copy()
    distances: list[float] = []
    for _ in range(n_iter):
        gs = np.stack([g_of(current[i]) for i in range(n_points)])
        nxt = np.empty_like(current)
        nxt[0] = s0.coeffs
        integral = np.zeros_like(s0.coeffs)
        for i in range(1, n_points):
            integral = decay * integral + (0.5 * h) * (decay * gs[i - 1] + gs[i])
            nxt[i] = heat_of_s0[i] + integral
        gap = 0.0
        for i in range(n_points):
            diff = TensorField(grid, nxt[i] - current[i])
            gap = max(gap, math.sqrt(sobolev_norm_sq(diff)))
        distances.append(gap)
        current = nxt
    ratios = [
        distances[i + 1] / distances[i]
        for i in range(len(distances) - 1)
        if distances[i] > 0
    ]
    return PicardResult(distances, ratios, times, TensorField(grid, current[-1]))


# ---------------------------------------------------------------------------
# run monitor


@dataclass(frozen=True)
class MonitorVerdict:
    report: BlowupReport
    stop_reason: str
    claim: str


def blowup_monitor(result: RunResult, cfg: SimConfig) -> MonitorVerdict:
    """Judge a finished run against the growth hypotheses.

    Combines the seed arithmetic of the initial state with the sampled
    envelope, ratio and resolution checks.  Never claims a singularity:
    the strongest statement is consistency up to resolution loss.
    """
    report = blowup_report(result.initial_state.strain, result.records)
    claim = report.claim
    if result.stop_reason == "threshold_hit":
        claim += f" (stopped at {cfg.blowup_threshold:g} times the initial enstrophy)"
    elif result.stop_reason == "dt_underflow":
        claim += " (adaptive step underflowed)"
    return MonitorVerdict(report, result.stop_reason, claim)
