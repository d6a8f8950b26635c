"""Semi-discrete right-hand side, CFL control, and SSP-RK2 evolution.

The spatial operator is exactly the finite-volume flux difference; all
stability statements (entropy dissipation, weak variation sums) are made and
recorded at this semi-discrete level, where they hold to machine precision.
Time integration uses Heun's two-stage strong-stability-preserving scheme,
a convex combination of forward Euler steps, with the step size limited by
the convective speeds and the diffusion ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import diagnostics as diag
from .diagnostics import EntropyLedger, LedgerRow, ResidualTracker
from .entropy import EntropyPair, FluxSpec, square_entropy_pair
from .flux import DiffusionBounds, NumericalFluxField, assemble_tecno_flux
from .grid import Grid2D, GridFunction, project_initial_data, require_finite
from .problems import ProblemSpec
from .reconstruct import ReconJump, reconstruction_jumps

_KNOWN_DIAGNOSTICS = frozenset({"entropy_identity"})


@dataclass(frozen=True)
class SolverConfig:
    t_end: float
    cfl: float = 0.4
    bounds: DiffusionBounds = field(default_factory=DiffusionBounds)
    linf_bound: float = 1.0
    snapshot_interval: float = 0.0
    diagnostics: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.t_end < 0.0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.linf_bound <= 0.0:
            raise ValueError(f"linf_bound must be positive, got {self.linf_bound}")
        unknown = set(self.diagnostics) - _KNOWN_DIAGNOSTICS
        if unknown:
            raise ValueError(f"unknown diagnostics flags: {sorted(unknown)}")


@dataclass
class SolverState:
    u: GridFunction
    t: float
    step_count: int
    ledger: EntropyLedger


@dataclass(frozen=True)
class RhsBundle:
    rate: NDArray[np.float64]
    jumps: ReconJump
    fluxes: NumericalFluxField


class IdentityStats:
    """Running extrema of the semi-discrete entropy balance checks."""

    def __init__(self) -> None:
        self.max_abs_gap = 0.0
        self.max_rhs = -math.inf
        self.evaluations = 0

    def update(self, check: diag.IdentityCheck) -> None:
        self.max_abs_gap = max(self.max_abs_gap, abs(check.gap))
        self.max_rhs = max(self.max_rhs, check.rhs)
        self.evaluations += 1


@dataclass(frozen=True)
class BoundBreach:
    step: int
    time: float
    sup_abs: float


@dataclass(frozen=True)
class Snapshot:
    step: int
    time: float
    values: NDArray[np.float64]


@dataclass
class RunResult:
    problem: str
    grid: Grid2D
    final: GridFunction
    ledger: EntropyLedger
    snapshots: list[Snapshot]
    sup_abs: float
    bound_breaches: list[BoundBreach]
    identity: IdentityStats | None
    residuals: dict[str, diag.ResidualReport]


class EvolutionError(RuntimeError):
    """A time step failed; carries the results accumulated before the failure."""

    def __init__(self, message: str, partial: RunResult):
        super().__init__(message)
        self.partial = partial


def rhs_bundle(u: GridFunction, spec: FluxSpec, bounds: DiffusionBounds) -> RhsBundle:
    """Flux assembly plus divergence, keeping the interface fields around
    for the diagnostics layer."""
    grid = u.grid
    jumps = reconstruction_jumps(u)
    fluxes = assemble_tecno_flux(u, jumps, spec, bounds)
    rate = -(np.diff(fluxes.x, axis=0) / grid.dx) - (np.diff(fluxes.y, axis=1) / grid.dy)
    require_finite(rate, "semi-discrete rate")
    return RhsBundle(rate=rate, jumps=jumps, fluxes=fluxes)


def semidiscrete_rhs(
    u: GridFunction, spec: FluxSpec, bounds: DiffusionBounds
) -> NDArray[np.float64]:
    """Cell rates -(dF_x/dx + dF_y/dy) of the spatial operator."""
    return rhs_bundle(u, spec, bounds).rate


def stable_timestep(
    u: GridFunction, spec: FluxSpec, bounds: DiffusionBounds, cfl: float
) -> float:
    """CFL-limited step covering both convection and the diffusion ceiling:

        dt = cfl / (max|f_x'|/dx + max|f_y'|/dy + 2 d_high (1/dx + 1/dy))
    """
    grid = u.grid
    ax = float(np.max(np.abs(spec.df_x(u.values))))
    ay = float(np.max(np.abs(spec.df_y(u.values))))
    denom = ax / grid.dx + ay / grid.dy + 2.0 * bounds.d_high * (1.0 / grid.dx + 1.0 / grid.dy)
    dt = cfl / denom
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ValueError(f"unusable time step {dt}")
    return dt


def ssprk2_step(
    state: SolverState,
    dt: float,
    spec: FluxSpec,
    config: SolverConfig,
    square_pair: EntropyPair | None = None,
    trackers: tuple[ResidualTracker, ...] = (),
    identity: IdentityStats | None = None,
) -> SolverState:
    """One Heun step u -> (u + (u* + dt R(u*)))/2 with u* = u + dt R(u).

    The ledger receives the step's entropy-budget increments, integrated
    with the same two-stage weights the solution update uses, so every
    recorded dissipation increment is a sum of semi-discrete rates that are
    individually nonnegative.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = state.u
    grid = u.grid
    pair = square_pair if square_pair is not None else square_entropy_pair(spec)

    def stage(w: GridFunction) -> tuple[RhsBundle, diag.StageRates]:
        bundle = rhs_bundle(w, spec, config.bounds)
        rates = diag.stage_rates(w, bundle.jumps, bundle.fluxes)
        if rates.dissipation < -1e-14:
            raise ValueError(f"sign-property breach: stage dissipation {rates.dissipation}")
        if identity is not None:
            identity.update(
                diag.entropy_rate_identity(w, bundle.rate, bundle.jumps, bundle.fluxes, pair)
            )
        for tracker in trackers:
            tracker.add_stage(w, bundle.fluxes, 0.5 * dt)
        return bundle, rates

    bundle_a, rates_a = stage(u)
    u_star = GridFunction(grid, u.values + dt * bundle_a.rate, state.t + dt)
    bundle_b, rates_b = stage(u_star)
    u_new = GridFunction(
        grid, 0.5 * u.values + 0.5 * (u_star.values + dt * bundle_b.rate), state.t + dt
    )

    half_dt = 0.5 * dt
    state.ledger.append(
        LedgerRow(
            step=state.step_count + 1,
            time=state.t + dt,
            dt=dt,
            total_mass=diag.total_mass(u_new),
            total_entropy=diag.total_square_entropy(u_new),
            dissipation_increment=half_dt * (rates_a.dissipation + rates_b.dissipation),
            cube_x=half_dt * (rates_a.cube_x + rates_b.cube_x),
            cube_y=half_dt * (rates_a.cube_y + rates_b.cube_y),
            pair_x=half_dt * (rates_a.pair_x + rates_b.pair_x),
            pair_y=half_dt * (rates_a.pair_y + rates_b.pair_y),
        )
    )
    return SolverState(u=u_new, t=state.t + dt, step_count=state.step_count + 1, ledger=state.ledger)


def run(
    config: SolverConfig,
    problem: ProblemSpec,
    nx: int,
    ny: int,
    residual_pairs: dict[str, EntropyPair] | None = None,
) -> RunResult:
    """Project, evolve to t_end, and collect ledger/snapshots/diagnostics.

    residual_pairs optionally maps labels to C^2 entropy pairs whose
    production measure is accumulated alongside the run.
    """
    grid = Grid2D.from_domain(
        nx, ny, problem.x0, problem.x1, problem.y0, problem.y1, problem.boundary
    )
    spec = problem.flux
    u0 = project_initial_data(grid, problem.u0)
    ledger = EntropyLedger()
    ledger.append(
        LedgerRow(
            step=0,
            time=0.0,
            dt=0.0,
            total_mass=diag.total_mass(u0),
            total_entropy=diag.total_square_entropy(u0),
            dissipation_increment=0.0,
            cube_x=0.0, cube_y=0.0, pair_x=0.0, pair_y=0.0,
        )
    )
    trackers = tuple(
        ResidualTracker(label, pair, spec, config.linf_bound, config.bounds.d_high)
        for label, pair in (residual_pairs or {}).items()
    )
    identity = IdentityStats() if "entropy_identity" in config.diagnostics else None
    square_pair = square_entropy_pair(spec)

    state = SolverState(u=u0, t=0.0, step_count=0, ledger=ledger)
    snapshots = [Snapshot(0, 0.0, u0.values.copy())]
    sup_abs = float(np.max(np.abs(u0.values)))
    breaches: list[BoundBreach] = []
    bound_tol = config.linf_bound + 1e-12 * (1.0 + config.linf_bound)
    next_snapshot = config.snapshot_interval if config.snapshot_interval > 0.0 else math.inf

    def build_result() -> RunResult:
        if state.step_count > 0 and snapshots[-1].step != state.step_count:
            snapshots.append(Snapshot(state.step_count, state.t, state.u.values.copy()))
        return RunResult(
            problem=problem.name,
            grid=grid,
            final=state.u,
            ledger=ledger,
            snapshots=snapshots,
            sup_abs=sup_abs,
            bound_breaches=breaches,
            identity=identity,
            residuals={tr.label: tr.report(ledger) for tr in trackers},
        )

    t_scale = max(1.0, config.t_end)
    while config.t_end - state.t > 1e-14 * t_scale:
        try:
            dt = stable_timestep(state.u, spec, config.bounds, config.cfl)
            dt = min(dt, config.t_end - state.t)
            state = ssprk2_step(state, dt, spec, config, square_pair, trackers, identity)
        except Exception as exc:
            # flush what was computed before the failing step
            raise EvolutionError(
                f"step {state.step_count + 1} at t={state.t:.6g} failed: {exc}",
                partial=build_result(),
            ) from exc
        sup = float(np.max(np.abs(state.u.values)))
        sup_abs = max(sup_abs, sup)
        if sup > bound_tol:
            breaches.append(BoundBreach(state.step_count, state.t, sup))
        if state.t >= next_snapshot - 1e-12 * t_scale:
            snapshots.append(Snapshot(state.step_count, state.t, state.u.values.copy()))
            while next_snapshot <= state.t + 1e-12 * t_scale:
                next_snapshot += config.snapshot_interval

    return build_result()
