"""Time evolution of the anisotropic hyperdissipative system on the torus."""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .diagnostics import EnergyReport, balance_residual, energy_report
from .fields import embed_cube, random_cube
from .integrators import INTEGRATORS, LinearPropagator, apply_matrix, build_propagator
from .lattice import GridSpec, WavenumberLattice, build_lattice
from .nonlinear import nonlinear_term
from .spectral import (
    dealias,
    divergence_error,
    from_spectral,
    leray_project,
    norm_sq,
    symmetrize,
    to_spectral,
)
from .symbol import MultiplierIndices, dissipation_symbol

log = logging.getLogger(__name__)

INITIAL_KINDS = ("shear_x2", "shear_x3", "taylor_green", "random_divfree")

DIVERGENCE_TOLERANCE = 1e-12


class BlowUpError(RuntimeError):
    """Raised when the solution stops being finite or exceeds the gradient ceiling."""

    def __init__(self, t: float, step_count: int, reason: str, report: EnergyReport | None = None):
        super().__init__(f"blow-up indicator at t={t:.17g} (step {step_count}): {reason}")
        self.t = t
        self.step_count = step_count
        self.reason = reason
        self.report = report


@dataclass(frozen=True)
class InitialCondition:
    """Tagged initial-data choice.

    ``wavenumber`` applies to the shear flows, ``seed`` and ``spectrum_slope``
    to ``random_divfree``. ``amplitude`` scales the shear and Taylor-Green
    fields and is the rms speed ``sqrt(||u||^2 / V)`` of the random field.
    """

    kind: str
    amplitude: float = 1.0
    wavenumber: int = 1
    seed: int | None = None
    spectrum_slope: float = -3.0

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ValueError(f"unknown initial condition {self.kind!r}; choose from {INITIAL_KINDS}")
        if self.kind == "random_divfree" and self.seed is None:
            raise ValueError("random_divfree requires an explicit seed")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValueError(f"amplitude must be finite and >= 0, got {self.amplitude}")
        if self.wavenumber < 1:
            raise ValueError(f"wavenumber must be >= 1, got {self.wavenumber}")


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    indices: MultiplierIndices
    dt: float
    t_end: float
    integrator: str = "etdrk2"
    initial_condition: InitialCondition = field(
        default_factory=lambda: InitialCondition("taylor_green")
    )
    diagnostics_every: int = 1
    sobolev_order_s: float = 3.0
    blowup_ceiling: float = 1e12
    checkpoint_every: int = 0

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}")
        if self.diagnostics_every < 1:
            raise ValueError("diagnostics_every must be a positive integer")
        if self.sobolev_order_s < 0:
            raise ValueError("sobolev_order_s must be >= 0")
        if not self.blowup_ceiling > 0:
            raise ValueError("blowup_ceiling must be positive")
        if self.checkpoint_every < 0:
            raise ValueError("checkpoint_every must be >= 0")

    @property
    def n_steps(self) -> int:
        return n_steps_for(self.t_end, self.dt)


def n_steps_for(t_end: float, dt: float) -> int:
    """Number of steps of size ``dt`` reaching ``t_end`` (rounded to nearest)."""
    return max(int(round(t_end / dt)), 0)


@dataclass(frozen=True, eq=False)
class SolverState:
    """Time, spectral velocity and step counter.

    ``prev_nonlinear`` holds the previous nonlinear term for the multistep
    ``imex_cn`` scheme and is ``None`` otherwise.
    """

    t: float
    u: np.ndarray
    step_count: int = 0
    prev_nonlinear: np.ndarray | None = None


@functools.lru_cache(maxsize=16)
def lattice_for(grid: GridSpec) -> WavenumberLattice:
    return build_lattice(grid)


@functools.lru_cache(maxsize=8)
def propagator_for(
    grid: GridSpec, indices: MultiplierIndices, dt: float, integrator: str
) -> LinearPropagator:
    lattice = lattice_for(grid)
    return build_propagator(dissipation_symbol(indices, lattice), lattice, dt, integrator)


def make_initial(choice: InitialCondition, grid: GridSpec) -> np.ndarray:
    """Divergence-free spectral velocity for ``choice`` on ``grid``."""
    lattice = lattice_for(grid)
    x1, x2, x3 = grid.coordinates()
    k0 = 2 * np.pi / grid.box_length
    a = choice.amplitude
    zeros = np.zeros(grid.shape)
    if choice.kind in ("shear_x2", "shear_x3"):
        coord = x2 if choice.kind == "shear_x2" else x3
        u1 = np.broadcast_to(a * np.sin(choice.wavenumber * k0 * coord), grid.shape)
        phys = np.stack([u1, zeros, zeros])
        u = to_spectral(phys, lattice)
    elif choice.kind == "taylor_green":
        s1, c1 = np.sin(k0 * x1), np.cos(k0 * x1)
        s2, c2 = np.sin(k0 * x2), np.cos(k0 * x2)
        c3 = np.cos(k0 * x3)
        phys = np.stack(
            [
                np.broadcast_to(a * s1 * c2 * c3, grid.shape),
                np.broadcast_to(-a * c1 * s2 * c3, grid.shape),
                zeros,
            ]
        )
        u = to_spectral(phys, lattice)
    else:
        rng = np.random.default_rng(choice.seed)
        kmax = min(n // 3 for n in grid.shape)
        cube = random_cube(rng, kmax, components=3, slope=choice.spectrum_slope)
        u = symmetrize(embed_cube(cube, lattice), lattice)
        u = leray_project(u, lattice)
        energy = norm_sq(u, lattice)
        if energy > 0:
            u = u * (a / math.sqrt(energy / grid.volume))
        else:
            u = u * 0.0
    return leray_project(dealias(u, lattice), lattice)


def initial_state(config: RunConfig) -> SolverState:
    return SolverState(t=0.0, u=make_initial(config.initial_condition, config.grid))


def _advective_cfl(u: np.ndarray, lattice: WavenumberLattice, dt: float) -> float:
    speed = np.sqrt(np.sum(from_spectral(u, lattice) ** 2, axis=0))
    kmax = float(np.sqrt(np.max(np.where(lattice.dealias_mask, lattice.xi_sq, 0.0))))
    return float(dt * np.max(speed) * kmax)


def step(state: SolverState, config: RunConfig, propagator: LinearPropagator | None = None) -> SolverState:
    """Advance ``state`` by one step of size ``config.dt``."""
    lattice = lattice_for(config.grid)
    prop = propagator or propagator_for(config.grid, config.indices, config.dt, config.integrator)
    u = state.u
    n0 = nonlinear_term(u, lattice)
    prev = None
    if prop.scheme == "etd1":
        new = apply_matrix(prop.a, u) + apply_matrix(prop.b, n0)
    elif prop.scheme == "etdrk2":
        a = apply_matrix(prop.a, u) + apply_matrix(prop.b, n0)
        na = nonlinear_term(a, lattice)
        new = a + apply_matrix(prop.c, na - n0)
    else:
        older = state.prev_nonlinear if state.prev_nonlinear is not None else n0
        new = apply_matrix(prop.a, u) + apply_matrix(prop.b, 1.5 * n0 - 0.5 * older)
        prev = n0
    new = leray_project(new, lattice)
    count = state.step_count + 1
    t = count * config.dt
    if not np.all(np.isfinite(new)):
        raise BlowUpError(t, count, "non-finite spectral coefficient")
    div = divergence_error(new, lattice)
    if div > DIVERGENCE_TOLERANCE:
        raise RuntimeError(f"divergence {div:.3e} after step {count} exceeds tolerance")
    return SolverState(t=t, u=new, step_count=count, prev_nonlinear=prev)


def iterate(
    config: RunConfig,
    state: SolverState | None = None,
    history: list[EnergyReport] | None = None,
    t_end: float | None = None,
) -> Iterator[tuple[SolverState, EnergyReport]]:
    """Yield ``(state, report)`` every ``diagnostics_every`` steps and at the end.

    The first yield is the starting state itself unless ``history`` already
    contains its report (the resume case). ``balance_residual`` of each report
    is the relative L2-balance defect accumulated since ``t = 0``; it is 0
    until three reports exist.

    Raises :class:`BlowUpError` on non-finite data or when ``||grad u||^2``
    exceeds ``config.blowup_ceiling``.
    """
    lattice = lattice_for(config.grid)
    prop = propagator_for(config.grid, config.indices, config.dt, config.integrator)
    if state is None:
        state = initial_state(config)
    reports = list(history or [])
    total_steps = n_steps_for(config.t_end if t_end is None else t_end, config.dt)

    def emit(st: SolverState) -> EnergyReport:
        rep = energy_report(st.u, st.t, lattice, config.indices, config.sobolev_order_s)
        reports.append(rep)
        rep.balance_residual = balance_residual(reports) if len(reports) >= 3 else 0.0
        if not all(np.isfinite(rep.row())):
            raise BlowUpError(st.t, st.step_count, "non-finite diagnostics", rep)
        if rep.grad_sq > config.blowup_ceiling:
            raise BlowUpError(st.t, st.step_count, f"||grad u||^2 = {rep.grad_sq:.3e} above ceiling", rep)
        return rep

    if not reports:
        cfl = _advective_cfl(state.u, lattice, config.dt)
        if cfl > 0.5:
            log.warning("advective CFL number %.3f exceeds 0.5 (dt=%g)", cfl, config.dt)
        yield state, emit(state)

    while state.step_count < total_steps:
        state = step(state, config, prop)
        if state.step_count % config.diagnostics_every == 0 or state.step_count == total_steps:
            yield state, emit(state)


@dataclass
class RunResult:
    reports: list[EnergyReport]
    final_state: SolverState
    termination: str = "completed"
    message: str = ""


def run(config: RunConfig) -> RunResult:
    """Integrate to ``config.t_end``, collecting every emitted report.

    A blow-up indicator ends the run early with ``termination = "blow_up_indicator"``.
    """
    reports: list[EnergyReport] = []
    state = initial_state(config)
    try:
        for state, rep in iterate(config, state):
            reports.append(rep)
    except BlowUpError as exc:
        if exc.report is not None:
            reports.append(exc.report)
        return RunResult(reports, state, "blow_up_indicator", str(exc))
    return RunResult(reports, state)
