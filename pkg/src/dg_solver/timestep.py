"""
Time Stepping - Forward Euler and two-step Adams-Bashforth integrators.

The integrators advance coefficient arrays of a DGField using a residual
function R(u, t) produced by dg_core. AB2 keeps the previous residual rather
than the previous solution, so each step costs one residual evaluation.

Version: 1.0 (2025-03-13)
"""
from typing import Optional, Tuple, TYPE_CHECKING
from dataclasses import dataclass
from enum import Enum
import logging
import math

import numpy as np

from dg_solver.dg_core import BoundaryMode, ResidualField, ResidualFunction, residual_operator
from dg_solver.errors import BlowUpError, IntegratorStateError
from dg_solver.flux import NumericalFlux
from dg_solver.meshbasis import DGField, Mesh, l2_project

if TYPE_CHECKING:
    from dg_solver.problems import ManufacturedProblem


logger = logging.getLogger("dg_solver")

BLOWUP_THRESHOLD = 1e12
MAX_START_SUBSTEPS = 10_000


class SchemeKind(Enum):
    """Explicit time discretization."""
    FORWARD_EULER = "fe"
    ADAMS_BASHFORTH2 = "ab2"


class CflMode(Enum):
    """Step-size rule used by cfl_dt."""
    PRACTICAL = "practical"
    THEORETICAL = "theoretical"
    RELAXED = "relaxed"


@dataclass(frozen=True)
class IntegratorState:
    """Value passed between time steps.

    Attributes:
        current: Approximation at t^n
        t: Current time t^n
        dt: Step size
        step_index: n
        prev_residual: R(u^{n-1}, t^{n-1}), the AB2 history
    """
    current: DGField
    t: float
    dt: float
    step_index: int = 0
    prev_residual: Optional[ResidualField] = None


def _advance(
    state: IntegratorState,
    increment: np.ndarray,
    prev_residual: Optional[ResidualField],
    blowup_threshold: float
) -> IntegratorState:
    coeffs = state.current.coeffs + state.dt * increment
    magnitude = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    if not np.isfinite(coeffs).all() or magnitude > blowup_threshold:
        raise BlowUpError(step=state.step_index + 1, max_magnitude=magnitude)
    return IntegratorState(
        current=state.current.with_coeffs(coeffs),
        t=state.t + state.dt,
        dt=state.dt,
        step_index=state.step_index + 1,
        prev_residual=prev_residual,
    )


def forward_euler_step(
    state: IntegratorState,
    residual_fn: ResidualFunction,
    blowup_threshold: float = BLOWUP_THRESHOLD
) -> IntegratorState:
    """Advance one forward Euler step: u^{n+1} = u^n + dt R(u^n, t^n).

    Args:
        state: Current integrator state
        residual_fn: Residual function of (field, t)
        blowup_threshold: Largest coefficient magnitude accepted

    Returns:
        The state at t^n + dt; the history slot carries R(u^n, t^n)

    Raises:
        ValueError: If dt is not positive
        BlowUpError: If the new coefficients are non-finite or exceed the threshold
    """
    if not state.dt > 0:
        raise ValueError(f"Time step must be positive, got {state.dt}")
    residual = residual_fn(state.current, state.t)
    return _advance(state, residual.coeffs, residual, blowup_threshold)


def ab2_step(
    state: IntegratorState,
    residual_fn: ResidualFunction,
    blowup_threshold: float = BLOWUP_THRESHOLD
) -> IntegratorState:
    """Advance one Adams-Bashforth step.

    u^{n+1} = u^n + dt (3/2 R(u^n, t^n) - 1/2 R(u^{n-1}, t^{n-1}))

    Args:
        state: Current integrator state with AB2 history
        residual_fn: Residual function of (field, t)
        blowup_threshold: Largest coefficient magnitude accepted

    Returns:
        The state at t^n + dt with R(u^n, t^n) as its history

    Raises:
        IntegratorStateError: If the state has no previous residual
        ValueError: If dt is not positive
        BlowUpError: If the new coefficients are non-finite or exceed the threshold
    """
    if state.prev_residual is None:
        raise IntegratorStateError(
            f"Adams-Bashforth step {state.step_index} requires the previous residual; "
            "start the scheme with ab2_start"
        )
    if not state.dt > 0:
        raise ValueError(f"Time step must be positive, got {state.dt}")
    residual = residual_fn(state.current, state.t)
    increment = 1.5 * residual.coeffs - 0.5 * state.prev_residual.coeffs
    return _advance(state, increment, residual, blowup_threshold)


def default_start_substeps(dt: float, cap: int = MAX_START_SUBSTEPS) -> int:
    """Substep count making the starting substep about dt**2."""
    return max(1, min(math.ceil(1.0 / dt), cap))


def ab2_start(
    u0_field: DGField,
    residual_fn: ResidualFunction,
    dt: float,
    substeps: Optional[int] = None,
    t0: float = 0.0,
    blowup_threshold: float = BLOWUP_THRESHOLD
) -> Tuple[DGField, ResidualField]:
    """Compute the second starting value of AB2 with forward Euler substeps.

    Args:
        u0_field: Initial approximation u^0
        residual_fn: Residual function of (field, t)
        dt: AB2 step size
        substeps: Number of forward Euler substeps covering [t0, t0+dt]
        t0: Initial time
        blowup_threshold: Largest coefficient magnitude accepted

    Returns:
        Tuple (u^1, R(u^0, t0))

    Raises:
        ValueError: If substeps is less than one
    """
    substeps = default_start_substeps(dt) if substeps is None else substeps
    if substeps < 1:
        raise ValueError(f"At least one starting substep is required, got {substeps}")
    logger.debug(f"Starting AB2 with {substeps} forward Euler substeps of size {dt / substeps:.3e}")
    state = IntegratorState(current=u0_field, t=t0, dt=dt / substeps)
    r0: Optional[ResidualField] = None
    for _ in range(substeps):
        state = forward_euler_step(state, residual_fn, blowup_threshold)
        if r0 is None:
            r0 = state.prev_residual
    assert r0 is not None
    return state.current, r0


def integrate(
    problem: "ManufacturedProblem",
    scheme: SchemeKind,
    mesh: Mesh,
    degree: int,
    dt: float,
    num_steps: int,
    bc: Optional[BoundaryMode] = None,
    substeps: Optional[int] = None,
    flux: Optional[NumericalFlux] = None,
    blowup_threshold: float = BLOWUP_THRESHOLD,
    max_start_substeps: int = MAX_START_SUBSTEPS
) -> DGField:
    """Project the initial data and run a scheme for num_steps steps.

    Args:
        problem: Manufactured problem supplying the law, forcing and initial data
        scheme: Forward Euler or AB2
        mesh: Spatial mesh
        degree: Polynomial degree k
        dt: Step size
        num_steps: Number of steps M
        bc: Boundary treatment, the problem's own when None
        substeps: Forward Euler substeps for the AB2 start
        flux: Numerical flux, local Lax-Friedrichs when None
        blowup_threshold: Largest coefficient magnitude accepted
        max_start_substeps: Cap on the default number of starting substeps

    Returns:
        The approximation at t = num_steps * dt

    Raises:
        ValueError: If num_steps is negative or dt is not positive
        BlowUpError: If the run diverges
    """
    if num_steps < 0:
        raise ValueError(f"Number of steps must be nonnegative, got {num_steps}")
    if not dt > 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    u0 = l2_project(problem.initial, mesh, degree, problem.num_components)
    if num_steps == 0:
        return u0
    residual_fn = residual_operator(problem.law, flux, bc or problem.bc, problem.forcing)

    if scheme is SchemeKind.FORWARD_EULER:
        state = IntegratorState(current=u0, t=0.0, dt=dt)
        for _ in range(num_steps):
            state = forward_euler_step(state, residual_fn, blowup_threshold)
    else:
        if substeps is None:
            substeps = default_start_substeps(dt, max_start_substeps)
        u1, r0 = ab2_start(u0, residual_fn, dt, substeps, blowup_threshold=blowup_threshold)
        state = IntegratorState(current=u1, t=dt, dt=dt, step_index=1, prev_residual=r0)
        for _ in range(num_steps - 1):
            state = ab2_step(state, residual_fn, blowup_threshold)
    logger.debug(
        f"{problem.label}: {scheme.value} reached t={state.t:.6g} after {state.step_index} steps "
        f"(k={degree}, {mesh.num_elements} elements)"
    )
    return state.current


def cfl_dt(
    mesh: Mesh,
    degree: int,
    max_wavespeed: float,
    safety: float = 1.0,
    mode: CflMode = CflMode.PRACTICAL,
    constant: float = 1.0
) -> float:
    """Step size from a CFL condition.

    - practical: safety * h / ((2k+1) * max_wavespeed)
    - theoretical: safety * constant * h**2
    - relaxed: safety * constant * h**(4/3), the bound suggested by von Neumann
      analysis of AB2

    Raises:
        ValueError: If max_wavespeed is not positive
    """
    if not max_wavespeed > 0:
        raise ValueError(f"Maximum wave speed must be positive, got {max_wavespeed}")
    h = mesh.h
    if mode is CflMode.THEORETICAL:
        return safety * constant * h ** 2
    if mode is CflMode.RELAXED:
        return safety * constant * h ** (4.0 / 3.0)
    return safety * h / ((2 * degree + 1) * max_wavespeed)
