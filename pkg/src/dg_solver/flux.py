"""
Numerical Flux - Conservation laws and local Lax-Friedrichs interface fluxes.

This module defines scalar and system conservation laws and the numerical
fluxes that couple neighbouring elements. All flux functions are vectorized:
traces may be floats or arrays holding one entry per interface.

Version: 1.0 (2025-03-13)
"""
from typing import Callable, Optional, Tuple, Union
from dataclasses import dataclass

import numpy as np
from typing_extensions import Protocol, TypeAlias

from dg_solver.errors import DomainError

ArrayLike: TypeAlias = Union[float, np.ndarray]

# Fallback sample count for the wave-speed maximum when f' has unknown extrema.
WAVESPEED_SAMPLES = 33


def _zero_source(x: np.ndarray, t: float, u: np.ndarray) -> np.ndarray:
    return np.zeros_like(u)


@dataclass(frozen=True)
class ScalarLaw:
    """Scalar conservation law u_t + f(u)_x = s(u).

    Attributes:
        flux: Physical flux f
        dflux: Derivative f'
        label: Human-readable name
        source: Source s(x, t, u), zero when omitted
        d2flux: Second derivative f'', optional
        dflux_critical_points: Known roots of f''. An empty tuple means f' is
            monotone; None means unknown and the wave speed is sampled.
    """
    flux: Callable[[np.ndarray], np.ndarray]
    dflux: Callable[[np.ndarray], np.ndarray]
    label: str = "scalar"
    source: Callable[[np.ndarray, float, np.ndarray], np.ndarray] = _zero_source
    d2flux: Optional[Callable[[np.ndarray], np.ndarray]] = None
    dflux_critical_points: Optional[Tuple[float, ...]] = None

    @property
    def num_components(self) -> int:
        return 1


@dataclass(frozen=True)
class SystemLaw:
    """System of conservation laws U_t + F(U)_x = S(U).

    States are arrays of shape (num_components, ...).

    Attributes:
        flux: Physical flux F
        jacobian: dF, returns shape (m, m, ...)
        eigenvalues: Returns the tuple (lambda_1, lambda_2) with lambda_1 <= lambda_2
        source: Source S(x, t, U)
        admissible: Boolean mask of states where the law is defined
        label: Human-readable name
        num_components: Number of unknowns m
    """
    flux: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    eigenvalues: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]
    source: Callable[[np.ndarray, float, np.ndarray], np.ndarray]
    admissible: Callable[[np.ndarray], np.ndarray]
    label: str = "system"
    num_components: int = 2


Law: TypeAlias = Union[ScalarLaw, SystemLaw]


@dataclass(frozen=True)
class FluxResult:
    """Interface flux and the dissipation coefficient J used in its jump term."""
    value: np.ndarray
    dissipation: np.ndarray


class NumericalFlux(Protocol):
    """Interface flux computed from left and right traces."""

    def __call__(self, law: Law, v_minus: ArrayLike, v_plus: ArrayLike) -> FluxResult:
        ...


def _max_wavespeed(law: ScalarLaw, v_minus: np.ndarray, v_plus: np.ndarray) -> np.ndarray:
    if law.dflux_critical_points is None:
        s = np.linspace(0.0, 1.0, WAVESPEED_SAMPLES).reshape((-1,) + (1,) * v_minus.ndim)
        w = v_minus + s * (v_plus - v_minus)
        return np.max(np.abs(law.dflux(w)), axis=0)
    speed = np.maximum(np.abs(law.dflux(v_minus)), np.abs(law.dflux(v_plus)))
    low = np.minimum(v_minus, v_plus)
    high = np.maximum(v_minus, v_plus)
    for point in law.dflux_critical_points:
        inside = (low <= point) & (point <= high)
        speed = np.where(inside, np.maximum(speed, abs(float(law.dflux(np.float64(point))))), speed)
    return speed


def llf_scalar(law: ScalarLaw, v_minus: ArrayLike, v_plus: ArrayLike) -> FluxResult:
    """Local Lax-Friedrichs flux for a scalar law.

    f_hat = {f(v)} + J [v] / 2 with J the maximum of |f'| between the traces.

    Args:
        law: The scalar law
        v_minus: Left trace(s)
        v_plus: Right trace(s)

    Returns:
        The flux value and J, shaped like the traces

    Raises:
        DomainError: If a trace is NaN
    """
    vm = np.asarray(v_minus, dtype=float)
    vp = np.asarray(v_plus, dtype=float)
    if np.isnan(vm).any() or np.isnan(vp).any():
        raise DomainError("NaN trace passed to the local Lax-Friedrichs flux")
    dissipation = _max_wavespeed(law, vm, vp)
    value = 0.5 * (law.flux(vm) + law.flux(vp)) + 0.5 * dissipation * (vm - vp)
    return FluxResult(value=value, dissipation=dissipation)


def alpha_viscosity(
    law: ScalarLaw,
    flux_fn: Optional[NumericalFlux],
    v_minus: ArrayLike,
    v_plus: ArrayLike
) -> ArrayLike:
    """Interface viscosity of a numerical flux.

    alpha = (f_hat(v-, v+) - f({v})) / [v] when the jump is resolvable in
    floating point, |f'({v})| / 2 otherwise.

    Args:
        law: The scalar law
        flux_fn: Numerical flux, local Lax-Friedrichs when None
        v_minus: Left trace(s)
        v_plus: Right trace(s)

    Returns:
        alpha per trace pair; a float for scalar input
    """
    flux_fn = flux_fn or llf_scalar
    vm = np.asarray(v_minus, dtype=float)
    vp = np.asarray(v_plus, dtype=float)
    jump = vm - vp
    average = 0.5 * (vm + vp)
    resolved = np.abs(jump) > 1e-10 * (1.0 + np.abs(average))
    safe_jump = np.where(resolved, jump, 1.0)
    generic = (flux_fn(law, vm, vp).value - law.flux(average)) / safe_jump
    alpha = np.where(resolved, generic, 0.5 * np.abs(law.dflux(average)))
    return float(alpha) if alpha.ndim == 0 else alpha


def _check_admissible(system: SystemLaw, state: np.ndarray, side: str) -> None:
    mask = np.asarray(system.admissible(state))
    if not mask.all():
        bad = int(np.flatnonzero(~mask.ravel())[0])
        raise DomainError(
            f"Inadmissible {side} state for {system.label} at interface {bad}",
            interface=bad,
        )


def llf_system(system: SystemLaw, u_minus: np.ndarray, u_plus: np.ndarray) -> FluxResult:
    """Local Lax-Friedrichs flux for a system.

    J is the largest eigenvalue magnitude of the flux Jacobian over both
    traces; every component uses the same J.

    Args:
        system: The system law
        u_minus: Left state(s), shape (m, ...)
        u_plus: Right state(s), shape (m, ...)

    Returns:
        Flux value of shape (m, ...) and J of shape (...)

    Raises:
        DomainError: If a trace is inadmissible, naming the interface index
    """
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    _check_admissible(system, um, "left")
    _check_admissible(system, up, "right")
    lm1, lm2 = system.eigenvalues(um)
    lp1, lp2 = system.eigenvalues(up)
    dissipation = np.maximum.reduce([np.abs(lm1), np.abs(lp1), np.abs(lm2), np.abs(lp2)])
    value = 0.5 * (system.flux(um) + system.flux(up)) + 0.5 * dissipation * (um - up)
    return FluxResult(value=value, dissipation=dissipation)


def default_flux(law: Law) -> NumericalFlux:
    """Local Lax-Friedrichs flux matching the kind of law."""
    return llf_system if isinstance(law, SystemLaw) else llf_scalar
