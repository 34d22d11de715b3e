"""
Problems - Burgers and blood-flow test problems with manufactured solutions.

Forcings are hand-derived: each is the residual of the exact solution inserted
into the PDE, so that exact + forcing solves the forced problem. Blood-flow
quantities use CGS units.

Version: 1.0 (2025-03-13)
"""
from typing import Callable, Dict, Optional, Tuple
from dataclasses import dataclass

import numpy as np

from dg_solver.dg_core import BoundaryMode, Forcing
from dg_solver.errors import DomainError
from dg_solver.flux import Law, ScalarLaw, SystemLaw


TWO_PI = 2.0 * np.pi

ExactSolution = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class BloodFlowParams:
    """Parameters of the 1D blood-flow model.

    Attributes:
        p0: Reference pressure (dyn/cm^2)
        A0: Reference cross-sectional area (cm^2)
        coriolis: Coriolis coefficient alpha (dimensionless)
        rho: Blood density (g/cm^3)
        nu: Kinematic viscosity (cm^2/s)
        beta: Wall stiffness in the pressure law (dyn/cm^3)
    """
    p0: float = 0.0
    A0: float = 1.0
    coriolis: float = 1.1
    rho: float = 1.06
    nu: float = 3.302e-2
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"Density must be positive, got {self.rho}")
        if not self.A0 > 0:
            raise ValueError(f"Reference area must be positive, got {self.A0}")
        if not self.coriolis > 1:
            raise ValueError(f"Coriolis coefficient must exceed 1, got {self.coriolis}")
        if self.beta < 0 or self.nu < 0:
            raise ValueError(f"Stiffness and viscosity must be nonnegative, got {self.beta}, {self.nu}")

    @property
    def friction(self) -> float:
        """Coefficient 2 pi nu alpha / (alpha - 1) of the viscous source."""
        return TWO_PI * self.nu * self.coriolis / (self.coriolis - 1.0)


@dataclass(frozen=True)
class ManufacturedProblem:
    """A conservation law together with an exact solution and its forcing.

    Attributes:
        law: Scalar or system law
        exact: Exact solution of (x, t); shaped like x or (m,) + x.shape
        forcing: Forcing of (x, t) making exact a solution
        label: Problem id
        component_names: Names of the unknowns
        length: Domain length L
        bc: Boundary treatment
    """
    law: Law
    exact: ExactSolution
    forcing: Forcing
    label: str
    component_names: Tuple[str, ...]
    length: float = 1.0
    bc: BoundaryMode = BoundaryMode.PERIODIC

    @property
    def num_components(self) -> int:
        return self.law.num_components

    def initial(self, x: np.ndarray) -> np.ndarray:
        """Initial condition exact(x, 0)."""
        return self.exact(x, 0.0)

    def exact_at(self, t: float) -> Callable[[np.ndarray], np.ndarray]:
        """Exact solution frozen at time t."""
        return lambda x: self.exact(x, t)


def burgers_law() -> ScalarLaw:
    """Inviscid Burgers flux f(u) = u^2 / 2; f' is monotone."""
    return ScalarLaw(
        flux=lambda u: 0.5 * u * u,
        dflux=lambda u: u,
        d2flux=lambda u: np.ones_like(u),
        dflux_critical_points=(),
        label="burgers",
    )


def burgers_exact(x: np.ndarray, t: float) -> np.ndarray:
    """u = cos(2 pi x) sin t + sin(2 pi x) cos t."""
    return np.cos(TWO_PI * x) * np.sin(t) + np.sin(TWO_PI * x) * np.cos(t)


def burgers_forcing(x: np.ndarray, t: float) -> np.ndarray:
    """u_t + u u_x at the exact solution."""
    u = burgers_exact(x, t)
    u_t = np.cos(TWO_PI * x) * np.cos(t) - np.sin(TWO_PI * x) * np.sin(t)
    # The spatial derivative is 2 pi times the time derivative for this solution.
    return u_t + u * TWO_PI * u_t


def burgers_mms() -> ManufacturedProblem:
    """Burgers equation on [0, 1] with a periodic manufactured solution."""
    return ManufacturedProblem(
        law=burgers_law(),
        exact=burgers_exact,
        forcing=burgers_forcing,
        label="burgers",
        component_names=("u",),
    )


def _check_area(A: np.ndarray) -> None:
    if not np.all(A > 0):
        raise DomainError(f"Vessel area must be positive, got minimum {np.min(A):.6g}")


def bloodflow_pressure(A: np.ndarray, params: BloodFlowParams) -> np.ndarray:
    """p = p0 + beta (sqrt(A) - sqrt(A0))."""
    _check_area(np.asarray(A))
    return params.p0 + params.beta * (np.sqrt(A) - np.sqrt(params.A0))


def bloodflow_flux(U: np.ndarray, params: BloodFlowParams) -> np.ndarray:
    """Flux (Q, alpha Q^2/A + (A psi - Psi)/rho).

    The pressure integral has the closed form
    (A psi - Psi) / rho = beta / (3 rho) (A^{3/2} - A0^{3/2}).

    Args:
        U: States of shape (2, ...) holding A and Q
        params: Model parameters

    Returns:
        Flux of shape (2, ...)

    Raises:
        DomainError: If an area is not positive
    """
    A, Q = U[0], U[1]
    _check_area(A)
    momentum = params.coriolis * Q * Q / A + params.beta / (3.0 * params.rho) * (
        A * np.sqrt(A) - params.A0 * np.sqrt(params.A0)
    )
    return np.stack([Q, momentum])


def bloodflow_jacobian(U: np.ndarray, params: BloodFlowParams) -> np.ndarray:
    """Analytic Jacobian of bloodflow_flux, shape (2, 2, ...)."""
    A, Q = U[0], U[1]
    _check_area(A)
    velocity = Q / A
    return np.array([
        [np.zeros_like(A), np.ones_like(A)],
        [-params.coriolis * velocity ** 2 + params.beta / (2.0 * params.rho) * np.sqrt(A),
         2.0 * params.coriolis * velocity],
    ])


def bloodflow_eigenvalues(U: np.ndarray, params: BloodFlowParams) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues lambda_1 <= lambda_2 of the flux Jacobian.

    Raises:
        DomainError: If an area is not positive or the discriminant is negative
    """
    A, Q = U[0], U[1]
    _check_area(A)
    velocity = Q / A
    alpha = params.coriolis
    discriminant = alpha * (alpha - 1.0) * velocity ** 2 + params.beta * np.sqrt(A) / (2.0 * params.rho)
    if np.any(discriminant < 0):
        raise DomainError("Blood-flow system lost hyperbolicity: negative discriminant")
    root = np.sqrt(discriminant)
    return alpha * velocity - root, alpha * velocity + root


def bloodflow_source(x: np.ndarray, t: float, U: np.ndarray, params: BloodFlowParams) -> np.ndarray:
    """Viscous friction source (0, -2 pi nu alpha/(alpha-1) Q/A)."""
    A, Q = U[0], U[1]
    _check_area(A)
    return np.stack([np.zeros_like(Q), -params.friction * Q / A])


def bloodflow_law(params: Optional[BloodFlowParams] = None) -> SystemLaw:
    """Area-momentum system for a single elastic vessel."""
    params = params or BloodFlowParams()
    return SystemLaw(
        flux=lambda U: bloodflow_flux(U, params),
        jacobian=lambda U: bloodflow_jacobian(U, params),
        eigenvalues=lambda U: bloodflow_eigenvalues(U, params),
        source=lambda x, t, U: bloodflow_source(x, t, U, params),
        admissible=lambda U: U[0] > 0,
        label="bloodflow",
    )


def bloodflow_exact(x: np.ndarray, t: float) -> np.ndarray:
    """A = cos(2 pi x) cos t + 2, Q = sin(2 pi x) cos t."""
    return np.stack([np.cos(TWO_PI * x) * np.cos(t) + 2.0, np.sin(TWO_PI * x) * np.cos(t)])


def _bloodflow_forcing(params: BloodFlowParams) -> Forcing:
    alpha = params.coriolis

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        c, s = np.cos(TWO_PI * x), np.sin(TWO_PI * x)
        A = c * np.cos(t) + 2.0
        Q = s * np.cos(t)
        A_t = -c * np.sin(t)
        A_x = -TWO_PI * s * np.cos(t)
        Q_t = -s * np.sin(t)
        Q_x = TWO_PI * c * np.cos(t)
        momentum_x = (
            alpha * (2.0 * Q * Q_x / A - Q * Q * A_x / (A * A))
            + params.beta / (2.0 * params.rho) * np.sqrt(A) * A_x
        )
        return np.stack([A_t + Q_x, Q_t + momentum_x + params.friction * Q / A])

    return forcing


def bloodflow_mms(params: Optional[BloodFlowParams] = None) -> ManufacturedProblem:
    """Blood-flow system on [0, 1] with a periodic manufactured solution; min A = 1."""
    params = params or BloodFlowParams()
    return ManufacturedProblem(
        law=bloodflow_law(params),
        exact=bloodflow_exact,
        forcing=_bloodflow_forcing(params),
        label="bloodflow",
        component_names=("A", "Q"),
    )


PROBLEMS: Dict[str, Callable[[], ManufacturedProblem]] = {
    "burgers": burgers_mms,
    "bloodflow": bloodflow_mms,
}
