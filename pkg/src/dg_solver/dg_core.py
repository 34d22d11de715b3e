"""
DG Core - Assembly of the discontinuous Galerkin spatial operator.

For every element I_j and basis function phi the operator evaluates

    H_j(u, phi) = int f(u) dphi/dx + int s phi - f_hat|x_{j+1} phi^-|x_{j+1}
                  + f_hat|x_j phi^+|x_j

and returns the mass-inverted result as coefficients, so that time steppers
work on coefficient arrays directly. In free mode the first element drops its
x_0 term and the last element drops its x_{N+1} term; in periodic mode the
traces wrap around.

Version: 1.0 (2025-03-13)
"""
from typing import Callable, Optional, Tuple
from dataclasses import dataclass
from enum import Enum

import numpy as np
from typing_extensions import TypeAlias

from dg_solver.errors import DomainError
from dg_solver.flux import Law, NumericalFlux, SystemLaw, default_flux
from dg_solver.meshbasis import (
    DGField,
    QuadratureRule,
    as_components,
    basis_derivatives,
    basis_values,
    trace_values,
    volume_quadrature,
)


Forcing: TypeAlias = Callable[[np.ndarray, float], np.ndarray]


class BoundaryMode(Enum):
    """Treatment of the end points x_0 and x_{N+1}."""
    FREE = "free"
    PERIODIC = "periodic"


@dataclass(frozen=True, eq=False)
class ResidualField(DGField):
    """Mass-inverted DG operator: int_{I_j} R phi = H_j(u, phi) for every basis phi."""


ResidualFunction: TypeAlias = Callable[[DGField, float], ResidualField]


def _pointwise_flux(law: Law, u: np.ndarray) -> np.ndarray:
    if isinstance(law, SystemLaw):
        return law.flux(u)
    return law.flux(u[0])[None]


def _pointwise_source(law: Law, x: np.ndarray, t: float, u: np.ndarray) -> np.ndarray:
    if isinstance(law, SystemLaw):
        return np.asarray(law.source(x, t, u))
    return np.broadcast_to(law.source(x, t, u[0]), x.shape)[None]


def _quadrature_terms(
    law: Law,
    field: DGField,
    t: float,
    forcing: Optional[Forcing]
) -> Tuple[QuadratureRule, np.ndarray, np.ndarray]:
    """Flux and total source at the volume quadrature points, each (m, E, Q)."""
    rule = volume_quadrature(field.degree)
    u = np.einsum("emk,kq->meq", field.coeffs, basis_values(field.degree, rule.points))
    if isinstance(law, SystemLaw):
        mask = np.asarray(law.admissible(u))
        if not mask.all():
            element = int(np.flatnonzero(~mask.all(axis=1))[0])
            raise DomainError(
                f"Inadmissible state for {law.label} inside element {element} at t={t:.6g}",
                element=element,
            )
    x = field.mesh.to_physical(rule.points)
    flux_values = _pointwise_flux(law, u)
    source = _pointwise_source(law, x, t, u)
    if forcing is not None:
        source = source + as_components(forcing(x, t), field.num_components, x.shape)
    return rule, flux_values, source


def _interface_fluxes(
    law: Law,
    flux: NumericalFlux,
    field: DGField,
    bc: BoundaryMode
) -> np.ndarray:
    """Numerical flux at nodes x_0 .. x_{N+1}, shape (m, E+1).

    In free mode the two boundary entries are zero so they drop out of H_0 and H_N.
    """
    left, right = trace_values(field)
    num_elements = field.mesh.num_elements
    if bc is BoundaryMode.PERIODIC:
        minus, plus, first_node = np.roll(right, 1, axis=0), left, 0
    else:
        minus, plus, first_node = right[:-1], left[1:], 1
    fluxes = np.zeros((field.num_components, num_elements + 1))
    if len(plus) == 0:
        return fluxes
    try:
        if isinstance(law, SystemLaw):
            values = flux(law, minus.T, plus.T).value
        else:
            values = np.asarray(flux(law, minus[:, 0], plus[:, 0]).value)[None]
    except DomainError as e:
        node = None if e.interface is None else e.interface + first_node
        raise DomainError(f"{e} (mesh node {node})", interface=node) from e
    if bc is BoundaryMode.PERIODIC:
        fluxes[:, :-1] = values
        fluxes[:, -1] = values[:, 0]
    else:
        fluxes[:, 1:-1] = values
    return fluxes


def _assemble(
    law: Law,
    flux: NumericalFlux,
    field: DGField,
    t: float,
    bc: BoundaryMode,
    forcing: Optional[Forcing]
) -> np.ndarray:
    rule, flux_values, source = _quadrature_terms(law, field, t, forcing)
    degree = field.degree
    half_h = 0.5 * field.mesh.h
    # dphi/dx = (2/h) dphi/dxi cancels the Jacobian h/2 of the volume integral.
    volume = np.einsum("meq,q,kq->emk", flux_values, rule.weights, basis_derivatives(degree, rule.points))
    volume += half_h * np.einsum("meq,q,kq->emk", source, rule.weights, basis_values(degree, rule.points))
    ends = basis_values(degree, np.array([-1.0, 1.0]))
    node_flux = _interface_fluxes(law, flux, field, bc)
    outgoing = node_flux[:, 1:].T[:, :, None] * ends[None, None, :, 1]
    incoming = node_flux[:, :-1].T[:, :, None] * ends[None, None, :, 0]
    return volume - outgoing + incoming


def dg_residual(
    law: Law,
    flux: Optional[NumericalFlux],
    field: DGField,
    t: float,
    bc: BoundaryMode = BoundaryMode.PERIODIC,
    forcing: Optional[Forcing] = None
) -> ResidualField:
    """Evaluate the DG operator and apply the inverse mass matrix.

    Args:
        law: Scalar or system conservation law
        flux: Numerical flux, local Lax-Friedrichs for the law when None
        field: Current approximation u_h
        t: Time passed to the source and forcing
        bc: Boundary treatment
        forcing: Optional manufactured forcing s(x, t), added to the law's source

    Returns:
        Residual coefficients with the shape of the input field

    Raises:
        DomainError: If a quadrature or trace state is inadmissible
    """
    functional = _assemble(law, flux or default_flux(law), field, t, bc, forcing)
    return ResidualField(field.mesh, field.degree, functional * (2.0 / field.mesh.h))


def dg_functional(
    law: Law,
    flux: Optional[NumericalFlux],
    field: DGField,
    test_field: DGField,
    t: float,
    bc: BoundaryMode = BoundaryMode.PERIODIC,
    forcing: Optional[Forcing] = None
) -> np.ndarray:
    """Weak form sum_j H_j(u_h, psi_h) against an arbitrary test field.

    Evaluated in physical space from the values and derivatives of psi_h,
    independently of the residual representation.

    Returns:
        Array of shape (num_components,)
    """
    if test_field.mesh != field.mesh or test_field.degree != field.degree:
        raise ValueError("Test field must live on the same mesh and space as the solution")
    flux = flux or default_flux(law)
    rule, flux_values, source = _quadrature_terms(law, field, t, forcing)
    h = field.mesh.h
    psi = np.einsum("emk,kq->meq", test_field.coeffs, basis_values(test_field.degree, rule.points))
    dpsi_dx = (2.0 / h) * np.einsum(
        "emk,kq->meq", test_field.coeffs, basis_derivatives(test_field.degree, rule.points)
    )
    volume = 0.5 * h * np.einsum("meq,q->m", flux_values * dpsi_dx + source * psi, rule.weights)
    psi_left, psi_right = trace_values(test_field)
    node_flux = _interface_fluxes(law, flux, field, bc)
    boundary = np.sum(-node_flux[:, 1:] * psi_right.T + node_flux[:, :-1] * psi_left.T, axis=1)
    return volume + boundary


def residual_operator(
    law: Law,
    flux: Optional[NumericalFlux] = None,
    bc: BoundaryMode = BoundaryMode.PERIODIC,
    forcing: Optional[Forcing] = None
) -> ResidualFunction:
    """Bind a law and its discretization choices into a residual function of (field, t)."""
    flux = flux or default_flux(law)

    def residual(field: DGField, t: float) -> ResidualField:
        return dg_residual(law, flux, field, t, bc, forcing)

    return residual


def cell_mean_total(field: DGField) -> np.ndarray:
    """Integral of the field over [0, L], per component.

    Only the constant mode phi_0 = 1/sqrt(2) has a nonzero integral.
    """
    return field.mesh.h / np.sqrt(2.0) * np.sum(field.coeffs[:, :, 0], axis=0)
