"""
Mesh and Basis - Uniform 1D mesh, orthonormal Legendre basis and quadrature.

This module provides the discrete function space used by the solver: a uniform
partition of [0, L], piecewise polynomials of degree k stored as coefficients
in an orthonormal Legendre basis on the reference element [-1, 1], Gauss-Legendre
quadrature, the L2 projection, traces at element interfaces and error norms.

Version: 1.0 (2025-03-13)
"""
from typing import Callable, Optional, Tuple
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre


PointFunction = Callable[[np.ndarray], np.ndarray]

MAX_QUADRATURE_POINTS = 32


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of [0, L].

    Attributes:
        length: Domain length L
        num_elements: Number of elements N+1
        nodes: Element endpoints x_0 .. x_{N+1}
    """
    length: float
    num_elements: int
    nodes: np.ndarray = field(repr=False, compare=False)

    @property
    def h(self) -> float:
        """Element width."""
        return self.length / self.num_elements

    def element_left(self) -> np.ndarray:
        """Left endpoint of every element."""
        return self.nodes[:-1]

    def to_physical(self, xi: np.ndarray) -> np.ndarray:
        """Map reference points to every element.

        Args:
            xi: Points on the reference element [-1, 1]

        Returns:
            Array of shape (num_elements, len(xi)) with x = x_j + (xi+1)h/2
        """
        return self.element_left()[:, None] + (np.asarray(xi)[None, :] + 1.0) * (self.h / 2.0)


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature rule on the reference element [-1, 1]."""
    points: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class DGField:
    """Piecewise polynomial field stored in the orthonormal Legendre basis.

    The coefficient array is copied and made read-only on construction.

    Attributes:
        mesh: The mesh the field lives on
        degree: Polynomial degree k
        coeffs: Array of shape (num_elements, num_components, degree+1)
    """
    mesh: Mesh
    degree: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError(f"Polynomial degree must be nonnegative, got {self.degree}")
        coeffs = np.array(self.coeffs, dtype=float)
        if (coeffs.ndim != 3 or coeffs.shape[0] != self.mesh.num_elements
                or coeffs.shape[1] < 1 or coeffs.shape[2] != self.degree + 1):
            raise ValueError(
                f"Coefficient array has shape {coeffs.shape}, expected "
                f"({self.mesh.num_elements}, m, {self.degree + 1}) with m >= 1"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def num_components(self) -> int:
        return self.coeffs.shape[1]

    def with_coeffs(self, coeffs: np.ndarray) -> "DGField":
        """Return a field on the same space with new coefficients."""
        return DGField(self.mesh, self.degree, coeffs)

    @classmethod
    def zeros(cls, mesh: Mesh, degree: int, num_components: int = 1) -> "DGField":
        """Create the zero field."""
        return cls(mesh, degree, np.zeros((mesh.num_elements, num_components, degree + 1)))


@dataclass(frozen=True)
class TraceValues:
    """One-sided limits at a node.

    Attributes:
        minus: Left-limit value(s)
        plus: Right-limit value(s)
    """
    minus: np.ndarray
    plus: np.ndarray

    @property
    def jump(self) -> np.ndarray:
        return self.minus - self.plus

    @property
    def average(self) -> np.ndarray:
        return 0.5 * (self.minus + self.plus)


def build_mesh(length: float, num_elements: int) -> Mesh:
    """Build a uniform mesh of [0, length].

    Args:
        length: Domain length L
        num_elements: Number of elements

    Returns:
        The mesh with node j at j*h

    Raises:
        ValueError: If length is not positive or there are no elements
    """
    if not length > 0:
        raise ValueError(f"Domain length must be positive, got {length}")
    if num_elements < 1:
        raise ValueError(f"At least one element is required, got {num_elements}")
    h = length / num_elements
    nodes = np.arange(num_elements + 1, dtype=float) * h
    nodes.setflags(write=False)
    return Mesh(float(length), int(num_elements), nodes)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule:
    """Return the n-point Gauss-Legendre rule on [-1, 1].

    Args:
        n: Number of points, between 1 and 32

    Returns:
        The quadrature rule

    Raises:
        ValueError: If n is out of range
    """
    if not 1 <= n <= MAX_QUADRATURE_POINTS:
        raise ValueError(f"Quadrature size must be in [1, {MAX_QUADRATURE_POINTS}], got {n}")
    points, weights = legendre.leggauss(n)
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points, weights)


def _orthonormal_legendre(degree: int, xi: np.ndarray, derivative: bool = False) -> np.ndarray:
    scale = np.sqrt((2.0 * np.arange(degree + 1) + 1.0) / 2.0)
    eye = np.eye(degree + 1)
    coeffs = legendre.legder(eye, axis=0) if derivative else eye
    return scale[:, None] * legendre.legval(np.asarray(xi, dtype=float), coeffs)


# Keyed by quadrature abscissae, so the cache stays small.
@lru_cache(maxsize=None)
def _basis_tables(degree: int, xi: Tuple[float, ...]) -> Tuple[np.ndarray, np.ndarray]:
    values = _orthonormal_legendre(degree, np.asarray(xi))
    derivs = _orthonormal_legendre(degree, np.asarray(xi), derivative=True)
    values.setflags(write=False)
    derivs.setflags(write=False)
    return values, derivs


def basis_values(degree: int, xi: np.ndarray) -> np.ndarray:
    """Orthonormal Legendre basis on the reference element.

    Args:
        degree: Polynomial degree k
        xi: Reference points

    Returns:
        Array of shape (degree+1, len(xi)) with phi_i(xi)
    """
    return _basis_tables(degree, tuple(np.atleast_1d(xi).tolist()))[0]


def basis_derivatives(degree: int, xi: np.ndarray) -> np.ndarray:
    """Reference derivatives d(phi_i)/d(xi), shape (degree+1, len(xi))."""
    return _basis_tables(degree, tuple(np.atleast_1d(xi).tolist()))[1]


def as_components(values: np.ndarray, num_components: int, shape: Tuple[int, ...]) -> np.ndarray:
    """Normalize pointwise values to shape (num_components,) + shape.

    Scalar functions may return arrays shaped like x or plain constants.
    """
    values = np.asarray(values, dtype=float)
    if num_components == 1 and values.shape == shape:
        return values[None]
    return np.broadcast_to(values, (num_components,) + shape)


def volume_quadrature(degree: int) -> QuadratureRule:
    """Quadrature used for volume and source integrals of nonlinear integrands.

    Uses 2k+4 points, at least 10 and at most 32; rational fluxes such as
    Q^2/A need the extra points at high degree.
    """
    return gauss_legendre(min(max(2 * degree + 4, 10), MAX_QUADRATURE_POINTS))


def l2_project(
    fn: PointFunction,
    mesh: Mesh,
    degree: int,
    num_components: int = 1,
    quad_points: Optional[int] = None
) -> DGField:
    """L2 projection of a pointwise function onto the DG space.

    Args:
        fn: Function of physical x; returns an array shaped like x for scalar
            fields or (m,) + x.shape for m-component fields
        mesh: Target mesh
        degree: Polynomial degree k
        num_components: Number of components m
        quad_points: Quadrature size, defaults to that of volume_quadrature

    Returns:
        The projected field
    """
    rule = gauss_legendre(quad_points) if quad_points else volume_quadrature(degree)
    x = mesh.to_physical(rule.points)
    values = as_components(fn(x), num_components, x.shape)
    phi = basis_values(degree, rule.points)
    # With the orthonormal basis the element mass matrix is (h/2) I.
    coeffs = np.einsum("meq,q,kq->emk", values, rule.weights, phi)
    return DGField(mesh, degree, coeffs)


def eval_field(field: DGField, element: int, ref_point: float) -> np.ndarray:
    """Evaluate a field on one element at a reference point.

    Args:
        field: The field
        element: Element index
        ref_point: Reference coordinate in [-1, 1]

    Returns:
        Array of shape (num_components,)

    Raises:
        IndexError: If the element index is out of range
        ValueError: If the reference point lies outside [-1, 1]
    """
    if not 0 <= element < field.mesh.num_elements:
        raise IndexError(
            f"Element index {element} out of range for {field.mesh.num_elements} elements"
        )
    if abs(ref_point) > 1.0:
        raise ValueError(f"Reference point {ref_point} outside [-1, 1]")
    phi = _orthonormal_legendre(field.degree, np.array([ref_point]))[:, 0]
    return field.coeffs[element] @ phi


def trace_values(field: DGField) -> Tuple[np.ndarray, np.ndarray]:
    """Left and right traces of every element.

    Returns:
        Tuple (left, right), each of shape (num_elements, num_components)
    """
    phi = basis_values(field.degree, np.array([-1.0, 1.0]))
    ends = field.coeffs @ phi
    return ends[..., 0], ends[..., 1]


def interior_traces(field: DGField, node: int) -> TraceValues:
    """Traces at an interior node.

    Args:
        field: The field
        node: Node index in 1..N

    Returns:
        Limits from the element on the left and the element on the right

    Raises:
        ValueError: If node is a boundary node
        IndexError: If node is outside the mesh
    """
    last = field.mesh.num_elements
    if node in (0, last):
        raise ValueError(f"Node {node} is a boundary node, use boundary_traces")
    if not 0 < node < last:
        raise IndexError(f"Node index {node} out of range for {last} elements")
    return TraceValues(
        minus=eval_field(field, node - 1, 1.0),
        plus=eval_field(field, node, -1.0),
    )


def boundary_traces(field: DGField, node: int, periodic: bool = True) -> TraceValues:
    """Traces at x_0 or x_{N+1}.

    Periodic meshes wrap around. Otherwise the exterior side repeats the
    interior trace, so the jump is zero.

    Raises:
        ValueError: If node is an interior node
    """
    last = field.mesh.num_elements
    if node not in (0, last):
        raise ValueError(f"Node {node} is not a boundary node")
    left_end = eval_field(field, 0, -1.0)
    right_end = eval_field(field, last - 1, 1.0)
    if periodic:
        return TraceValues(minus=right_end, plus=left_end)
    inner = left_end if node == 0 else right_end
    return TraceValues(minus=inner, plus=inner.copy())


def field_values(field: DGField, x: np.ndarray) -> np.ndarray:
    """Evaluate a field at physical points.

    Points on an interior node take the value from the element on the right;
    x = L belongs to the last element.

    Returns:
        Array of shape (num_components,) + x.shape
    """
    x = np.asarray(x, dtype=float)
    mesh = field.mesh
    element = np.clip(np.floor(x / mesh.h).astype(int), 0, mesh.num_elements - 1)
    xi = np.clip(2.0 * (x - mesh.nodes[element]) / mesh.h - 1.0, -1.0, 1.0)
    phi = _orthonormal_legendre(field.degree, xi.ravel())
    coeffs = field.coeffs[element.ravel()]
    values = np.einsum("pmk,kp->mp", coeffs, phi)
    return values.reshape((field.num_components,) + x.shape)


def l2_norm(field: DGField) -> np.ndarray:
    """Per-component L2 norm from the coefficients (Parseval)."""
    return np.sqrt(0.5 * field.mesh.h * np.sum(field.coeffs ** 2, axis=(0, 2)))


def l2_error(
    field: DGField,
    exact: PointFunction,
    quad_points: Optional[int] = None
) -> np.ndarray:
    """Per-component L2 error against a pointwise function.

    Args:
        field: Discrete solution
        exact: Reference function of physical x
        quad_points: Points per element, defaults to k+4

    Returns:
        Array of shape (num_components,)

    Raises:
        ValueError: If fewer than k+2 quadrature points are requested
    """
    n = quad_points if quad_points is not None else field.degree + 4
    if n < field.degree + 2:
        raise ValueError(f"Error quadrature needs at least {field.degree + 2} points, got {n}")
    rule = gauss_legendre(min(n, MAX_QUADRATURE_POINTS))
    mesh = field.mesh
    x = mesh.to_physical(rule.points)
    reference = as_components(exact(x), field.num_components, x.shape)
    approx = np.einsum("emk,kq->meq", field.coeffs, basis_values(field.degree, rule.points))
    squared = 0.5 * mesh.h * np.einsum("meq,q->m", (approx - reference) ** 2, rule.weights)
    return np.sqrt(squared)


def max_error(field: DGField, exact: PointFunction, samples_per_element: int = 50) -> np.ndarray:
    """Per-component max-norm error sampled on every element, boundaries included."""
    xi = np.linspace(-1.0, 1.0, samples_per_element)
    x = field.mesh.to_physical(xi)
    reference = as_components(exact(x), field.num_components, x.shape)
    approx = np.einsum("emk,kq->meq", field.coeffs, basis_values(field.degree, xi))
    return np.max(np.abs(approx - reference), axis=(1, 2))
