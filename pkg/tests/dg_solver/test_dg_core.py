"""Tests for the DG spatial operator."""
import numpy as np
import pytest

from dg_solver.dg_core import (
    BoundaryMode,
    ResidualField,
    cell_mean_total,
    dg_functional,
    dg_residual,
    residual_operator,
)
from dg_solver.errors import DomainError
from dg_solver.flux import Law, ScalarLaw
from dg_solver.meshbasis import DGField, Mesh, build_mesh, l2_error, l2_project
from dg_solver.problems import bloodflow_exact, bloodflow_law, burgers_law
from dg_solver.timestep import IntegratorState, forward_euler_step


@pytest.fixture
def mesh() -> Mesh:
    return build_mesh(1.0, 10)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


def random_field(rng: np.random.Generator, mesh: Mesh, degree: int, components: int = 1) -> DGField:
    return DGField(mesh, degree, rng.normal(size=(mesh.num_elements, components, degree + 1)))


def bloodflow_field(mesh: Mesh, degree: int) -> DGField:
    return l2_project(lambda x: bloodflow_exact(x, 0.3), mesh, degree, num_components=2)


def test_residual_shape_and_type(rng: np.random.Generator, mesh: Mesh) -> None:
    """Test the residual lives on the input space."""
    field = random_field(rng, mesh, 3)
    residual = dg_residual(burgers_law(), None, field, 0.0)
    assert isinstance(residual, ResidualField)
    assert residual.coeffs.shape == field.coeffs.shape


@pytest.mark.parametrize("bc", list(BoundaryMode))
def test_constant_state_is_steady(mesh: Mesh, bc: BoundaryMode) -> None:
    """Test a constant Burgers state has zero residual away from free boundaries."""
    field = l2_project(lambda x: np.full_like(x, 0.7), mesh, 2)
    residual = dg_residual(burgers_law(), None, field, 0.0, bc)
    interior = residual.coeffs if bc is BoundaryMode.PERIODIC else residual.coeffs[1:-1]
    np.testing.assert_allclose(interior, 0.0, atol=1e-12)


@pytest.mark.parametrize("bc", list(BoundaryMode))
def test_bloodflow_reference_state_is_steady(mesh: Mesh, bc: BoundaryMode) -> None:
    """Test the vessel at rest with A = A0 has zero residual everywhere."""
    field = l2_project(lambda x: np.stack([np.ones_like(x), np.zeros_like(x)]), mesh, 3, num_components=2)
    residual = dg_residual(bloodflow_law(), None, field, 0.0, bc)
    np.testing.assert_allclose(residual.coeffs, 0.0, atol=1e-13)


@pytest.mark.parametrize("law, components", [(burgers_law(), 1), (bloodflow_law(), 2)], ids=["burgers", "bloodflow"])
def test_free_boundaries_ignore_the_far_end(mesh: Mesh, law: Law, components: int) -> None:
    """Test the boundary elements see no data across x_0 or x_{N+1} in free mode."""
    def state(x: np.ndarray) -> np.ndarray:
        return bloodflow_exact(x, 0.3) if components == 2 else np.sin(2.0 * np.pi * x)

    field = l2_project(state, mesh, 2, num_components=components)
    for changed_element, watched_element in ((-1, 0), (0, -1)):
        coeffs = np.array(field.coeffs)
        coeffs[changed_element] *= 1.2
        changed = field.with_coeffs(coeffs)
        before, after = (
            dg_residual(law, None, f, 0.0, BoundaryMode.FREE).coeffs[watched_element] for f in (field, changed)
        )
        np.testing.assert_allclose(before, after, rtol=0, atol=1e-14)
        before, after = (
            dg_residual(law, None, f, 0.0, BoundaryMode.PERIODIC).coeffs[watched_element] for f in (field, changed)
        )
        assert not np.allclose(before, after)


@pytest.mark.parametrize("bc", list(BoundaryMode))
def test_discrete_conservation(rng: np.random.Generator, mesh: Mesh, bc: BoundaryMode) -> None:
    """Test the total integral is unchanged by a step without source."""
    field = random_field(rng, mesh, 2)
    law = burgers_law()
    assert abs(cell_mean_total(dg_residual(law, None, field, 0.0, bc))[0]) < 1e-12
    stepped = forward_euler_step(
        IntegratorState(current=field, t=0.0, dt=1e-3), residual_operator(law, bc=bc)
    )
    np.testing.assert_allclose(cell_mean_total(stepped.current), cell_mean_total(field), atol=1e-12)


@pytest.mark.parametrize("bc", list(BoundaryMode))
@pytest.mark.parametrize("law", [burgers_law(), bloodflow_law()], ids=["burgers", "bloodflow"])
def test_functional_matches_residual(
    rng: np.random.Generator, mesh: Mesh, law: Law, bc: BoundaryMode
) -> None:
    """Test sum_j H_j(u, psi) = int R psi for arbitrary test fields."""
    degree = 3
    if law.num_components == 1:
        field = random_field(rng, mesh, degree)
    else:
        field = bloodflow_field(mesh, degree)
    psi = random_field(rng, mesh, degree, law.num_components)
    forcing = lambda x, t: np.cos(x + t)
    residual = dg_residual(law, None, field, 0.2, bc, forcing)
    weak = dg_functional(law, None, field, psi, 0.2, bc, forcing)
    expected = 0.5 * mesh.h * np.einsum("emk,emk->m", residual.coeffs, psi.coeffs)
    np.testing.assert_allclose(weak, expected, rtol=1e-10, atol=1e-9)


def test_functional_rejects_other_space(rng: np.random.Generator, mesh: Mesh) -> None:
    """Test the test field must share the mesh and degree."""
    field = random_field(rng, mesh, 2)
    with pytest.raises(ValueError):
        dg_functional(burgers_law(), None, field, random_field(rng, mesh, 1), 0.0)


def test_residual_approximates_advection() -> None:
    """Test R(u) converges to -a u_x for linear advection."""
    speed = 1.5
    law = ScalarLaw(flux=lambda u: speed * u, dflux=lambda u: np.full_like(u, speed),
                    dflux_critical_points=(), label="advection")
    exact = lambda x: -speed * 2.0 * np.pi * np.cos(2.0 * np.pi * x)
    errors = []
    for n in (16, 32):
        mesh = build_mesh(1.0, n)
        field = l2_project(lambda x: np.sin(2.0 * np.pi * x), mesh, 2)
        errors.append(l2_error(dg_residual(law, None, field, 0.0), exact)[0])
    assert np.log2(errors[0] / errors[1]) > 1.5


def test_forcing_enters_as_source(mesh: Mesh) -> None:
    """Test a constant forcing on a constant state gives that constant as residual."""
    field = l2_project(lambda x: np.full_like(x, 1.0), mesh, 1)
    residual = dg_residual(burgers_law(), None, field, 0.0, forcing=lambda x, t: 3.0)
    np.testing.assert_allclose(residual.coeffs[:, 0, 0], 3.0 * np.sqrt(2.0), atol=1e-12)
    np.testing.assert_allclose(residual.coeffs[:, 0, 1], 0.0, atol=1e-12)


def test_inadmissible_element_is_reported(mesh: Mesh) -> None:
    """Test a negative area inside element 2 names that element."""
    coeffs = bloodflow_field(mesh, 1).coeffs.copy()
    coeffs[2, 0, :] = [-1.0, 0.0]
    field = DGField(mesh, 1, coeffs)
    with pytest.raises(DomainError) as excinfo:
        dg_residual(bloodflow_law(), None, field, 0.0)
    assert excinfo.value.element == 2


def test_residual_operator_binds_arguments(rng: np.random.Generator, mesh: Mesh) -> None:
    """Test the bound residual function equals a direct call."""
    field = random_field(rng, mesh, 2)
    forcing = lambda x, t: x * t
    bound = residual_operator(burgers_law(), bc=BoundaryMode.FREE, forcing=forcing)
    direct = dg_residual(burgers_law(), None, field, 0.5, BoundaryMode.FREE, forcing)
    np.testing.assert_array_equal(bound(field, 0.5).coeffs, direct.coeffs)
