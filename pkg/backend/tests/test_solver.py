import numpy as np
import pytest

from errors import ConvergenceError, GridError, NearResonanceWarning, SingularInputError, UnderResolvedInterfaceError
from green.free import DomainMedium, ReferenceMedium, g0_tensor
from green.grid import DomainGrid
from green.solver import (
    KernelOperator,
    born_solve,
    build_operator,
    direct_solve,
    discretize,
    fields_at_sources,
    solve_all,
    solve_G,
    solve_G1,
    solve_Gamma,
)
from green.verification import (
    decomposition_residual,
    pointwise_helmholtz_residual,
    reality_check,
    reciprocity_check,
    reciprocity_pair,
)
from media.permittivity import PermittivityModel
from media.profiles import Ball, Slab, SpatialProfile


@pytest.fixture
def source(grid):
    return grid.place_source([-0.3, -0.3, -0.3])


def _relative(a, b) -> float:
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def test_vacuum_identity(vacuum_model):
    grid = DomainGrid(edge=1.0, n=8)
    source = grid.place_source([-0.3, -0.3, -0.3])
    solution = solve_all(vacuum_model, 0.9, grid, source)
    free = g0_tensor(grid.points, source, solution.reference)
    assert _relative(solution.G, free) <= 1e-12
    assert solution.operator.is_zero


@pytest.mark.parametrize("omega", [0.5, 1.0, 1.5])
def test_born_matches_direct_on_weak_ball(weak_glass, omega):
    grid = DomainGrid(edge=1.0, n=6)
    profile = SpatialProfile("vacuum", (Ball((0.0, 0.0, 0.0), 0.3, "weak"),), width=2.0 * grid.h)
    ball_model = PermittivityModel(profile, {"weak": weak_glass})
    source = grid.place_source([-0.3, -0.3, -0.3])
    direct = solve_all(ball_model, omega, grid, source, method="direct")
    assert direct.operator.spectral_radius < 1.0
    born = solve_all(ball_model, omega, grid, source, method="born", tol=1e-14, max_iter=2000,
                     operator=direct.operator)
    assert _relative(born.G, direct.G) <= 1e-8
    assert _relative(born.Gamma, direct.Gamma) <= 1e-8


def test_reality(ball_model, grid, source):
    assert reality_check(ball_model, 0.8, grid, source) <= 1e-12


def test_vacuum_reciprocity(vacuum_model, grid):
    r, s = np.array([0.6, 0.1, 0.0]), grid.place_source([-0.2, 0.1, 0.1])
    assert reciprocity_pair(vacuum_model, 1.1, grid, r, s) <= 1e-12


def test_homogeneous_reciprocity(glass, grid):
    model = PermittivityModel.homogeneous(glass)
    r, s = np.array([0.6, 0.1, 0.0]), grid.place_source([-0.2, 0.1, 0.1])
    assert reciprocity_pair(model, 0.95, grid, r, s) <= 1e-12


def test_reciprocity_check_transposes():
    G = np.arange(9.0).reshape(3, 3) + 1j
    assert reciprocity_check(G, G.T) == 0.0
    assert reciprocity_check(G, G) > 0.0


def test_under_resolved_interface(weak_glass, grid, source):
    profile = SpatialProfile("vacuum", (Ball((0.0, 0.0, 0.0), 0.3, "weak"),), width=grid.h)
    model = PermittivityModel(profile, {"weak": weak_glass})
    with pytest.raises(UnderResolvedInterfaceError):
        solve_all(model, 1.0, grid, source)


def test_divergent_born_series(grid):
    reference = ReferenceMedium.uniform(1.0, 1.0)
    size = 3 * grid.size
    operator = KernelOperator(
        omega=1.0,
        grid=grid,
        reference=reference,
        matrix=2.0 * np.eye(size, dtype=complex),
        eps_nodes=np.ones(grid.size, dtype=complex),
        grad_nodes=np.zeros((grid.size, 3), dtype=complex),
    )
    with pytest.raises(ConvergenceError):
        born_solve(operator, np.ones((size, 3)))


def test_born_iteration_budget(grid):
    size = 3 * grid.size
    operator = KernelOperator(
        omega=1.0,
        grid=grid,
        reference=ReferenceMedium.uniform(1.0, 1.0),
        matrix=0.5 * np.eye(size, dtype=complex),
        eps_nodes=np.ones(grid.size, dtype=complex),
        grad_nodes=np.zeros((grid.size, 3), dtype=complex),
    )
    with pytest.raises(ConvergenceError):
        born_solve(operator, np.ones((size, 3)), max_iter=3)
    solution, report = born_solve(operator, np.ones((size, 3)), tol=1e-10, keep_iterates=True)
    np.testing.assert_allclose(solution, 2.0, rtol=1e-9)
    assert len(report.iterates) == report.iterations + 1
    assert report.spectral_radius == pytest.approx(0.5)


def test_source_on_node_rejected(ball_model, grid):
    with pytest.raises(SingularInputError):
        solve_all(ball_model, 1.0, grid, grid.points[5])


def test_nystrom_extension_reproduces_nodes(ball_model, grid, source):
    solution = solve_all(ball_model, 1.0, grid, source)
    np.testing.assert_allclose(solution.field_at(grid.points[:8]), solution.G[:8], rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(solution.field_at(grid.points[:8], "G1"), solution.G1[:8], rtol=1e-10, atol=1e-14)
    with pytest.raises(ValueError):
        solution.field_at(grid.points[:1], "E")


def test_near_resonance_warning(ball_model, grid, source):
    operator = build_operator(ball_model, 1.0, grid, source)
    rhs = g0_tensor(grid.points, source, operator.reference).reshape(-1, 3)
    with pytest.warns(NearResonanceWarning):
        _, report = direct_solve(operator, rhs, warn_threshold=0.5)
    assert report.condition >= 1.0


def test_unknown_method(ball_model, grid, source):
    with pytest.raises(ValueError):
        solve_all(ball_model, 1.0, grid, source, method="gmres")


def test_single_field_wrappers(ball_model, grid, source):
    G, report = solve_G(ball_model, 0.7, grid, source)
    G1, _ = solve_G1(ball_model, 0.7, grid, source)
    Gamma, _ = solve_Gamma(ball_model, 0.7, grid, source)
    assert G.shape == G1.shape == (grid.size, 3, 3)
    assert Gamma.shape == (grid.size, 3)
    assert report.method == "direct"
    assert report.to_dict()["shifted_omega"] is None


def test_fields_at_sources_shapes(ball_model, grid):
    sources = [grid.place_source([-0.3, -0.3, -0.3]), grid.place_source([0.1, -0.3, 0.2])]
    fields = fields_at_sources(ball_model, 1.0, grid, np.array([0.7, 0.0, 0.0]), sources, which=("G", "G1", "Gamma"))
    assert fields["G"].shape == fields["G1"].shape == (2, 3, 3)
    assert fields["Gamma"].shape == (2, 3)


def test_vacuum_decomposition(vacuum_model):
    grid = DomainGrid(edge=1.0, n=6)
    solution = solve_all(vacuum_model, 1.0, grid, grid.place_source([-0.4, -0.4, -0.4]))
    assert decomposition_residual(solution, vacuum_model, min_distance=0.6) < 5e-2


def test_threaded_assembly_matches_serial(ball_model, grid):
    serial = discretize(ball_model, 0.9, grid)
    threaded = discretize(ball_model, 0.9, grid, n_jobs=2)
    np.testing.assert_array_equal(threaded.matrix, serial.matrix)
    assert serial.matrix.shape == (3 * grid.size, 3 * grid.size)


# reciprocity, taper and symmetry

EXTERIOR_PAIR = (np.array([0.7, 0.2, 0.1]), np.array([-0.6, -0.1, 0.15]))


@pytest.fixture
def half_spaces(weak_glass, glass) -> PermittivityModel:
    grid = DomainGrid(edge=2.0, n=8)
    profile = SpatialProfile("weak", (Slab(axis=2, lower=0.0, upper=np.inf, material="glass"),), width=2.0 * grid.h)
    return PermittivityModel(profile, {"weak": weak_glass, "glass": glass})


def test_dyadic_reciprocity_on_ball(ball_model, grid):
    r, s = EXTERIOR_PAIR
    assert reciprocity_pair(ball_model, 0.9, grid, r, s) <= 1e-9
    inside = grid.place_source([0.1, -0.05, 0.0])
    assert reciprocity_pair(ball_model, 0.9, grid, np.array([0.3, 0.2, -0.1]), inside) <= 1e-9


def test_dyadic_reciprocity_on_half_spaces(half_spaces):
    grid = DomainGrid(edge=2.0, n=8)
    r, s = grid.place_source([0.4, 0.1, 0.2]), grid.place_source([-0.4, 0.0, -0.3])
    operator = build_operator(half_spaces, 1.0, grid, form="dyadic")
    assert operator.diagonal_treatment["tapered"]
    assert reciprocity_pair(half_spaces, 1.0, grid, r, s) <= 1e-9


def test_gradient_form_reciprocity_gap_shrinks(ball_model):
    r, s = EXTERIOR_PAIR
    gaps = [reciprocity_pair(ball_model, 0.9, DomainGrid(edge=1.0, n=n), r, s, form="gradient") for n in (4, 8)]
    assert gaps[1] < gaps[0]


def test_dyadic_form_solves_G_only(ball_model, grid, source):
    solution = solve_all(ball_model, 0.9, grid, source, form="dyadic")
    assert solution.G1 is None and solution.Gamma is None
    with pytest.raises(ValueError):
        solution.field_at(grid.points[:1], "G1")
    at_source = ReferenceMedium.at_source(DomainMedium.of(ball_model, grid, 0.9), source)
    with pytest.raises(ValueError):
        discretize(ball_model, 0.9, grid, reference=at_source, form="dyadic")


def test_taper_matches_exterior_on_faces(half_spaces):
    grid = DomainGrid(edge=2.0, n=8)
    domain = DomainMedium.of(half_spaces, grid, 1.0)
    assert domain.tapered
    eps, grad = domain.sample(grid.face_points)
    np.testing.assert_allclose(eps, domain.exterior, rtol=1e-14)
    np.testing.assert_allclose(grad, 0.0, atol=1e-14)
    middle = np.array([[0.0, 0.0, 0.45], [0.1, 0.0, -0.45]])
    np.testing.assert_allclose(domain.evaluate(middle), half_spaces.evaluate(middle, 1.0), rtol=1e-14)


def test_bounded_scatterer_is_not_tapered(ball_model, grid):
    domain = DomainMedium.of(ball_model, grid, 1.0)
    assert not domain.tapered
    assert domain.exterior == 1.0
    assert build_operator(ball_model, 1.0, grid).reference.kind == "exterior"


def test_taper_needs_room():
    with pytest.raises(GridError):
        DomainGrid(edge=0.8, n=8).window(np.zeros((1, 3)), 0.5)


def test_half_space_mirror_symmetry(half_spaces):
    grid = DomainGrid(edge=2.0, n=8)
    mirror = np.diag([-1.0, 1.0, 1.0])
    s = grid.place_source([0.3, -0.2, 0.25])
    r = np.array([-0.5, 0.3, -0.4])
    forward = solve_all(half_spaces, 1.0, grid, s).field_at(r)[0]
    mirrored = solve_all(half_spaces, 1.0, grid, mirror @ s).field_at(mirror @ r)[0]
    assert _relative(mirrored, mirror @ forward @ mirror) <= 1e-10


# Born iterates and grid refinement


def _iterates_near_source(model, n, count=4):
    grid = DomainGrid(edge=1.0, n=n)
    source = grid.place_source([0.0, 0.0, 0.0])
    operator = build_operator(model, 1.0, grid, source)
    rhs = g0_tensor(grid.points, source, operator.reference).reshape(-1, 3)
    _, report = born_solve(operator, rhs, tol=1e-12, keep_iterates=True)
    nearest = int(np.argmin(np.linalg.norm(grid.points - source, axis=1)))
    return np.array([np.max(np.abs(term.reshape(grid.size, 3, 3)[nearest])) for term in report.iterates[:count]])


def test_born_iterates_regular_near_source(ball_model):
    growth = _iterates_near_source(ball_model, 8) / _iterates_near_source(ball_model, 4)
    # G0 grows as h^-3 at the nearest node; the third iterate stays bounded
    assert growth[0] > 4.0
    assert growth[1] < growth[0]
    assert growth[3] < 0.5 * growth[0]


def test_grid_convergence_away_from_source(weak_glass):
    profile = SpatialProfile("vacuum", (Ball((0.0, 0.0, 0.0), 0.25, "weak"),), width=0.6)
    model = PermittivityModel(profile, {"weak": weak_glass})
    s = np.array([-0.8, 0.1, 0.0])
    points = np.array([[0.9, 0.1, 0.05], [0.85, -0.2, 0.1], [0.1, 0.8, -0.1]])
    fields = [solve_all(model, 1.0, DomainGrid(edge=1.2, n=n), s).field_at(points) for n in (4, 6, 9)]
    coarse, fine = np.max(np.abs(fields[1] - fields[0])), np.max(np.abs(fields[2] - fields[1]))
    assert fine < coarse


def test_solved_helmholtz_residual_refines(ball_model):
    s = np.array([-0.8, 0.1, 0.0])
    points = np.array([[0.9, 0.1, 0.05], [0.85, -0.2, 0.1]])
    residuals = []
    for n in (4, 8):
        grid = DomainGrid(edge=1.0, n=n)
        solution = solve_all(ball_model, 1.0, grid, s)
        residuals.append(pointwise_helmholtz_residual(solution.field_at, 1.0, 1.0, points, step=grid.h))
    assert np.all(residuals[0] / residuals[1] >= 2.5)
