import numpy as np
import pytest

from errors import FrequencyDomainError, GridError, QuadratureError, SingularInputError
from green.free import ReferenceMedium, free_dyadic_G0, free_G1_0, free_Gamma_0, scalar_g
from green.solver import fields_at_sources
from media.permittivity import VACUUM
from metrics.sumrule import (
    IMAGINARY_REGULATOR,
    analyticity_sweep,
    bulk_sum_rule,
    commutator_sum_rule,
    contour_samples,
    curl_comparison,
    curl_elimination_check,
    curl_stencil,
    fold_real_axis,
    imaginary_axis_quadrature,
    imaginary_axis_sweep,
    kernel_term,
    path_span,
    spacelike_suppression,
    sweep_G1,
    sweep_quadrature,
    unequal_time_kernel,
    unequal_time_quadrature,
    vacuum_bulk_ladder,
    vacuum_unequal_time,
)
from quadrature import FrequencyQuadrature, Rectangle

BULK_CUTOFFS = [10.0, 20.0, 50.0, 100.0]
SWEEP_CUTOFFS = [10.0, 20.0, 50.0, 100.0]
REAL_CUTOFFS = [1.0, 2.0, 5.0, 10.0]


def test_fold_real_axis():
    omega = np.array([1.0, 2.0])
    F = np.array([1.0 + 2.0j, 3.0 - 1.0j])
    np.testing.assert_allclose(fold_real_axis(F, omega), [4.0j, -4.0j])
    tensors = np.ones((2, 3, 3)) * 1j
    assert fold_real_axis(tensors, omega).shape == (2, 3, 3)
    with pytest.raises(FrequencyDomainError):
        fold_real_axis(F, np.array([0.0, 1.0]))


def test_bulk_vacuum_matches_closed_form():
    report = bulk_sum_rule(1.0, VACUUM, BULK_CUTOFFS)
    np.testing.assert_allclose(report.values, vacuum_bulk_ladder(1.0, BULK_CUTOFFS), rtol=1e-6)
    assert report.decay_exponent >= 0.95
    assert report.passed
    assert report.monotone


def test_bulk_lorentz_medium(glass):
    report = bulk_sum_rule(1.2, glass, BULK_CUTOFFS)
    assert report.passed
    assert report.notes["material"] == "glass"


def test_bulk_rejects_coincident_points():
    with pytest.raises(SingularInputError):
        bulk_sum_rule(0.0, VACUUM, BULK_CUTOFFS)


def test_bulk_rejects_short_ladder():
    with pytest.raises(QuadratureError):
        bulk_sum_rule(1.0, VACUUM, [10.0, 20.0, 50.0])


@pytest.fixture
def vacuum_sweep(vacuum_model, grid, pair):
    r, r_prime = pair
    distance = float(np.linalg.norm(r - r_prime))
    return imaginary_axis_sweep(vacuum_model, grid, r, r_prime, imaginary_axis_quadrature(distance))


def test_vacuum_commutator_sum_rule(vacuum_model, grid, pair, vacuum_sweep):
    r, r_prime = pair
    distance = float(np.linalg.norm(r - r_prime))
    commutator = commutator_sum_rule(vacuum_model, grid, r, r_prime, SWEEP_CUTOFFS, sweep=vacuum_sweep)
    kernel = kernel_term(vacuum_model, grid, r, r_prime, SWEEP_CUTOFFS, sweep=vacuum_sweep)
    exact = vacuum_bulk_ladder(distance, SWEEP_CUTOFFS)
    np.testing.assert_allclose(commutator.values, exact[:, None, None] * np.eye(3), rtol=1e-6, atol=1e-12 * abs(exact[0]))
    assert commutator.passed
    assert commutator.decay_exponent == pytest.approx(1.0, abs=1e-2)
    assert commutator.notes["nodes"] == 48
    assert commutator.notes["axis"] == "imaginary"
    assert not np.any(kernel.values)
    assert kernel.passed


def test_default_sweep_is_imaginary_axis(vacuum_model, grid, pair):
    r, r_prime = pair
    report = commutator_sum_rule(vacuum_model, grid, r, r_prime, SWEEP_CUTOFFS)
    assert report.notes["axis"] == "imaginary"
    assert report.notes["regulator"] == IMAGINARY_REGULATOR


@pytest.mark.parametrize("fixture", ["ball_model", "amplifying_ball_model"])
def test_scatterer_commutator_and_kernel_term(request, fixture, grid, pair):
    model = request.getfixturevalue(fixture)
    r, r_prime = pair
    sweep = imaginary_axis_sweep(model, grid, r, r_prime, imaginary_axis_quadrature(float(np.linalg.norm(r - r_prime))))
    commutator = commutator_sum_rule(model, grid, r, r_prime, SWEEP_CUTOFFS, sweep=sweep)
    kernel = kernel_term(model, grid, r, r_prime, SWEEP_CUTOFFS, sweep=sweep)
    assert commutator.passed
    assert commutator.decay_exponent >= 0.95
    assert np.any(kernel.values)
    assert kernel.passed


def test_laguerre_rule_on_damped_moments():
    quadrature = imaginary_axis_quadrature(1.2)
    assert len(quadrature) == 48
    a, eta = 1.2, 0.05
    y = quadrature.nodes
    assert quadrature.integrate(y * np.exp(-a * y)) == pytest.approx(1.0 / a**2, rel=1e-12)
    assert quadrature.integrate(y * np.exp(-a * y) * np.sin(eta * y)) == pytest.approx(
        2.0 * a * eta / (a**2 + eta**2) ** 2, rel=1e-10
    )
    with pytest.raises(SingularInputError):
        imaginary_axis_quadrature(0.0)


@pytest.fixture
def real_sweep(vacuum_model, grid, pair):
    r, r_prime = pair
    quadrature = sweep_quadrature(REAL_CUTOFFS, path_span(grid, r, r_prime), n_panels=8)
    return sweep_G1(vacuum_model, grid, r, r_prime, quadrature)


def test_real_axis_sweep_agrees_with_rotation(vacuum_model, grid, pair, real_sweep):
    r, r_prime = pair
    distance = float(np.linalg.norm(r - r_prime))
    real = commutator_sum_rule(vacuum_model, grid, r, r_prime, REAL_CUTOFFS, sweep=real_sweep)
    assert real.notes["axis"] == "real"
    np.testing.assert_allclose(real.values[:, 0, 0], vacuum_bulk_ladder(distance, REAL_CUTOFFS), rtol=1e-4)
    assert not real_sweep.shifted.any()


def test_sweep_samples_are_free_tensor(real_sweep):
    omega = real_sweep.nodes[7]
    expected = free_G1_0(real_sweep.r, real_sweep.r_prime, ReferenceMedium.uniform(1.0, omega)).value
    np.testing.assert_allclose(real_sweep.G1[7], expected, rtol=1e-12)


def test_unequal_time_needs_real_axis(vacuum_model, grid, pair, vacuum_sweep):
    r, r_prime = pair
    with pytest.raises(QuadratureError):
        unequal_time_kernel(vacuum_model, grid, r, r_prime, 0.0, 10.0, sweep=vacuum_sweep)


def test_commutator_needs_separated_points(vacuum_model, grid):
    r = np.array([0.3, 0.0, 0.0])
    with pytest.raises(GridError):
        commutator_sum_rule(vacuum_model, grid, r, r + 0.1, SWEEP_CUTOFFS)


def test_unequal_time_vacuum(vacuum_model, grid, pair):
    r, r_prime = pair
    distance = float(np.linalg.norm(r - r_prime))
    sigma = 10.0 / distance
    taus = np.array([0.0, 0.3, 0.6, 1.0, 1.2, 1.5, 2.0]) * distance
    span = path_span(grid, r, r_prime)
    quadrature = unequal_time_quadrature(sigma, 2.0 * distance, span)
    sweep = sweep_G1(vacuum_model, grid, r, r_prime, quadrature)

    values = unequal_time_kernel(vacuum_model, grid, r, r_prime, taus, sigma, sweep=sweep)
    exact = vacuum_unequal_time(distance, taus, sigma)
    assert values.shape == (taus.size, 3, 3)
    np.testing.assert_allclose(values[:, 0, 0], exact, rtol=1e-6, atol=1e-9 * np.max(np.abs(exact)))

    mirrored = unequal_time_kernel(vacuum_model, grid, r, r_prime, -taus, sigma, sweep=sweep)
    np.testing.assert_allclose(mirrored, values, rtol=1e-12, atol=1e-14 * np.max(np.abs(values)))
    assert unequal_time_kernel(vacuum_model, grid, r, r_prime, 0.0, sigma, sweep=sweep).shape == (3, 3)

    suppression = spacelike_suppression(
        lambda t: unequal_time_kernel(vacuum_model, grid, r, r_prime, t, sigma, sweep=sweep), distance, sigma
    )
    assert suppression >= 20.0


def test_unequal_time_sigma_too_large(vacuum_model, grid, pair):
    r, r_prime = pair
    narrow = FrequencyQuadrature(omega_min=0.01, omega_max=30.0, n_panels=8, max_panel_width=1.0, tail_exponent=None)
    with pytest.raises(QuadratureError):
        unequal_time_kernel(vacuum_model, grid, r, r_prime, 0.5, 10.0, quadrature=narrow)
    with pytest.raises(QuadratureError):
        unequal_time_kernel(vacuum_model, grid, r, r_prime, 0.5, 0.0)


def test_unequal_time_coarse_panels(vacuum_model, grid, pair):
    r, r_prime = pair
    wide = FrequencyQuadrature(omega_min=0.01, omega_max=100.0, n_panels=2, tail_exponent=None)
    with pytest.raises(QuadratureError):
        unequal_time_kernel(vacuum_model, grid, r, r_prime, 5.0, 10.0, quadrature=wide)


def _closed_form_samplers(r, omega):
    reference = ReferenceMedium.uniform(1.0, omega)

    def G_at(sources):
        return np.stack([free_dyadic_G0(r, s, reference).value for s in sources])

    def G1_at(sources):
        return np.stack([free_G1_0(r, s, reference).value for s in sources])

    def gamma_at(sources):
        return np.stack([free_Gamma_0(r, s, reference) for s in sources])

    return G_at, G1_at, gamma_at


def test_curl_stencil_layout():
    stencil = curl_stencil(np.zeros(3), 0.2)
    assert stencil.shape == (24, 3)
    np.testing.assert_allclose(stencil[0], [0.2, 0.1, 0.0])
    assert len({tuple(point) for point in stencil}) == 24


def test_curl_residual_refines_on_closed_form():
    r = np.array([0.8, 0.3, -0.2])
    source = np.array([-0.4, 0.0, 0.1])
    _, _, gamma_at = _closed_form_samplers(r, 1.0)
    coarse = curl_elimination_check(gamma_at, source, 0.1)
    fine = curl_elimination_check(gamma_at, source, 0.05)
    assert coarse > 0
    assert coarse / fine >= 3.0


def test_curl_comparison_on_closed_form():
    r = np.array([0.8, 0.3, -0.2])
    source = np.array([-0.4, 0.0, 0.1])
    report = curl_comparison(*_closed_form_samplers(r, 1.0), source, 0.01)
    assert report.relative_residual <= 1e-2
    assert report.curl_difference <= 1e-2 * report.curl_G1
    assert set(report.to_dict()) == {"residual", "curl_G1", "curl_difference", "relative_residual"}


def _solved_samplers(model, grid, r, omega):
    def sampler(which):
        def sample(sources):
            return fields_at_sources(model, omega, grid, r, sources, which=(which,))[which]
        return sample

    return sampler("G"), sampler("G1"), sampler("Gamma")


@pytest.mark.parametrize("fixture", ["ball_model", "amplifying_ball_model"])
def test_solved_curl_refines(request, fixture, grid):
    model = request.getfixturevalue(fixture)
    r = np.array([0.8, 0.3, -0.2])
    source = np.array([-0.8, 0.1, 0.05])
    G_at, G1_at, gamma_at = _solved_samplers(model, grid, r, 1.0)

    coarse = curl_elimination_check(gamma_at, source, 0.1)
    fine = curl_elimination_check(gamma_at, source, 0.05)
    assert coarse > 0
    assert coarse / fine >= 3.0

    report = curl_comparison(G_at, G1_at, gamma_at, source, grid.h / 16.0)
    assert report.residual <= 1e-2 * report.curl_G1
    assert report.curl_difference <= 1e-2 * report.curl_G1


def test_analyticity_sweep_closed_forms():
    rectangle = Rectangle(0.2, 2.0, 0.05, 1.0)
    z, dz = rectangle.nodes(400)
    entire = z * scalar_g(1.2, z)
    assert analyticity_sweep(z, dz, entire, rectangle.perimeter) <= 1e-10
    pole = 1.0 / (z - (1.0 + 0.5j))
    assert analyticity_sweep(z, dz, pole, rectangle.perimeter) > 1e-2


def test_analyticity_sweep_rejects_real_axis():
    z, dz = Rectangle(0.2, 2.0, 0.0, 1.0).nodes(40)
    with pytest.raises(FrequencyDomainError):
        analyticity_sweep(z, dz, np.ones_like(z), 5.6)


def test_vacuum_contour_samples(vacuum_model, grid, pair):
    r, s = pair
    rectangle = Rectangle(0.2, 2.0, 0.05, 1.0)
    z, dz, values = contour_samples(vacuum_model, grid, r, s, rectangle, n_points=80)
    assert values.shape == (80, 3, 3)
    assert analyticity_sweep(z, dz, values, rectangle.perimeter) <= 1e-4

    _, _, raised = contour_samples(vacuum_model, grid, r, s, rectangle.shifted_up(1.0), n_points=80)
    assert np.max(np.abs(raised)) < np.max(np.abs(values))


def test_ball_contour_samples_are_analytic(ball_model, grid, pair):
    r, s = pair
    # the bottom edge passes 0.1 above the oscillator poles
    rectangle = Rectangle(0.5, 1.5, 0.05, 1.0)
    z, dz, values = contour_samples(ball_model, grid, r, s, rectangle, n_points=200)
    assert analyticity_sweep(z, dz, values, rectangle.perimeter) <= 1e-5
