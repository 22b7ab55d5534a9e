"""Frequency-integral identities of the Green tensor.

All integrals over the whole real axis are folded onto omega > 0 with the
reality condition F(-omega) = conj F(omega):

    int_{-inf}^{inf} (omega/c^2) F dw = 2i int_0^inf (omega/c^2) Im F dw

Sharp cutoffs do not converge pointwise for these oscillatory integrands,
so every ladder rung uses the Abel window exp(-|omega|/cutoff), which is
the omega + i*eta prescription in disguise. One set of samples serves every
rung.

The solver-backed ladders default to the imaginary axis. Rotating each
half-axis there turns the windowed integral into

    (2i/c^2) int_0^inf y F(i y) sin(y / cutoff) dy

with a real, exponentially decaying F(i y), which a 48-node Laguerre rule
integrates to rounding.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from joblib import Parallel, delayed

from config import CONDITION_WARN_THRESHOLD, POLE_SHIFT_FRACTION
from errors import FrequencyDomainError, GridError, QuadratureError, SingularInputError
from green.free import g1_0_tensor, scalar_g, wave_number
from green.grid import DomainGrid
from green.solver import solve_all
from media.permittivity import Material, PermittivityModel
from metrics.ladder import SumRuleReport, validate_ladder
from quadrature import FrequencyQuadrature, LaguerreQuadrature, Rectangle
from units import NATURAL, Constants

logger = logging.getLogger(__name__)

REGULATOR = "abel: exp(-omega/cutoff), folded onto omega > 0"
IMAGINARY_REGULATOR = "abel: exp(-|omega|/cutoff), rotated onto omega = i y"
_LEVI_CIVITA = np.zeros((3, 3, 3))
for _k, _m, _j in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_k, _m, _j] = 1.0
    _LEVI_CIVITA[_k, _j, _m] = -1.0


def _column(array: np.ndarray, ndim: int) -> np.ndarray:
    return np.asarray(array).reshape((-1,) + (1,) * (ndim - 1))


def fold_real_axis(F, omega, constants: Constants = NATURAL) -> np.ndarray:
    """Half-axis integrand 2i (omega/c^2) Im F for samples on omega > 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise FrequencyDomainError("fold_real_axis takes samples on omega > 0 only")
    F = np.asarray(F, dtype=complex)
    return 2j * _column(omega, F.ndim) / constants.c**2 * F.imag


def abel_window(omega, cutoff: float) -> np.ndarray:
    return np.exp(-np.asarray(omega, dtype=float) / cutoff)


def regulated_ladder(quadrature: FrequencyQuadrature, folded: np.ndarray, cutoffs) -> np.ndarray:
    folded = np.asarray(folded)
    return np.stack(
        [quadrature.integrate(folded * _column(abel_window(quadrature.nodes, cutoff), folded.ndim)) for cutoff in cutoffs]
    )


def _integrand_scale(omega: np.ndarray, F: np.ndarray, cutoff: float, constants: Constants) -> float:
    """max |(omega/c^2) F| e^{-omega/cutoff} times the cutoff: the size of an uncancelled rung."""
    weighted = np.abs(F).reshape(len(omega), -1).max(axis=1) * omega / constants.c**2 * abel_window(omega, cutoff)
    return float(np.max(weighted) * cutoff)


# =============================================================================
# Bulk relation
# =============================================================================


def vacuum_bulk_ladder(distance: float, cutoffs, constants: Constants = NATURAL) -> np.ndarray:
    """Closed form of the Abel-regulated vacuum integral at each cutoff."""
    eta = 1.0 / np.asarray(cutoffs, dtype=float)
    a = distance / constants.c
    return 2j / (4.0 * np.pi * distance * constants.c**2) * 2.0 * eta * a / (eta**2 + a**2) ** 2


def bulk_quadrature(distance: float, cutoffs, constants: Constants = NATURAL) -> FrequencyQuadrature:
    cutoffs = np.asarray(cutoffs, dtype=float)
    return FrequencyQuadrature(
        omega_min=1e-3 * cutoffs[0],
        omega_max=40.0 * cutoffs[-1],
        n_panels=256,
        max_panel_width=np.pi * constants.c / distance,
        tail_exponent=None,
    )


def bulk_sum_rule(
    distance: float,
    material: Material,
    cutoffs,
    constants: Constants = NATURAL,
    quadrature: FrequencyQuadrature | None = None,
    tolerance: float = 1e-3,
) -> SumRuleReport:
    """int (omega/c^2) g(distance, omega) on the cutoff ladder, homogeneous medium.

    The pass scale is the magnitude of the first rung.
    """
    if not distance > 0:
        raise SingularInputError("the bulk relation is checked off the diagonal only (distance > 0)")
    cutoffs = validate_ladder(cutoffs)
    quadrature = quadrature or bulk_quadrature(distance, cutoffs, constants)
    nodes = quadrature.nodes
    q = wave_number(nodes, material.permittivity(nodes), constants.c)
    folded = fold_real_axis(scalar_g(distance, q), nodes, constants)
    values = regulated_ladder(quadrature, folded, cutoffs)
    return SumRuleReport.from_ladder(
        "bulk",
        cutoffs,
        values,
        scale=float(abs(values[0])),
        tolerance=tolerance,
        notes={"distance": distance, "material": material.name, "regulator": REGULATOR, "nodes": len(quadrature)},
    )


# =============================================================================
# Solver-backed sweeps
# =============================================================================


@dataclass
class FrequencySweep:
    """G1(r, r') and the kernel term (K G1)(r, r') at every quadrature node.

    On the imaginary axis ``nodes`` holds y for omega = i y.
    """

    quadrature: FrequencyQuadrature | LaguerreQuadrature
    r: np.ndarray
    r_prime: np.ndarray
    G1: np.ndarray
    kernel_term: np.ndarray
    shifted: np.ndarray
    path_span: float
    axis: str = "real"

    @property
    def nodes(self) -> np.ndarray:
        return self.quadrature.nodes


def path_span(grid: DomainGrid, r, r_prime) -> float:
    """Longest field-node-source path, the fastest phase rate any sample carries."""
    r = np.asarray(r, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)
    paths = np.linalg.norm(grid.points - r, axis=1) + np.linalg.norm(grid.points - r_prime, axis=1)
    return float(max(np.max(paths), np.linalg.norm(r - r_prime)))


def sweep_quadrature(cutoffs, span: float, constants: Constants = NATURAL, n_panels: int = 24) -> FrequencyQuadrature:
    cutoffs = np.asarray(cutoffs, dtype=float)
    return FrequencyQuadrature(
        omega_min=1e-2 * cutoffs[0],
        omega_max=40.0 * cutoffs[-1],
        n_panels=n_panels,
        max_panel_width=2.0 * np.pi * constants.c / span,
        tail_exponent=None,
    )


def imaginary_axis_quadrature(distance: float, constants: Constants = NATURAL, order: int = 48) -> LaguerreQuadrature:
    """Laguerre rule matched to the slowest decay exp(-y |r - r'| / c) of G1(i y)."""
    if not distance > 0:
        raise SingularInputError("the imaginary-axis sweep needs r != r'")
    return LaguerreQuadrature(decay=distance / constants.c, order=order)


def _G1_at(model, grid, r, r_prime, omega, constants, solve_options):
    solution = solve_all(model, omega, grid, r_prime, constants=constants, **solve_options)
    term = (solution.operator.field_rows(r) @ solution.G1.reshape(-1, 3)).reshape(3, 3)
    free = g1_0_tensor(r, r_prime, solution.reference)[0]
    return solution, free + term, term


def sweep_G1(
    model: PermittivityModel,
    grid: DomainGrid,
    r,
    r_prime,
    quadrature: FrequencyQuadrature,
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    **solve_options,
) -> FrequencySweep:
    """Solve for G1 with the source at r' at every real node and read it at r.

    A node whose condition estimate trips the near-resonance threshold is
    re-solved at omega + i*eta, eta a small fraction of the lowest resonance.
    """
    r = np.asarray(r, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)
    eta = POLE_SHIFT_FRACTION * model.resonance_scale()

    def one(omega: float):
        solution, value, term = _G1_at(model, grid, r, r_prime, omega, constants, solve_options)
        shifted = (solution.report.condition or 0.0) > CONDITION_WARN_THRESHOLD
        if shifted:
            logger.info("near-real pole at omega=%.6g, shifting the node to omega + %.3g i", omega, eta)
            _, value, term = _G1_at(model, grid, r, r_prime, omega + 1j * eta, constants, solve_options)
        return value, term, shifted

    results = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(one)(omega) for omega in quadrature.nodes)
    G1, kernel_term, shifted = zip(*results)
    shifted = np.asarray(shifted, dtype=bool)
    if shifted.any():
        logger.warning("%d of %d frequency nodes shifted off the real axis", shifted.sum(), shifted.size)
    return FrequencySweep(
        quadrature=quadrature,
        r=r,
        r_prime=r_prime,
        G1=np.stack(G1),
        kernel_term=np.stack(kernel_term),
        shifted=shifted,
        path_span=path_span(grid, r, r_prime),
    )


def imaginary_axis_sweep(
    model: PermittivityModel,
    grid: DomainGrid,
    r,
    r_prime,
    quadrature: LaguerreQuadrature,
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    **solve_options,
) -> FrequencySweep:
    """G1(r, r', i y) and its kernel term at every Laguerre node y.

    The permittivity is real on the positive imaginary axis and so are the
    samples, up to rounding. No node is ever close to a pole.
    """
    r = np.asarray(r, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)

    def one(y: float):
        _, value, term = _G1_at(model, grid, r, r_prime, 1j * y, constants, solve_options)
        return value, term

    results = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(one)(y) for y in quadrature.nodes)
    G1, kernel_term = zip(*results)
    logger.debug("imaginary-axis sweep: %d nodes up to y=%.4g", len(quadrature), quadrature.nodes[-1])
    return FrequencySweep(
        quadrature=quadrature,
        r=r,
        r_prime=r_prime,
        G1=np.stack(G1),
        kernel_term=np.stack(kernel_term),
        shifted=np.zeros(len(quadrature), dtype=bool),
        path_span=path_span(grid, r, r_prime),
        axis="imaginary",
    )


def _check_separation(grid: DomainGrid, r, r_prime) -> None:
    separation = float(np.linalg.norm(np.asarray(r, dtype=float) - np.asarray(r_prime, dtype=float)))
    if separation < 3.0 * grid.h:
        raise GridError(f"points must be at least 3h = {3.0 * grid.h:g} apart, got {separation:g}")


def imaginary_axis_ladder(quadrature: LaguerreQuadrature, samples: np.ndarray, cutoffs, constants: Constants = NATURAL):
    """(2i/c^2) int_0^inf y F(i y) sin(y / cutoff) dy at every cutoff.

    Equal to the Abel-regulated real-axis integral of (omega/c^2) F: rotate
    each half-axis onto the imaginary axis, where omega F is holomorphic and
    decays.
    """
    samples = np.asarray(samples)
    y = quadrature.nodes
    weighted = 2j / constants.c**2 * _column(y, samples.ndim) * samples
    return np.stack([quadrature.integrate(weighted * _column(np.sin(y / cutoff), samples.ndim)) for cutoff in cutoffs])


def _imaginary_scale(y: np.ndarray, F: np.ndarray, cutoff: float, constants: Constants) -> float:
    """max_y y |F(i y)| / c^2 times the cutoff."""
    weighted = np.abs(F).reshape(len(y), -1).max(axis=1) * y / constants.c**2
    return float(np.max(weighted) * cutoff)


def _sweep_ladder(
    name: str,
    samples: np.ndarray,
    sweep: FrequencySweep,
    cutoffs,
    tolerance: float,
    constants: Constants,
) -> SumRuleReport:
    cutoffs = validate_ladder(cutoffs)
    nodes = sweep.nodes
    if sweep.axis == "imaginary":
        values = imaginary_axis_ladder(sweep.quadrature, samples, cutoffs, constants)
        scale = _imaginary_scale(nodes, samples, cutoffs[0], constants)
        regulator = IMAGINARY_REGULATOR
    else:
        folded = fold_real_axis(samples, nodes, constants)
        values = regulated_ladder(sweep.quadrature, folded, cutoffs)
        scale = _integrand_scale(nodes, samples, cutoffs[0], constants)
        regulator = REGULATOR
    return SumRuleReport.from_ladder(
        name,
        cutoffs,
        values,
        scale=scale,
        tolerance=tolerance,
        notes={
            "r": sweep.r.tolist(),
            "r_prime": sweep.r_prime.tolist(),
            "regulator": regulator,
            "axis": sweep.axis,
            "nodes": int(nodes.size),
            "shifted_nodes": int(sweep.shifted.sum()),
        },
    )


def _ensure_sweep(model, grid, r, r_prime, cutoffs, quadrature, sweep, constants, n_jobs, solve_options):
    """The given sweep, else a real-axis one for a FrequencyQuadrature, else the imaginary axis."""
    if sweep is not None:
        return sweep
    if isinstance(quadrature, FrequencyQuadrature):
        return sweep_G1(model, grid, r, r_prime, quadrature, constants=constants, n_jobs=n_jobs, **solve_options)
    if quadrature is None:
        distance = float(np.linalg.norm(np.asarray(r, dtype=float) - np.asarray(r_prime, dtype=float)))
        quadrature = imaginary_axis_quadrature(distance, constants)
    return imaginary_axis_sweep(model, grid, r, r_prime, quadrature, constants=constants, n_jobs=n_jobs, **solve_options)


def kernel_term(
    model: PermittivityModel,
    grid: DomainGrid,
    r,
    r_prime,
    cutoffs,
    quadrature: FrequencyQuadrature | LaguerreQuadrature | None = None,
    sweep: FrequencySweep | None = None,
    tolerance: float = 1e-3,
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    **solve_options,
) -> SumRuleReport:
    """int dw int d^3v (omega/c^2) K(r, v) G1(v, r') on the cutoff ladder."""
    sweep = _ensure_sweep(model, grid, r, r_prime, cutoffs, quadrature, sweep, constants, n_jobs, solve_options)
    return _sweep_ladder("kernel_term", sweep.kernel_term, sweep, cutoffs, tolerance, constants)


def commutator_sum_rule(
    model: PermittivityModel,
    grid: DomainGrid,
    r,
    r_prime,
    cutoffs,
    quadrature: FrequencyQuadrature | LaguerreQuadrature | None = None,
    sweep: FrequencySweep | None = None,
    tolerance: float = 1e-3,
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    **solve_options,
) -> SumRuleReport:
    """int dw (omega/c^2) G1(r, r') on the cutoff ladder; tends to 0 for r != r'."""
    _check_separation(grid, r, r_prime)
    sweep = _ensure_sweep(model, grid, r, r_prime, cutoffs, quadrature, sweep, constants, n_jobs, solve_options)
    return _sweep_ladder("commutator", sweep.G1, sweep, cutoffs, tolerance, constants)


# =============================================================================
# Curl elimination
# =============================================================================


@dataclass
class CurlReport:
    residual: float
    curl_G1: float
    curl_difference: float

    @property
    def relative_residual(self) -> float:
        return self.residual / self.curl_G1 if self.curl_G1 else 0.0

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "curl_G1": self.curl_G1,
            "curl_difference": self.curl_difference,
            "relative_residual": self.relative_residual,
        }


def curl_stencil(source, step: float) -> np.ndarray:
    """The 24 source positions s +- step e_m +- (step/2) e_j, m != j, in a fixed order."""
    source = np.asarray(source, dtype=float)
    unit = np.eye(3)
    points = []
    for m in range(3):
        for j in range(3):
            if m == j:
                continue
            for sm in (1.0, -1.0):
                for sj in (1.0, -1.0):
                    points.append(source + sm * step * unit[m] + sj * 0.5 * step * unit[j])
    return np.array(points)


def curl_elimination_check(gamma_at: Callable[[np.ndarray], np.ndarray], source, step: float) -> float:
    """max |eps_kmj D_m D_j Gamma_i| at the source: the curl of the discrete G2 = d_j^s Gamma.

    ``gamma_at`` maps source positions (S, 3) to Gamma(r; s) at a fixed
    field point, shape (S, 3). D_j uses +-step/2 displacements, the curl
    +-step, so the two difference operators do not commute exactly and the
    residual is O(step^2) rather than zero by construction.
    """
    values = np.asarray(gamma_at(curl_stencil(source, step)))
    index = 0
    lookup = {}
    for m in range(3):
        for j in range(3):
            if m == j:
                continue
            for sm in (1, -1):
                for sj in (1, -1):
                    lookup[(m, j, sm, sj)] = values[index]
                    index += 1
    curl = np.zeros((3, 3), dtype=complex)
    for k in range(3):
        for m in range(3):
            for j in range(3):
                if _LEVI_CIVITA[k, m, j] == 0:
                    continue
                g2_plus = (lookup[(m, j, 1, 1)] - lookup[(m, j, 1, -1)]) / step
                g2_minus = (lookup[(m, j, -1, 1)] - lookup[(m, j, -1, -1)]) / step
                curl[k] += _LEVI_CIVITA[k, m, j] * (g2_plus - g2_minus) / (2.0 * step)
    return float(np.max(np.abs(curl)))


def _tensor_curl(tensor_at: Callable[[np.ndarray], np.ndarray], source, step: float) -> np.ndarray:
    """eps_kmj D_m X_ij with +-step central differences in the source point; result [k, i]."""
    source = np.asarray(source, dtype=float)
    unit = np.eye(3)
    points = np.concatenate([[source + step * unit[m], source - step * unit[m]] for m in range(3)])
    values = np.asarray(tensor_at(points))
    derivative = np.stack([(values[2 * m] - values[2 * m + 1]) / (2.0 * step) for m in range(3)])
    return np.einsum("kmj,mij->ki", _LEVI_CIVITA, derivative)


def curl_comparison(
    G_at: Callable[[np.ndarray], np.ndarray],
    G1_at: Callable[[np.ndarray], np.ndarray],
    gamma_at: Callable[[np.ndarray], np.ndarray],
    source,
    step: float,
) -> CurlReport:
    curl_G = _tensor_curl(G_at, source, step)
    curl_G1 = _tensor_curl(G1_at, source, step)
    return CurlReport(
        residual=curl_elimination_check(gamma_at, source, step),
        curl_G1=float(np.max(np.abs(curl_G1))),
        curl_difference=float(np.max(np.abs(curl_G - curl_G1))),
    )


# =============================================================================
# Unequal-time kernel
# =============================================================================


def vacuum_unequal_time(distance: float, tau, sigma: float, constants: Constants = NATURAL) -> np.ndarray:
    """Closed form of the Gaussian-regulated vacuum kernel (diagonal entry)."""
    tau = np.asarray(tau, dtype=float)
    a = distance / constants.c
    prefactor = 2j / (4.0 * np.pi * distance * constants.c**2) * 0.5 * np.sqrt(np.pi / 2.0) * sigma**3
    return prefactor * (
        (a + tau) * np.exp(-0.5 * sigma**2 * (a + tau) ** 2) + (a - tau) * np.exp(-0.5 * sigma**2 * (a - tau) ** 2)
    )


def unequal_time_quadrature(sigma: float, tau_max: float, span: float, constants: Constants = NATURAL) -> FrequencyQuadrature:
    return FrequencyQuadrature(
        omega_min=1e-3 * sigma,
        omega_max=8.0 * sigma,
        n_panels=16,
        max_panel_width=np.pi / (tau_max + span / constants.c),
        tail_exponent=None,
    )


def unequal_time_kernel(
    model: PermittivityModel,
    grid: DomainGrid,
    r,
    r_prime,
    tau,
    sigma: float,
    quadrature: FrequencyQuadrature | None = None,
    sweep: FrequencySweep | None = None,
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    **solve_options,
) -> np.ndarray:
    """int dw (omega/c^2) G1(r, r', omega) cos(omega tau) exp(-omega^2 / (2 sigma^2)).

    Returns (3, 3) for a scalar tau, (T, 3, 3) for an array of taus.
    """
    if not sigma > 0:
        raise QuadratureError(f"regulator width sigma must be positive, got {sigma}")
    if sweep is not None and sweep.axis != "real":
        raise QuadratureError("the unequal-time kernel needs samples on the real axis")
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    tau_max = float(np.max(np.abs(taus)))
    if sweep is None:
        span = path_span(grid, r, r_prime)
        quadrature = quadrature or unequal_time_quadrature(sigma, tau_max, span, constants)
    else:
        span, quadrature = sweep.path_span, sweep.quadrature
    if quadrature.omega_max < 6.0 * sigma:
        raise QuadratureError(
            f"sigma = {sigma:g} too large for the frequency grid: the window needs omega_max >= 6 sigma, "
            f"grid ends at {quadrature.omega_max:g}"
        )
    _check_oscillation(quadrature, tau_max, span, constants)
    if sweep is None:
        sweep = sweep_G1(model, grid, r, r_prime, quadrature, constants=constants, n_jobs=n_jobs, **solve_options)

    nodes = sweep.nodes
    folded = fold_real_axis(sweep.G1, nodes, constants) * np.exp(-0.5 * (nodes / sigma) ** 2)[:, None, None]
    values = np.stack([quadrature.integrate(folded * np.cos(nodes * t)[:, None, None]) for t in taus])
    return values[0] if np.ndim(tau) == 0 else values


def _check_oscillation(quadrature: FrequencyQuadrature, tau_max: float, span: float, constants: Constants) -> None:
    phase = quadrature.widest_panel * (tau_max + span / constants.c)
    if phase > 4.0 * np.pi:
        raise QuadratureError(
            f"frequency panels too wide for cos(omega tau): {phase / (2.0 * np.pi):.2f} periods per panel (max 2)"
        )


def light_cone_window(distance: float, sigma: float, constants: Constants = NATURAL, count: int = 61) -> np.ndarray:
    a = distance / constants.c
    return np.linspace(a - 3.0 / sigma, a + 3.0 / sigma, count)


def spacelike_suppression(
    kernel_at: Callable[[np.ndarray], np.ndarray],
    distance: float,
    sigma: float,
    constants: Constants = NATURAL,
    fraction: float = 0.5,
) -> float:
    """Peak |kernel| on the light-cone window over |kernel| at tau = fraction * distance / c."""
    window = light_cone_window(distance, sigma, constants)
    peak = float(np.max(np.abs(kernel_at(window))))
    inside = float(np.max(np.abs(kernel_at(np.array([fraction * distance / constants.c])))))
    if inside == 0.0:
        return np.inf
    return peak / inside


# =============================================================================
# Holomorphy of omega G1
# =============================================================================


def analyticity_sweep(z, dz, values, perimeter: float) -> float:
    """Normalized |closed contour integral of the samples|."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise FrequencyDomainError("every contour node must satisfy Im(omega) > 0")
    values = np.asarray(values, dtype=complex)
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return 0.0
    integral = np.tensordot(np.asarray(dz, dtype=complex), values, axes=(0, 0))
    return float(np.max(np.abs(integral)) / (perimeter * peak))


def contour_samples(
    model: PermittivityModel,
    grid: DomainGrid,
    r,
    s,
    rectangle: Rectangle,
    n_points: int = 400,
    scheme: str = "gauss",
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    **solve_options,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """omega G1(r, s, omega) at the rectangle's contour nodes; returns (z, dz, values)."""
    if rectangle.im_min <= 0:
        raise FrequencyDomainError("the contour must lie strictly inside the upper half-plane")
    z, dz = rectangle.nodes(n_points, scheme)

    def one(omega: complex) -> np.ndarray:
        solution = solve_all(model, omega, grid, s, constants=constants, **solve_options)
        return omega * solution.field_at(r, "G1")[0]

    values = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(one)(omega) for omega in z)
    return z, dz, np.stack(values)
