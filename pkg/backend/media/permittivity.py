"""Space-dependent Lorentz-oscillator permittivity and its causality checks.

The permittivity at a point is built by starting from the background
material and blending every region over it in order:

    eps <- eps * (1 - sum_m T_m) + sum_m T_m * eps_m

where T_m are the mollified region weights from ``media.profiles``. The
gradient is carried through the same recursion, so grad(ln q^2) in the
integral kernel is analytic everywhere.
"""

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.integrate import trapezoid

from errors import FrequencyDomainError, GridError, ModelError, QuadratureError
from media.profiles import SpatialProfile
from quadrature import Rectangle

logger = logging.getLogger(__name__)

# grid nodes required within omega_T +- |gamma| of every resonance in range
RESONANCE_NODES = 3


@dataclass(frozen=True)
class DispersionModel:
    """One Lorentz oscillator: s * wp^2 / (wT^2 - w^2 - i*gamma*w).

    sign = +1 absorbs, sign = -1 amplifies. gamma < 0 is accepted so that a
    deliberately non-causal model can be built as a negative control; such a
    model has both poles in the upper half-plane.
    """

    omega_T: float
    omega_p: float
    gamma: float
    sign: int = 1

    def __post_init__(self):
        if not self.omega_T > 0:
            raise ModelError(f"omega_T must be positive, got {self.omega_T}")
        if not self.omega_p >= 0:
            raise ModelError(f"omega_p must be non-negative, got {self.omega_p}")
        if self.gamma == 0 or not np.isfinite(self.gamma):
            raise ModelError(f"gamma must be finite and non-zero, got {self.gamma}")
        if self.sign not in (1, -1):
            raise ModelError(f"oscillator sign must be +1 or -1, got {self.sign}")

    @property
    def causal(self) -> bool:
        return self.gamma > 0

    def susceptibility(self, omega):
        omega = np.asarray(omega, dtype=complex)
        return self.sign * self.omega_p**2 / (self.omega_T**2 - omega * omega - 1j * self.gamma * omega)

    def poles(self) -> np.ndarray:
        root = np.sqrt(complex(self.omega_T**2 - 0.25 * self.gamma**2))
        center = -0.5j * self.gamma
        return np.array([center + root, center - root])

    def residue(self, pole: complex) -> complex:
        return self.sign * self.omega_p**2 / (-2.0 * pole - 1j * self.gamma)


@dataclass(frozen=True)
class Material:
    name: str
    oscillators: tuple[DispersionModel, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "oscillators", tuple(self.oscillators))

    @property
    def is_vacuum(self) -> bool:
        return not self.oscillators

    @property
    def has_gain(self) -> bool:
        return any(oscillator.sign < 0 for oscillator in self.oscillators)

    def susceptibility(self, omega):
        total = np.zeros_like(np.asarray(omega, dtype=complex))
        for oscillator in self.oscillators:
            total = total + oscillator.susceptibility(omega)
        return total

    def permittivity(self, omega):
        return 1.0 + self.susceptibility(omega)


VACUUM = Material("vacuum")


def _check_frequency(omega) -> complex:
    omega = complex(omega)
    if omega.imag < 0:
        raise FrequencyDomainError(f"permittivity is only defined for Im(omega) >= 0, got omega = {omega}")
    return omega


class PermittivityModel:
    def __init__(
        self,
        profile: SpatialProfile | None = None,
        materials: Mapping[str, Material] | None = None,
        vacuum: bool = False,
    ):
        self.vacuum = bool(vacuum)
        self.profile = profile or SpatialProfile(background=VACUUM.name)
        self.materials = {VACUUM.name: VACUUM, **dict(materials or {})}

        missing = [name for name in self.profile.material_names() if name not in self.materials]
        if missing:
            raise ModelError(f"profile references undefined materials: {missing}")
        if self.materials[self.profile.background].has_gain:
            raise ModelError("the background material must be absorbing or vacuum; gain belongs in bounded regions")
        for region in self.profile.regions:
            gain = [name for name in region.materials() if self.materials[name].has_gain]
            if gain and not region.bounded:
                raise ModelError(f"amplifying material {gain} placed in an unbounded region {region}")

    @classmethod
    def homogeneous(cls, material: Material) -> "PermittivityModel":
        return cls(SpatialProfile(background=material.name), {material.name: material})

    @property
    def models(self) -> list[DispersionModel]:
        if self.vacuum:
            return []
        used = self.profile.material_names()
        return [oscillator for name in used for oscillator in self.materials[name].oscillators]

    @property
    def is_homogeneous(self) -> bool:
        return self.vacuum or not self.profile.regions

    @property
    def causal(self) -> bool:
        return all(model.causal for model in self.models)

    @property
    def width(self) -> float:
        return self.profile.width

    def resonance_scale(self) -> float:
        models = self.models
        return min(model.omega_T for model in models) if models else 1.0

    def evaluate_with_gradient(self, points, omega) -> tuple[np.ndarray, np.ndarray]:
        """eps(r, omega) and grad_r eps(r, omega) at every row of ``points``."""
        omega = _check_frequency(omega)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        count = len(points)
        if self.vacuum:
            return np.ones(count, dtype=complex), np.zeros((count, 3), dtype=complex)

        values = {name: complex(material.permittivity(omega)) for name, material in self.materials.items()}
        eps = np.full(count, values[self.profile.background], dtype=complex)
        grad = np.zeros((count, 3), dtype=complex)
        for group in self.profile.layer_groups(points):
            total = sum(weight for _, weight, _ in group)
            total_grad = sum(gradient for _, _, gradient in group)
            mixed = sum(weight * values[name] for name, weight, _ in group)
            mixed_grad = sum(gradient * values[name] for name, _, gradient in group)
            grad = grad * (1.0 - total)[:, None] - eps[:, None] * total_grad + mixed_grad
            eps = eps * (1.0 - total) + mixed
        return eps, grad

    def evaluate(self, points, omega) -> np.ndarray:
        return self.evaluate_with_gradient(points, omega)[0]

    def oscillators_at(self, point) -> list[DispersionModel]:
        """Oscillators of every material with a non-zero weight at ``point``."""
        if self.vacuum:
            return []
        point = np.asarray(point, dtype=float).reshape(1, 3)
        weights = {self.profile.background: 1.0}
        for group in self.profile.layer_groups(point):
            total = sum(float(weight[0]) for _, weight, _ in group)
            weights = {name: value * (1.0 - total) for name, value in weights.items()}
            for name, weight, _ in group:
                weights[name] = weights.get(name, 0.0) + float(weight[0])
        return [oscillator for name, weight in weights.items() if weight > 0 for oscillator in self.materials[name].oscillators]

    def evaluate_spectrum(self, point, omegas) -> np.ndarray:
        """eps at one point for many frequencies; region weights computed once."""
        omegas = np.asarray(omegas, dtype=complex)
        if np.any(omegas.imag < 0):
            raise FrequencyDomainError("permittivity is only defined for Im(omega) >= 0")
        if self.vacuum:
            return np.ones_like(omegas)
        point = np.asarray(point, dtype=float).reshape(1, 3)
        eps = self.materials[self.profile.background].permittivity(omegas)
        for group in self.profile.layer_groups(point):
            total = sum(float(weight[0]) for _, weight, _ in group)
            mixed = sum(float(weight[0]) * self.materials[name].permittivity(omegas) for name, weight, _ in group)
            eps = eps * (1.0 - total) + mixed
        return eps


# =============================================================================
# Public operations
# =============================================================================


def eval_permittivity(model: PermittivityModel, r, omega) -> complex | np.ndarray:
    values = model.evaluate(r, omega)
    if np.ndim(r) == 1:
        return complex(values[0])
    return values


def _hilbert_real_part(omega: np.ndarray, eps_imag: np.ndarray) -> np.ndarray:
    """(2/pi) P int_0^inf w' eps_I(w') / (w'^2 - w^2) dw' at every grid node.

    Singularity subtraction on the grid, linear head on [0, a] and an
    A / w'^2 tail of w' eps_I beyond b, all integrated analytically. The log
    terms of the three pieces are grouped so the endpoint singularities
    cancel exactly.
    """
    a, b = omega[0], omega[-1]
    w = omega[:, None]
    wp = omega[None, :]
    numer = wp * eps_imag[None, :] / (wp + w)
    diag = 0.5 * eps_imag
    slope = 0.25 * eps_imag / omega + 0.5 * np.gradient(eps_imag, omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (numer - diag[:, None]) / (wp - w)
    np.fill_diagonal(quotient, slope)
    body = trapezoid(quotient, omega, axis=1)

    k = eps_imag[0] / a
    tail = b**3 * eps_imag[-1]
    coef_b = diag - tail / (2.0 * omega**3)
    coef_a = 0.5 * k * omega - diag
    dist_b = b - omega
    dist_a = omega - a
    with np.errstate(divide="ignore"):
        log_b = np.where(dist_b > 0, coef_b * np.log(np.where(dist_b > 0, dist_b, 1.0)), 0.0)
        log_a = np.where(dist_a > 0, coef_a * np.log(np.where(dist_a > 0, dist_a, 1.0)), 0.0)
    rest = (
        k * a
        - 0.5 * k * omega * np.log(a + omega)
        + tail / (2.0 * omega**3) * np.log(b + omega)
        - tail / (omega**2 * b)
    )
    return (2.0 / np.pi) * (body + log_a + log_b + rest)


def _check_resonances(model: PermittivityModel, r, omega: np.ndarray) -> None:
    for oscillator in model.oscillators_at(r):
        if not omega[0] <= oscillator.omega_T <= omega[-1]:
            continue
        half_width = abs(oscillator.gamma)
        inside = int(np.count_nonzero(np.abs(omega - oscillator.omega_T) <= half_width))
        if inside < RESONANCE_NODES:
            raise QuadratureError(
                f"frequency grid too coarse near resonance: {inside} node(s) within omega_T +- |gamma| = "
                f"{oscillator.omega_T:g} +- {half_width:g}, need {RESONANCE_NODES}"
            )


def kk_residual(model: PermittivityModel, r, omega_grid, coarse_threshold: float = 0.1) -> float:
    omega = np.asarray(omega_grid, dtype=float)
    if omega.ndim != 1 or omega.size < 8:
        raise QuadratureError("kk_residual needs a one-dimensional grid of at least 8 frequencies")
    if omega[0] <= 0 or np.any(np.diff(omega) <= 0):
        raise QuadratureError("kk_residual needs a strictly positive, strictly increasing frequency grid")
    _check_resonances(model, r, omega)

    eps = model.evaluate_spectrum(r, omega)
    real_part = eps.real - 1.0
    scale = float(np.max(np.abs(real_part)))
    if scale == 0.0 and not np.any(eps.imag):
        return 0.0

    transform = _hilbert_real_part(omega, eps.imag)
    coarse = _hilbert_real_part(omega[::2], eps.imag[::2])
    self_estimate = float(np.max(np.abs(transform[::2] - coarse))) / scale
    if self_estimate > coarse_threshold:
        raise QuadratureError(
            f"frequency grid too coarse near resonance: halving the grid moves the Hilbert transform "
            f"by {self_estimate:.3g} of max|eps_R - 1| (threshold {coarse_threshold})"
        )
    residual = float(np.max(np.abs(real_part - transform))) / scale
    logger.debug("kk residual %.3e (self-estimate %.3e) on %d nodes", residual, self_estimate, omega.size)
    return residual


def analyticity_check(
    model: PermittivityModel,
    r,
    contour: Rectangle,
    n_points: int = 400,
    scheme: str = "gauss",
) -> float:
    if contour.im_min <= 0:
        raise FrequencyDomainError("the contour must lie strictly inside the upper half-plane")
    z, dz = contour.nodes(n_points, scheme)
    values = model.evaluate_spectrum(r, z) - 1.0
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return 0.0
    return float(abs(np.sum(values * dz)) / (contour.perimeter * peak))


def reference_permittivity(model: PermittivityModel, domain, omega) -> complex:
    points = np.asarray(getattr(domain, "points", domain), dtype=float).reshape(-1, 3)
    if points.size == 0:
        raise GridError("reference permittivity over an empty domain")
    eps = model.evaluate(points, omega)
    if np.all(eps == eps[0]):
        return complex(eps[0])
    return complex(np.mean(eps))

