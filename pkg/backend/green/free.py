"""Closed-form Green functions of the homogeneous reference medium.

g(R) = exp(i q0 R) / (4 pi R) with Im q0 >= 0. Every spatial derivative
below is taken analytically from

    g'  = g (i q0 - 1/R)
    g'' = g ((i q0 - 1/R)^2 + 1/R^2)
    d_i d_j g = n_i n_j g'' + (delta_ij - n_i n_j) g' / R

with n = (r - s)/|r - s|. Finite differences are only used by the
verification code.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from errors import FrequencyDomainError, SingularInputError
from green.grid import DomainGrid
from media.permittivity import PermittivityModel, reference_permittivity
from units import NATURAL, Constants

logger = logging.getLogger(__name__)

_EYE = np.eye(3)

# relative spread of eps over the faces below which the exterior counts as uniform
FACE_UNIFORMITY = 1e-12


def wave_number(omega, eps, c: float = 1.0):
    """(omega/c) sqrt(eps) on the branch with Im >= 0."""
    q = np.asarray(omega, dtype=complex) / c * np.sqrt(np.asarray(eps, dtype=complex))
    q = np.where(q.imag < 0, -q, q)
    return complex(q) if q.ndim == 0 else q


def scalar_g(distance, q0):
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise SingularInputError("scalar Green function evaluated at zero distance")
    q0 = np.asarray(q0, dtype=complex)
    q0 = np.where(q0.imag < 0, -q0, q0)
    value = np.exp(1j * q0 * distance) / (4.0 * np.pi * distance)
    return complex(value) if value.ndim == 0 else value


def _radial(r, s) -> tuple[np.ndarray, np.ndarray]:
    offset = np.atleast_2d(np.asarray(r, dtype=float)) - np.asarray(s, dtype=float)
    distance = np.linalg.norm(offset, axis=-1)
    if np.any(distance == 0):
        raise SingularInputError("field point coincides with source point")
    return offset / distance[..., None], distance


def _g_and_derivatives(distance: np.ndarray, q0: complex):
    g = np.exp(1j * q0 * distance) / (4.0 * np.pi * distance)
    phase = 1j * q0 - 1.0 / distance
    g1 = g * phase
    g2 = g * (phase**2 + 1.0 / distance**2)
    return g, g1, g2


@dataclass(frozen=True)
class DomainMedium:
    """Permittivity as the solver sees it inside a finite cube.

    ``exterior`` is the mean of eps over the cube faces. When eps is uniform
    there (a bounded scatterer well inside the cube) the model is used as
    is. Otherwise, e.g. a half-space crossing the faces, the contrast is
    tapered to zero over one mollification width inside every face,

        eps_w = eps_b + W (eps - eps_b),   grad eps_w = W grad eps + (eps - eps_b) grad W,

    so the truncated medium has no jump at the domain boundary.
    """

    model: PermittivityModel
    grid: DomainGrid
    omega: complex
    exterior: complex
    tapered: bool

    @classmethod
    def of(cls, model: PermittivityModel, grid: DomainGrid, omega) -> "DomainMedium":
        omega = complex(omega)
        faces = model.evaluate(grid.face_points, omega)
        exterior = complex(np.mean(faces))
        tapered = bool(np.max(np.abs(faces - exterior)) > FACE_UNIFORMITY * max(1.0, abs(exterior)))
        if tapered:
            logger.debug("eps varies over the domain faces; tapering the contrast to %s", exterior)
        return cls(model=model, grid=grid, omega=omega, exterior=exterior, tapered=tapered)

    def sample(self, points) -> tuple[np.ndarray, np.ndarray]:
        eps, grad = self.model.evaluate_with_gradient(points, self.omega)
        if not self.tapered:
            return eps, grad
        weight, slope = self.grid.window(points, self.model.width)
        contrast = eps - self.exterior
        return self.exterior + weight * contrast, weight[:, None] * grad + contrast[:, None] * slope

    def evaluate(self, points) -> np.ndarray:
        return self.sample(points)[0]


@dataclass(frozen=True)
class ReferenceMedium:
    """Homogeneous medium the contrast kernel is built around.

    ``grad_eps`` is non-zero only for the source-point reference, where the
    reference permittivity follows eps at the source and the dyadic G0
    picks up the derivative of q^-2(s).
    """

    omega: complex
    eps: complex
    c: float = 1.0
    grad_eps: np.ndarray = field(default_factory=lambda: np.zeros(3, dtype=complex))
    kind: str = "uniform"

    def __post_init__(self):
        object.__setattr__(self, "omega", complex(self.omega))
        object.__setattr__(self, "eps", complex(self.eps))
        object.__setattr__(self, "grad_eps", np.asarray(self.grad_eps, dtype=complex).reshape(3))

    @classmethod
    def uniform(cls, eps, omega, constants: Constants = NATURAL) -> "ReferenceMedium":
        return cls(omega=omega, eps=eps, c=constants.c)

    @classmethod
    def exterior(cls, domain: DomainMedium, constants: Constants = NATURAL) -> "ReferenceMedium":
        return cls(omega=domain.omega, eps=domain.exterior, c=constants.c, kind="exterior")

    @classmethod
    def space_averaged(cls, model: PermittivityModel, grid, omega, constants: Constants = NATURAL) -> "ReferenceMedium":
        eps = reference_permittivity(model, grid, omega)
        return cls(omega=omega, eps=eps, c=constants.c, kind="space_averaged")

    @classmethod
    def at_source(cls, domain: DomainMedium, source, constants: Constants = NATURAL) -> "ReferenceMedium":
        eps, grad = domain.sample(np.asarray(source, dtype=float).reshape(1, 3))
        return cls(omega=domain.omega, eps=eps[0], c=constants.c, grad_eps=grad[0], kind="at_source")

    @property
    def q0(self) -> complex:
        return wave_number(self.omega, self.eps, self.c)

    @property
    def k0_squared(self) -> complex:
        return (self.omega / self.c) ** 2

    @property
    def q0_squared(self) -> complex:
        return self.k0_squared * self.eps

    @property
    def inverse_q2(self) -> complex:
        if self.omega == 0:
            raise FrequencyDomainError("q^-2 diverges at omega = 0")
        return self.c**2 / (self.omega**2 * self.eps)

    @property
    def grad_inverse_q2(self) -> np.ndarray:
        if not np.any(self.grad_eps):
            return np.zeros(3, dtype=complex)
        return -self.inverse_q2 * self.grad_eps / self.eps

    @property
    def source_dependent(self) -> bool:
        return self.kind == "at_source"


@dataclass(frozen=True)
class DyadicSample:
    r: tuple[float, float, float]
    s: tuple[float, float, float]
    omega: complex
    value: np.ndarray

    def to_dict(self) -> dict:
        return {
            "r": list(self.r),
            "s": list(self.s),
            "omega": {"re": self.omega.real, "im": self.omega.imag},
            "re": self.value.real.tolist(),
            "im": self.value.imag.tolist(),
        }


# =============================================================================
# Vectorized tensors (many field points, one source)
# =============================================================================


def g0_tensor(points, source, reference: ReferenceMedium) -> np.ndarray:
    """[delta_ij - d_i^r d_j^s q^-2(s)] g at each field point, shape (P, 3, 3)."""
    n, distance = _radial(points, source)
    g, g1, g2 = _g_and_derivatives(distance, reference.q0)
    u = reference.inverse_q2
    nn = n[:, :, None] * n[:, None, :]
    value = _EYE * g[:, None, None] + u * (nn * g2[:, None, None] + (_EYE - nn) * (g1 / distance)[:, None, None])
    grad_u = reference.grad_inverse_q2
    if np.any(grad_u):
        value = value - n[:, :, None] * grad_u[None, None, :] * g1[:, None, None]
    return value


def g1_0_tensor(points, source, reference: ReferenceMedium) -> np.ndarray:
    _, distance = _radial(points, source)
    g = np.exp(1j * reference.q0 * distance) / (4.0 * np.pi * distance)
    return _EYE * g[:, None, None]


def gamma0_vector(points, source, reference: ReferenceMedium) -> np.ndarray:
    """-d_i^r q^-2(s) g, shape (P, 3)."""
    n, distance = _radial(points, source)
    _, g1, _ = _g_and_derivatives(distance, reference.q0)
    return -reference.inverse_q2 * n * g1[:, None]


def kernel_tensor(
    points,
    nodes,
    eps_nodes,
    grad_eps_nodes,
    reference: ReferenceMedium,
    coincident: np.ndarray | None = None,
) -> np.ndarray:
    """K_ik(r, v) for every (field point, node) pair, shape (P, N, 3, 3).

    K_ik = (grad eps / eps)_k(v) n_i g' + (q^2(v) - q0^2) g delta_ik

    Pairs flagged in ``coincident`` are returned as zero (the caller supplies
    the self-voxel integral); any other zero distance is an error.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    offset = points[:, None, :] - nodes[None, :, :]
    distance = np.linalg.norm(offset, axis=-1)
    if coincident is None:
        coincident = np.zeros(distance.shape, dtype=bool)
    if np.any((distance == 0) & ~coincident):
        raise SingularInputError("kernel evaluated at coincident points")
    distance = np.where(coincident, 1.0, distance)
    n = offset / distance[..., None]
    g, g1, _ = _g_and_derivatives(distance, reference.q0)
    g = np.where(coincident, 0.0, g)
    g1 = np.where(coincident, 0.0, g1)
    log_grad = np.asarray(grad_eps_nodes) / np.asarray(eps_nodes)[:, None]
    contrast = reference.k0_squared * (np.asarray(eps_nodes) - reference.eps)
    value = n[..., :, None] * g1[..., None, None] * log_grad[None, :, None, :]
    value = value + _EYE * (contrast[None, :] * g)[..., None, None]
    return value


def dyadic_tensor(points, nodes, reference: ReferenceMedium, coincident: np.ndarray | None = None) -> np.ndarray:
    """(I + grad grad / q0^2) g for every (field point, node) pair, shape (P, N, 3, 3).

    Symmetric in its two arguments and as a 3x3 matrix. Pairs flagged in
    ``coincident`` are returned as zero.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    offset = points[:, None, :] - nodes[None, :, :]
    distance = np.linalg.norm(offset, axis=-1)
    if coincident is None:
        coincident = np.zeros(distance.shape, dtype=bool)
    if np.any((distance == 0) & ~coincident):
        raise SingularInputError("dyadic evaluated at coincident points")
    distance = np.where(coincident, 1.0, distance)
    n = offset / distance[..., None]
    g, g1, g2 = _g_and_derivatives(distance, reference.q0)
    nn = n[..., :, None] * n[..., None, :]
    value = _EYE * g[..., None, None] + reference.inverse_q2 * (
        nn * g2[..., None, None] + (_EYE - nn) * (g1 / distance)[..., None, None]
    )
    return np.where(coincident[..., None, None], 0.0, value)


def ball_integral_of_g(q0: complex, radius: float) -> complex:
    """Integral of g over a ball of the given radius centred on the singularity."""
    x = q0 * radius
    if abs(x) < 1e-3:
        return radius**2 / 2.0 + 1j * q0 * radius**3 / 3.0 - q0**2 * radius**4 / 8.0
    return ((1.0 - 1j * x) * np.exp(1j * x) - 1.0) / q0**2


def ball_integral_of_dyadic(reference: ReferenceMedium, radius: float) -> complex:
    """Scalar s with  int_ball (I + grad grad / q0^2) g dV = s I,  the -I/(3 q0^2) point term included."""
    return 2.0 / 3.0 * ball_integral_of_g(reference.q0, radius) - reference.inverse_q2 / 3.0


# =============================================================================
# Single-point operations
# =============================================================================


def _sample(r, s, reference: ReferenceMedium, value: np.ndarray) -> DyadicSample:
    return DyadicSample(
        r=tuple(float(x) for x in np.asarray(r, dtype=float)),
        s=tuple(float(x) for x in np.asarray(s, dtype=float)),
        omega=reference.omega,
        value=value,
    )


def free_dyadic_G0(r, s, reference: ReferenceMedium) -> DyadicSample:
    return _sample(r, s, reference, g0_tensor(r, s, reference)[0])


def free_G1_0(r, s, reference: ReferenceMedium) -> DyadicSample:
    return _sample(r, s, reference, g1_0_tensor(r, s, reference)[0])


def free_Gamma_0(r, s, reference: ReferenceMedium) -> np.ndarray:
    return gamma0_vector(r, s, reference)[0]


def kernel_K(r, v, model: PermittivityModel, reference: ReferenceMedium) -> np.ndarray:
    eps, grad = model.evaluate_with_gradient(np.asarray(v, dtype=float).reshape(1, 3), reference.omega)
    return kernel_tensor(r, v, eps, grad, reference)[0, 0]
