"""Noise-current spectral densities for absorbing and amplifying points.

Densities are per unit delta^3(r - r') delta(omega - omega'). Where
eps_I < 0 the creation and destruction roles of the noise field swap, so
the commutator density changes sign while the symmetrized density keeps
the magnitude.
"""

from dataclasses import dataclass

import numpy as np

from errors import FrequencyDomainError, GridError
from media.permittivity import PermittivityModel
from units import NATURAL, Constants

NORMALIZATION = "per unit delta^3(r - r') delta(omega - omega')"


@dataclass
class NoiseSpectrum:
    r: np.ndarray
    omega: float
    eps_imag: float
    commutator: float
    symmetrized: float
    gain: bool
    mapping_consistent: bool
    normalization: str = NORMALIZATION

    def to_dict(self) -> dict:
        return {
            "r": np.asarray(self.r).tolist(),
            "omega": self.omega,
            "eps_imag": self.eps_imag,
            "commutator_density": self.commutator,
            "symmetrized_density": self.symmetrized,
            "gain": self.gain,
            "mapping_consistent": self.mapping_consistent,
            "normalization": self.normalization,
        }


def _prefactor(omega: float, constants: Constants) -> float:
    return omega**2 * constants.hbar * constants.eps0 / np.pi


def _swapped_commutator(symmetrized: float, gain: bool) -> float:
    """[f, f^dagger] after exchanging the roles of f and f^dagger where gain is set."""
    return -symmetrized if gain else symmetrized


def noise_spectrum(model: PermittivityModel, r, omega: float, constants: Constants = NATURAL) -> NoiseSpectrum:
    omega = float(omega)
    if not omega > 0:
        raise FrequencyDomainError(f"noise spectra are defined for omega > 0, got {omega}")
    point = np.asarray(r, dtype=float).reshape(3)
    eps_imag = float(np.imag(model.evaluate(point.reshape(1, 3), omega)[0]))
    scale = _prefactor(omega, constants)
    commutator = scale * eps_imag
    symmetrized = scale * abs(eps_imag)
    gain = eps_imag < 0
    mapped = _swapped_commutator(symmetrized, gain)
    return NoiseSpectrum(
        r=point,
        omega=omega,
        eps_imag=eps_imag,
        commutator=commutator,
        symmetrized=symmetrized,
        gain=gain,
        mapping_consistent=bool(np.isclose(mapped, commutator, rtol=1e-12, atol=0.0)),
    )


def charge_density_from_current(divergence, omega) -> complex | np.ndarray:
    """Continuity equation div j = i omega rho, solved for rho."""
    omega = complex(omega)
    if omega == 0:
        raise FrequencyDomainError("the charge amplitude is undefined at omega = 0")
    value = np.asarray(divergence, dtype=complex) / (1j * omega)
    return complex(value) if value.ndim == 0 else value


def current_amplitude(model: PermittivityModel, points, omega: float) -> np.ndarray:
    """sqrt|eps_I| at each point, the spatial profile of the noise-current amplitude."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.sqrt(np.abs(np.imag(model.evaluate(points, omega))))


def noise_charge_spectrum(
    model: PermittivityModel,
    r,
    omega: float,
    step: float,
    polarization=(1.0, 0.0, 0.0),
) -> complex:
    """Charge amplitude of a current polarized along ``polarization``, by central differences."""
    if not step > 0:
        raise GridError(f"stencil step must be positive, got {step}")
    direction = np.asarray(polarization, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise GridError("polarization must be a non-zero vector")
    direction = direction / norm
    point = np.asarray(r, dtype=float).reshape(3)
    stencil = np.concatenate([point + step * np.eye(3), point - step * np.eye(3)])
    amplitude = current_amplitude(model, stencil, omega)
    gradient = (amplitude[:3] - amplitude[3:]) / (2.0 * step)
    return charge_density_from_current(float(direction @ gradient), omega)
