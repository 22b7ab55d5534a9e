"""Frequency-axis panels, the imaginary-axis Laguerre rule and closed rectangular contours."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from errors import QuadratureError


@dataclass(frozen=True)
class FrequencyQuadrature:
    """Composite Gauss-Legendre rule on [omega_min, omega_max].

    Panel boundaries are log-spaced; panels wider than ``max_panel_width``
    are split evenly. ``integrate`` appends an analytic head on
    [0, omega_min] (integrand taken proportional to omega^2) and, when
    ``tail_exponent`` is set, a power-law tail on [omega_max, inf).
    """

    omega_min: float
    omega_max: float
    n_panels: int = 32
    order: int = 16
    max_panel_width: float | None = None
    tail_exponent: float | None = 2.0

    def __post_init__(self):
        if not 0 < self.omega_min < self.omega_max:
            raise QuadratureError(f"need 0 < omega_min < omega_max, got [{self.omega_min}, {self.omega_max}]")
        if self.n_panels < 1 or self.order < 1:
            raise QuadratureError("n_panels and order must be positive")
        if self.max_panel_width is not None and not self.max_panel_width > 0:
            raise QuadratureError("max_panel_width must be positive")
        if self.tail_exponent is not None and not self.tail_exponent > 1:
            raise QuadratureError("tail_exponent must exceed 1 for a convergent tail")

    @cached_property
    def panel_edges(self) -> np.ndarray:
        coarse = np.geomspace(self.omega_min, self.omega_max, self.n_panels + 1)
        if self.max_panel_width is None:
            return coarse
        edges = [coarse[:1]]
        for left, right in zip(coarse[:-1], coarse[1:]):
            pieces = max(1, int(np.ceil((right - left) / self.max_panel_width)))
            edges.append(np.linspace(left, right, pieces + 1)[1:])
        return np.concatenate(edges)

    @cached_property
    def _rule(self) -> tuple[np.ndarray, np.ndarray]:
        t, w = np.polynomial.legendre.leggauss(self.order)
        left = self.panel_edges[:-1, None]
        half = 0.5 * np.diff(self.panel_edges)[:, None]
        nodes = left + half * (t[None, :] + 1.0)
        weights = half * w[None, :]
        return nodes.ravel(), weights.ravel()

    @property
    def nodes(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    @property
    def widest_panel(self) -> float:
        return float(np.max(np.diff(self.panel_edges)))

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate samples taken at ``nodes`` (node axis first)."""
        values = np.asarray(values)
        if values.shape[0] != self.nodes.size:
            raise QuadratureError(f"expected {self.nodes.size} samples, got {values.shape[0]}")
        total = np.tensordot(self.weights, values, axes=(0, 0))
        first, last = self.nodes[0], self.nodes[-1]
        total = total + values[0] * self.omega_min**3 / (3.0 * first**2)
        if self.tail_exponent is not None:
            p = self.tail_exponent
            total = total + values[-1] * last**p * self.omega_max ** (1.0 - p) / (p - 1.0)
        return total


@dataclass(frozen=True)
class LaguerreQuadrature:
    """Gauss-Laguerre rule on [0, inf) for integrands decaying like exp(-decay * y).

    Nodes are x_k / decay; the weights absorb exp(x_k), so ``integrate``
    takes plain samples of the integrand.
    """

    decay: float
    order: int = 48

    def __post_init__(self):
        if not self.decay > 0:
            raise QuadratureError(f"decay rate must be positive, got {self.decay}")
        if self.order < 2:
            raise QuadratureError(f"Gauss-Laguerre order must be at least 2, got {self.order}")

    @cached_property
    def _rule(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.laguerre.laggauss(self.order)
        return x / self.decay, w * np.exp(x) / self.decay

    @property
    def nodes(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    def __len__(self) -> int:
        return self.order

    def integrate(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        if values.shape[0] != self.order:
            raise QuadratureError(f"expected {self.order} samples, got {values.shape[0]}")
        return np.tensordot(self.weights, values, axes=(0, 0))


@dataclass(frozen=True)
class Rectangle:
    """Counter-clockwise rectangle [re_min, re_max] x [im_min, im_max] in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise QuadratureError(f"degenerate rectangle {self}")

    @property
    def corners(self) -> list[complex]:
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    @property
    def perimeter(self) -> float:
        return 2.0 * ((self.re_max - self.re_min) + (self.im_max - self.im_min))

    def shifted_up(self, amount: float) -> "Rectangle":
        return Rectangle(self.re_min, self.re_max, self.im_min + amount, self.im_max + amount)

    def nodes(self, n_points: int, scheme: str = "gauss") -> tuple[np.ndarray, np.ndarray]:
        """Contour nodes z and complex weights dz, n_points split over the four edges."""
        per_edge = max(2, n_points // 4)
        if scheme == "gauss":
            t, w = np.polynomial.legendre.leggauss(per_edge)
            s = 0.5 * (t + 1.0)
            w = 0.5 * w
        elif scheme == "trapezoid":
            s = np.linspace(0.0, 1.0, per_edge)
            w = np.full(per_edge, 1.0 / (per_edge - 1))
            w[[0, -1]] *= 0.5
        else:
            raise QuadratureError(f"unknown contour scheme {scheme!r} (expected 'gauss' or 'trapezoid')")

        corners = self.corners
        z_parts, dz_parts = [], []
        for start, end in zip(corners, corners[1:] + corners[:1]):
            z_parts.append(start + (end - start) * s)
            dz_parts.append((end - start) * w)
        return np.concatenate(z_parts), np.concatenate(dz_parts)
