"""Shaped regions with mollified boundaries.

A region reports, for every query point, a blending weight T in [0, 1] for
each material it holds, together with the analytic gradient of T. Sharp
boundaries are replaced by the cubic smoothstep S(x) = 3x^2 - 2x^3 applied
to the signed distance scaled by the mollification width, so the weight
ramps from 0 to 1 across a shell of that width centred on the boundary.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from errors import ModelError


def smoothstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def smoothstep_slope(x: np.ndarray) -> np.ndarray:
    inside = (x > 0.0) & (x < 1.0)
    return np.where(inside, 6.0 * x * (1.0 - x), 0.0)


def interval_weight(x: np.ndarray, lower: float, upper: float, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Mollified indicator of [lower, upper] along one axis, and its derivative.

    Written as S(lower edge) - S(upper edge) so that neighbouring intervals
    sharing a face sum to one across it.
    """
    lo = (x - lower) / width + 0.5
    hi = (x - upper) / width + 0.5
    with np.errstate(invalid="ignore", over="ignore"):
        value = smoothstep(lo) - smoothstep(hi)
        slope = (smoothstep_slope(lo) - smoothstep_slope(hi)) / width
    return value, slope


Layer = tuple[str, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class Ball:
    center: tuple[float, float, float]
    radius: float
    material: str

    bounded = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ModelError(f"ball radius must be positive, got {self.radius}")

    def materials(self) -> list[str]:
        return [self.material]

    def layers(self, points: np.ndarray, width: float) -> list[Layer]:
        offset = points - np.asarray(self.center, dtype=float)
        distance = np.linalg.norm(offset, axis=1)
        x = 0.5 - (distance - self.radius) / width
        weight = smoothstep(x)
        radial = np.zeros_like(offset)
        nonzero = distance > 0
        radial[nonzero] = offset[nonzero] / distance[nonzero, None]
        gradient = (-smoothstep_slope(x) / width)[:, None] * radial
        return [(self.material, weight, gradient)]


@dataclass(frozen=True)
class Slab:
    """Region lower <= x[axis] <= upper; either bound may be infinite."""

    axis: int
    lower: float
    upper: float
    material: str

    def __post_init__(self):
        if self.axis not in (0, 1, 2):
            raise ModelError(f"slab axis must be 0, 1 or 2, got {self.axis}")
        if not self.lower < self.upper:
            raise ModelError(f"slab bounds must satisfy lower < upper, got [{self.lower}, {self.upper}]")

    @property
    def bounded(self) -> bool:
        return bool(np.isfinite(self.lower) and np.isfinite(self.upper))

    def materials(self) -> list[str]:
        return [self.material]

    def layers(self, points: np.ndarray, width: float) -> list[Layer]:
        value, slope = interval_weight(points[:, self.axis], self.lower, self.upper, width)
        gradient = np.zeros_like(points)
        gradient[:, self.axis] = slope
        return [(self.material, value, gradient)]


@dataclass(frozen=True)
class VoxelMap:
    """Axis-aligned block of cells, each holding a material index or -1.

    Cells are blended with a tensor product of per-axis interval weights, a
    partition of unity, so shared cell faces carry no dip in the total weight.
    """

    origin: tuple[float, float, float]
    cell: float
    indices: np.ndarray
    materials_list: tuple[str, ...] = field(default=())

    bounded = True

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=int)
        if indices.ndim != 3:
            raise ModelError(f"voxel map indices must be a 3-d array, got shape {indices.shape}")
        if not self.cell > 0:
            raise ModelError(f"voxel cell size must be positive, got {self.cell}")
        if not self.materials_list:
            raise ModelError("voxel map needs at least one material")
        if indices.size and indices.max() >= len(self.materials_list):
            raise ModelError("voxel map references a material index beyond its material list")
        if indices.size and indices.min() < -1:
            raise ModelError("voxel map indices must be >= -1 (-1 leaves the cell to the layers below)")
        object.__setattr__(self, "indices", indices)

    def materials(self) -> list[str]:
        return list(self.materials_list)

    def _axis_weights(self, coordinate: np.ndarray, axis: int, width: float) -> tuple[np.ndarray, np.ndarray]:
        count = self.indices.shape[axis]
        edges = self.origin[axis] + self.cell * np.arange(count + 1)
        values = np.empty((coordinate.size, count))
        slopes = np.empty((coordinate.size, count))
        for index in range(count):
            values[:, index], slopes[:, index] = interval_weight(coordinate, edges[index], edges[index + 1], width)
        return values, slopes

    def layers(self, points: np.ndarray, width: float) -> list[Layer]:
        (px, dx), (py, dy), (pz, dz) = (self._axis_weights(points[:, axis], axis, width) for axis in range(3))
        out: list[Layer] = []
        for index, name in enumerate(self.materials_list):
            mask = (self.indices == index).astype(float)
            weight = np.einsum("pi,pj,pk,ijk->p", px, py, pz, mask)
            gradient = np.stack(
                [
                    np.einsum("pi,pj,pk,ijk->p", dx, py, pz, mask),
                    np.einsum("pi,pj,pk,ijk->p", px, dy, pz, mask),
                    np.einsum("pi,pj,pk,ijk->p", px, py, dz, mask),
                ],
                axis=1,
            )
            out.append((name, weight, gradient))
        return out


Region = Ball | Slab | VoxelMap


@dataclass(frozen=True)
class SpatialProfile:
    """Background material plus regions blended over it in order."""

    background: str
    regions: tuple[Region, ...] = ()
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ModelError(f"mollification width must be positive, got {self.width}")
        object.__setattr__(self, "regions", tuple(self.regions))

    def material_names(self) -> list[str]:
        names = [self.background]
        for region in self.regions:
            names.extend(region.materials())
        return list(dict.fromkeys(names))

    def layer_groups(self, points: Sequence[Sequence[float]] | np.ndarray) -> list[list[Layer]]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return [region.layers(points, self.width) for region in self.regions]
