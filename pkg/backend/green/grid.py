"""Voxelized cubic computational domain."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from errors import GridError
from media.profiles import interval_weight

# Dense storage caps (points per axis).
DIRECT_MAX_RESOLUTION = 12
BORN_MAX_RESOLUTION = 20

_DIAGONAL = np.ones(3) / np.sqrt(3.0)


@dataclass(frozen=True)
class DomainGrid:
    """Cube of edge ``edge`` around ``center`` split into n^3 voxels.

    Collocation points are voxel centres, flattened in C order so point
    index a = (i*n + j)*n + k. Source points are moved half a voxel along
    the (1,1,1) diagonal off the nearest centre, so no source ever sits on
    a quadrature node.
    """

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    edge: float = 1.0
    n: int = 6

    def __post_init__(self):
        if not self.edge > 0:
            raise GridError(f"domain edge must be positive, got {self.edge}")
        if self.n < 1:
            raise GridError(f"resolution must be at least 1, got {self.n}")
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))

    @property
    def h(self) -> float:
        return self.edge / self.n

    @property
    def size(self) -> int:
        return self.n**3

    @property
    def voxel_volume(self) -> float:
        return self.h**3

    @property
    def equivalent_radius(self) -> float:
        return (3.0 * self.voxel_volume / (4.0 * np.pi)) ** (1.0 / 3.0)

    @cached_property
    def axis(self) -> np.ndarray:
        return -0.5 * self.edge + (np.arange(self.n) + 0.5) * self.h

    @cached_property
    def points(self) -> np.ndarray:
        x, y, z = np.meshgrid(self.axis, self.axis, self.axis, indexing="ij")
        return np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1) + np.asarray(self.center)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.full(self.size, self.voxel_volume)

    @property
    def source_offset(self) -> np.ndarray:
        return 0.5 * self.h * _DIAGONAL

    @cached_property
    def face_points(self) -> np.ndarray:
        """Cell-centred points on the six faces, n^2 per face, shape (6 n^2, 3)."""
        u, v = np.meshgrid(self.axis, self.axis, indexing="ij")
        u, v = u.ravel(), v.ravel()
        faces = []
        for axis in range(3):
            others = [a for a in range(3) if a != axis]
            for side in (-0.5, 0.5):
                face = np.empty((u.size, 3))
                face[:, axis] = side * self.edge
                face[:, others[0]] = u
                face[:, others[1]] = v
                faces.append(face)
        return np.concatenate(faces) + np.asarray(self.center)

    def window(self, points, width: float) -> tuple[np.ndarray, np.ndarray]:
        """Weight W falling from 1 to 0 across a shell of ``width`` inside the faces, and grad W.

        W is a product of per-axis mollified intervals, zero on and outside
        the faces and one deeper than ``width`` inside them.
        """
        if self.edge < 2.0 * width:
            raise GridError(f"domain edge {self.edge:g} cannot hold a taper of width {width:g} on both sides")
        local = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(self.center)
        half = 0.5 * self.edge
        values, slopes = zip(
            *(interval_weight(local[:, axis], -half + 0.5 * width, half - 0.5 * width, width) for axis in range(3))
        )
        weight = values[0] * values[1] * values[2]
        gradient = np.stack(
            [slopes[0] * values[1] * values[2], values[0] * slopes[1] * values[2], values[0] * values[1] * slopes[2]],
            axis=1,
        )
        return weight, gradient

    def nearest_index(self, point) -> tuple[int, int, int]:
        local = np.asarray(point, dtype=float) - np.asarray(self.center) + 0.5 * self.edge
        index = np.floor(local / self.h).astype(int)
        return tuple(int(i) for i in np.clip(index, 0, self.n - 1))

    def place_source(self, point) -> np.ndarray:
        """Snap to the nearest voxel centre, then apply the source offset.

        Points outside the cube are kept where they are: they cannot collide
        with a collocation point.
        """
        point = np.asarray(point, dtype=float)
        if not self.contains(point):
            return point.copy()
        i, j, k = self.nearest_index(point)
        node = self.points[(i * self.n + j) * self.n + k]
        return node + self.source_offset

    def contains(self, point) -> bool:
        local = np.abs(np.asarray(point, dtype=float) - np.asarray(self.center))
        return bool(np.all(local <= 0.5 * self.edge))

    def as_cube(self, values: np.ndarray) -> np.ndarray:
        """Reshape point-major data (n^3, ...) to (n, n, n, ...)."""
        values = np.asarray(values)
        return values.reshape((self.n, self.n, self.n) + values.shape[1:])

    def check_resolution(self, method: str) -> None:
        cap = DIRECT_MAX_RESOLUTION if method == "direct" else BORN_MAX_RESOLUTION
        if self.n > cap:
            raise GridError(f"resolution {self.n} exceeds the {method} solver cap of n <= {cap}")
