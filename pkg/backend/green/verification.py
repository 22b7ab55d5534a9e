"""Residual and symmetry checks for solved Green fields.

Everything here works on sampled fields with second-order finite
differences; these are detectors, never part of the solve itself.
"""

import logging
from typing import Callable

import numpy as np

from errors import GridError
from green.free import DomainMedium
from green.grid import DomainGrid
from green.solver import GreenSolution, build_operator, solve_all
from media.permittivity import PermittivityModel
from units import NATURAL, Constants

logger = logging.getLogger(__name__)


def _shift(cube: np.ndarray, di: int, dj: int, dk: int) -> np.ndarray:
    n = cube.shape[0]
    return cube[1 + di : n - 1 + di, 1 + dj : n - 1 + dj, 1 + dk : n - 1 + dk]


def _second_derivatives(cube: np.ndarray, h: float) -> list[list[np.ndarray]]:
    """d_a d_b of a (n, n, n, ...) array on the interior, 3-point and 4-point stencils."""
    unit = np.eye(3, dtype=int)
    center = _shift(cube, 0, 0, 0)
    table = [[None] * 3 for _ in range(3)]
    for a in range(3):
        plus, minus = _shift(cube, *unit[a]), _shift(cube, *(-unit[a]))
        table[a][a] = (plus - 2.0 * center + minus) / h**2
        for b in range(a + 1, 3):
            e_a, e_b = unit[a], unit[b]
            mixed = (
                _shift(cube, *(e_a + e_b))
                - _shift(cube, *(e_a - e_b))
                - _shift(cube, *(e_b - e_a))
                + _shift(cube, *(-e_a - e_b))
            ) / (4.0 * h**2)
            table[a][b] = table[b][a] = mixed
    return table


def _wave_residual(D: list[list[np.ndarray]], field: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """[d_i d_k - delta_ik (Laplacian + q^2)] G_kj from tabulated second derivatives."""
    laplacian = D[0][0] + D[1][1] + D[2][2]
    grad_div = np.zeros_like(field)
    for i in range(3):
        for k in range(3):
            grad_div[..., i, :] += D[i][k][..., k, :]
    return grad_div - laplacian - q2[..., None, None] * field


def helmholtz_residual(
    G: np.ndarray,
    model: PermittivityModel,
    omega,
    grid: DomainGrid,
    source,
    min_distance: float | None = None,
    constants: Constants = NATURAL,
) -> float:
    """max |[d_i d_k - delta_ik (Laplacian + q^2)] G_kj| away from the source.

    Only interior points farther than max(3h, min_distance) from the source
    take part. q^2 follows the medium the solver sees, tapered if need be.
    """
    if grid.n < 3:
        raise GridError(f"the second-derivative stencil needs n >= 3, got n = {grid.n}")
    cube = grid.as_cube(np.asarray(G, dtype=complex))
    D = _second_derivatives(cube, grid.h)
    interior = _shift(grid.as_cube(grid.points), 0, 0, 0).reshape(-1, 3)
    field = _shift(cube, 0, 0, 0)

    eps = DomainMedium.of(model, grid, omega).evaluate(interior)
    q2 = ((complex(omega) / constants.c) ** 2 * eps).reshape(field.shape[:3])
    residual = _wave_residual(D, field, q2)

    cutoff = max(3.0 * grid.h, min_distance or 0.0)
    distance = np.linalg.norm(interior - np.asarray(source, dtype=float), axis=1)
    mask = distance > cutoff
    if not np.any(mask):
        raise GridError(f"no interior point lies farther than {cutoff:g} from the source")
    return float(np.max(np.abs(residual.reshape(-1, 3, 3)[mask])))


def pointwise_helmholtz_residual(
    field_at: Callable[[np.ndarray], np.ndarray],
    eps,
    omega,
    points,
    step: float,
    constants: Constants = NATURAL,
) -> np.ndarray:
    """Helmholtz residual at fixed physical points, one max-norm per point.

    ``field_at`` maps (M, 3) points to (M, 3, 3) tensors, e.g.
    ``GreenSolution.field_at``; ``eps`` is the permittivity at ``points``.
    The stencils are those of ``helmholtz_residual`` with spacing ``step``,
    so refining ``step`` at fixed points shows the O(step^2) decay directly.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    unit = step * np.eye(3)
    center = field_at(points)
    D = [[None] * 3 for _ in range(3)]
    for a in range(3):
        D[a][a] = (field_at(points + unit[a]) - 2.0 * center + field_at(points - unit[a])) / step**2
        for b in range(a + 1, 3):
            D[a][b] = D[b][a] = (
                field_at(points + unit[a] + unit[b])
                - field_at(points + unit[a] - unit[b])
                - field_at(points - unit[a] + unit[b])
                + field_at(points - unit[a] - unit[b])
            ) / (4.0 * step**2)
    q2 = (complex(omega) / constants.c) ** 2 * np.broadcast_to(np.asarray(eps, dtype=complex), len(points))
    residual = _wave_residual(D, center, q2)
    return np.max(np.abs(residual), axis=(1, 2))


def reciprocity_check(G_rs: np.ndarray, G_sr: np.ndarray) -> float:
    """max_ij |G_ij(r, s) - G_ji(s, r)| / max |G|."""
    G_rs = np.asarray(G_rs)
    G_sr = np.asarray(G_sr)
    scale = max(np.max(np.abs(G_rs)), np.max(np.abs(G_sr)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(G_rs - np.swapaxes(G_sr, -1, -2))) / scale)


def reciprocity_pair(
    model: PermittivityModel,
    omega,
    grid: DomainGrid,
    r,
    s,
    constants: Constants = NATURAL,
    form: str = "dyadic",
    **options,
) -> float:
    """Solve with the source at s and at r, compare G(r, s) with G(s, r)^T.

    Both solves share one operator and one factorization. The dyadic form
    is reciprocal to rounding; the gradient form leaves a gap of the size
    of its discretisation error. A source-point reference is replaced by
    the exterior one, and the dyadic form is always solved directly.
    """
    reference = options.pop("reference", "exterior")
    if reference == "at_source":
        reference = "exterior"
    if form == "dyadic":
        options["method"] = "direct"
    n_jobs = options.pop("n_jobs", 1)
    shared = build_operator(model, omega, grid, s, reference, constants, n_jobs, form)
    at_s = solve_all(model, omega, grid, s, constants=constants, operator=shared, **options)
    at_r = solve_all(model, omega, grid, r, constants=constants, operator=shared, **options)
    return reciprocity_check(at_s.field_at(r)[0], at_r.field_at(s)[0])


def reality_check(
    model: PermittivityModel,
    omega: float,
    grid: DomainGrid,
    source,
    constants: Constants = NATURAL,
    **options,
) -> float:
    """max |G(-omega) - conj G(omega)| / max |G| on the collocation grid."""
    omega = complex(omega)
    forward = solve_all(model, omega, grid, source, constants=constants, **options)
    mirrored = solve_all(model, -omega.conjugate(), grid, source, constants=constants, **options)
    scale = np.max(np.abs(forward.G))
    return float(np.max(np.abs(mirrored.G - np.conj(forward.G))) / scale)


def decomposition_residual(
    solution: GreenSolution,
    model: PermittivityModel,
    min_distance: float | None = None,
    constants: Constants = NATURAL,
    **options,
) -> float:
    """Relative max |G - G1 - d_j^s Gamma| with the source derivative by central differences.

    Gamma is re-solved for the six sources s +- (h/2) e_j, sharing the
    solution's operator when the reference does not depend on the source.
    """
    grid = solution.grid
    h = grid.h
    shared = None if solution.reference.source_dependent else solution.operator
    G2 = np.zeros_like(solution.G)
    for j in range(3):
        step = 0.5 * h * np.eye(3)[j]
        plus = solve_all(model, solution.omega, grid, solution.source + step, reference=solution.reference.kind,
                         constants=constants, operator=shared, **options)
        minus = solve_all(model, solution.omega, grid, solution.source - step, reference=solution.reference.kind,
                          constants=constants, operator=shared, **options)
        G2[:, :, j] = (plus.Gamma - minus.Gamma) / h

    cutoff = max(3.0 * h, min_distance or 0.0)
    mask = np.linalg.norm(grid.points - solution.source, axis=1) > cutoff
    if not np.any(mask):
        raise GridError(f"no collocation point lies farther than {cutoff:g} from the source")
    difference = solution.G[mask] - solution.G1[mask] - G2[mask]
    return float(np.max(np.abs(difference)) / np.max(np.abs(solution.G[mask])))
