"""Voxel collocation of the Fredholm equation G = G0 + K G, and its solvers.

Unknowns are stored point-major: row a*3 + i holds component i at
collocation point a. A tensor right-hand side (G0, G1_0) occupies three
columns, the vector Gamma_0 one column, so every field of one source is
solved against the same factorization.

Two discretisations are offered. The default "gradient" form collocates
the kernel K_ik = (grad eps/eps)_k d_i g + (q^2 - q0^2) g delta_ik and
serves G, G1 and Gamma. The "dyadic" form collocates the contrast-source
equation

    G(r, s) = G0(r, s) + int (I + grad grad / q0^2) g(r, v) k0^2 (eps(v) - eps0) G(v, s) dv

which has the same continuum G but is reciprocal to rounding on every
grid; it only serves G.
"""

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve
from scipy.sparse.linalg import ArpackNoConvergence, eigs

from config import CONDITION_WARN_THRESHOLD
from errors import ConvergenceError, NearResonanceWarning, SingularInputError, UnderResolvedInterfaceError
from green.free import (
    DomainMedium,
    ReferenceMedium,
    ball_integral_of_dyadic,
    ball_integral_of_g,
    dyadic_tensor,
    g0_tensor,
    g1_0_tensor,
    gamma0_vector,
    kernel_tensor,
)
from green.grid import DomainGrid
from media.permittivity import PermittivityModel
from units import NATURAL, Constants

logger = logging.getLogger(__name__)

DENSE_EIGEN_LIMIT = 700
BLOCK_POINTS = 128

REFERENCES = ("exterior", "space_averaged", "at_source")
FORMS = ("gradient", "dyadic")


# =============================================================================
# Discretized kernel
# =============================================================================


@dataclass
class KernelOperator:
    omega: complex
    grid: DomainGrid
    reference: ReferenceMedium
    matrix: np.ndarray
    eps_nodes: np.ndarray
    grad_nodes: np.ndarray
    diagonal_treatment: dict = field(default_factory=dict)
    n_jobs: int = 1
    form: str = "gradient"

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @cached_property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    @cached_property
    def spectral_radius(self) -> float:
        return spectral_radius(self.matrix)

    @cached_property
    def max_row_sum(self) -> float:
        return float(np.max(np.sum(np.abs(self.matrix), axis=1))) if self.matrix.size else 0.0

    @cached_property
    def factorization(self) -> "Factorization":
        return Factorization.of(self)

    def field_rows(self, points) -> np.ndarray:
        """Nystrom rows K(r, v_b) w_b for arbitrary field points, shape (3P, 3N)."""
        return _kernel_rows(
            np.atleast_2d(np.asarray(points, dtype=float)),
            self.grid,
            self.eps_nodes,
            self.grad_nodes,
            self.reference,
            self.form,
        )


def _kernel_rows(
    points, grid: DomainGrid, eps_nodes, grad_nodes, reference: ReferenceMedium, form: str = "gradient"
) -> np.ndarray:
    nodes = grid.points
    distance = np.linalg.norm(points[:, None, :] - nodes[None, :, :], axis=-1)
    coincident = distance <= 1e-12 * grid.h
    contrast = reference.k0_squared * (eps_nodes - reference.eps)
    if form == "dyadic":
        block = dyadic_tensor(points, nodes, reference, coincident=coincident)
        block = block * (contrast * grid.voxel_volume)[None, :, None, None]
        self_integral = ball_integral_of_dyadic(reference, grid.equivalent_radius)
    else:
        block = kernel_tensor(points, nodes, eps_nodes, grad_nodes, reference, coincident=coincident)
        block = block * grid.voxel_volume
        # the gradient part is odd about the voxel centre and integrates to zero
        self_integral = ball_integral_of_g(reference.q0, grid.equivalent_radius)
    if np.any(coincident):
        rows, cols = np.nonzero(coincident)
        block[rows, cols] += np.eye(3) * (contrast[cols] * self_integral)[:, None, None]
    count = len(points)
    return block.transpose(0, 2, 1, 3).reshape(3 * count, 3 * grid.size)


def discretize(
    model: PermittivityModel,
    omega,
    grid: DomainGrid,
    reference: ReferenceMedium | None = None,
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    form: str = "gradient",
    domain: DomainMedium | None = None,
) -> KernelOperator:
    if form not in FORMS:
        raise ValueError(f"unknown discretisation {form!r} (expected one of {', '.join(FORMS)})")
    if not model.is_homogeneous and model.width < 2.0 * grid.h:
        raise UnderResolvedInterfaceError(
            f"mollification width {model.width:g} is below two grid spacings (2h = {2.0 * grid.h:g})"
        )
    omega = complex(omega)
    domain = domain or DomainMedium.of(model, grid, omega)
    if reference is None:
        reference = ReferenceMedium.exterior(domain, constants)
    if form == "dyadic" and reference.source_dependent:
        raise ValueError("the dyadic form needs a source-independent reference medium")
    eps_nodes, grad_nodes = domain.sample(grid.points)
    unknowns = 3 * grid.size
    if form == "dyadic":
        treatment = {
            "self_term": "contrast x (2/3 integral of g - 1/(3 q0^2)) over the volume-equivalent ball",
            "equivalent_radius": grid.equivalent_radius,
        }
    else:
        treatment = {
            "self_term": "contrast x integral of g over the volume-equivalent ball",
            "gradient_self_term": "zero (odd integrand)",
            "equivalent_radius": grid.equivalent_radius,
        }
    treatment["tapered"] = domain.tapered

    contrast = reference.k0_squared * (eps_nodes - reference.eps)
    if not np.any(contrast) and (form == "dyadic" or not np.any(grad_nodes)):
        matrix = np.zeros((unknowns, unknowns), dtype=complex)
    else:
        starts = range(0, grid.size, BLOCK_POINTS)
        blocks = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_kernel_rows)(
                grid.points[start : start + BLOCK_POINTS], grid, eps_nodes, grad_nodes, reference, form
            )
            for start in starts
        )
        matrix = np.concatenate(blocks, axis=0)
    logger.debug("assembled %dx%d %s kernel at omega=%s (reference %s)", unknowns, unknowns, form, omega, reference.kind)
    return KernelOperator(
        omega=omega,
        grid=grid,
        reference=reference,
        matrix=matrix,
        eps_nodes=eps_nodes,
        grad_nodes=grad_nodes,
        diagonal_treatment=treatment,
        n_jobs=n_jobs,
        form=form,
    )


def spectral_radius(matrix: np.ndarray) -> float:
    if not np.any(matrix):
        return 0.0
    if matrix.shape[0] <= DENSE_EIGEN_LIMIT:
        return float(np.max(np.abs(np.linalg.eigvals(matrix))))
    v0 = np.ones(matrix.shape[0], dtype=complex)
    try:
        values = eigs(matrix, k=1, which="LM", v0=v0, return_eigenvectors=False, tol=1e-8)
    except ArpackNoConvergence as exc:
        values = exc.eigenvalues
        if len(values) == 0:
            return _power_iteration(matrix, v0)
    return float(np.max(np.abs(values)))


def _power_iteration(matrix: np.ndarray, v0: np.ndarray, iterations: int = 300) -> float:
    vector = v0 / np.linalg.norm(v0)
    estimate = 0.0
    for _ in range(iterations):
        image = matrix @ vector
        estimate = float(np.linalg.norm(image))
        if estimate == 0.0:
            return 0.0
        vector = image / estimate
    return estimate


# =============================================================================
# Solvers
# =============================================================================


@dataclass
class SolveReport:
    method: str
    iterations: int = 0
    increments: list[float] = field(default_factory=list)
    spectral_radius: float | None = None
    condition: float | None = None
    pde_residual: float | None = None
    shifted_omega: complex | None = None
    iterates: list[np.ndarray] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "iterations": self.iterations,
            "increments": list(self.increments),
            "spectral_radius": self.spectral_radius,
            "condition": self.condition,
            "pde_residual": self.pde_residual,
            "shifted_omega": None
            if self.shifted_omega is None
            else {"re": self.shifted_omega.real, "im": self.shifted_omega.imag},
        }


@dataclass(frozen=True)
class Factorization:
    """LU of (I - K) and its reciprocal 1-norm condition estimate. Immutable, shareable."""

    lu: np.ndarray
    piv: np.ndarray
    rcond: float

    @classmethod
    def of(cls, operator: KernelOperator) -> "Factorization":
        system = np.eye(operator.shape[0], dtype=complex) - operator.matrix
        anorm = np.linalg.norm(system, 1)
        lu, piv = lu_factor(system, check_finite=False)
        (gecon,) = get_lapack_funcs(("gecon",), (lu,))
        rcond, _ = gecon(lu, anorm, norm="1")
        return cls(lu=lu, piv=piv, rcond=float(rcond))

    @property
    def condition(self) -> float:
        return np.inf if self.rcond == 0 else 1.0 / self.rcond

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve((self.lu, self.piv), rhs, check_finite=False)


def born_solve(
    operator: KernelOperator,
    rhs: np.ndarray,
    max_iter: int = 500,
    tol: float = 1e-12,
    keep_iterates: bool = False,
) -> tuple[np.ndarray, SolveReport]:
    """Neumann series sum_n K^n rhs, stopped when the increment drops below ``tol``.

    With ``keep_iterates`` the individual terms K^n rhs are attached to the
    report as ``report.iterates``.
    """
    solution = np.array(rhs, dtype=complex, copy=True)
    report = SolveReport(method="born")
    iterates = [solution.copy()] if keep_iterates else []
    if operator.is_zero:
        report.spectral_radius = 0.0
        report.iterates = iterates
        return solution, report

    radius = operator.spectral_radius
    report.spectral_radius = radius
    if radius >= 1.0:
        raise ConvergenceError(
            f"Born series diverges: spectral radius of the discretized kernel is {radius:.4g} >= 1; use direct_solve"
        )

    term = solution
    for iteration in range(1, max_iter + 1):
        term = operator.matrix @ term
        solution = solution + term
        increment = float(np.max(np.abs(term)) / np.max(np.abs(solution)))
        report.increments.append(increment)
        if keep_iterates:
            iterates.append(term.copy())
        if increment < tol:
            report.iterations = iteration
            break
    else:
        raise ConvergenceError(f"Born series did not reach tol={tol:g} within {max_iter} iterations")
    report.iterates = iterates
    logger.debug("Born converged in %d iterations (spectral radius %.3g)", report.iterations, radius)
    return solution, report


def direct_solve(
    operator: KernelOperator,
    rhs: np.ndarray,
    factorization: Factorization | None = None,
    warn_threshold: float = CONDITION_WARN_THRESHOLD,
) -> tuple[np.ndarray, SolveReport]:
    rhs = np.asarray(rhs, dtype=complex)
    if operator.is_zero:
        return rhs.copy(), SolveReport(method="direct", condition=1.0)
    factorization = factorization or operator.factorization
    condition = factorization.condition
    if condition > warn_threshold:
        message = f"(I - K) is nearly singular at omega={operator.omega}: condition estimate {condition:.3g}"
        logger.warning(message)
        warnings.warn(message, NearResonanceWarning, stacklevel=2)
    return factorization.solve(rhs), SolveReport(method="direct", condition=condition)


def _solve(operator: KernelOperator, rhs: np.ndarray, method: str, max_iter: int, tol: float):
    if method == "born":
        return born_solve(operator, rhs, max_iter=max_iter, tol=tol)
    if method == "direct":
        return direct_solve(operator, rhs)
    raise ValueError(f"unknown solver method {method!r} (expected 'direct' or 'born')")


# =============================================================================
# Green fields
# =============================================================================


@dataclass
class GreenSolution:
    """G, G1 (n^3, 3, 3) and Gamma (n^3, 3) for one source and frequency.

    A dyadic-form solve carries G only; G1 and Gamma are None.
    """

    omega: complex
    source: np.ndarray
    operator: KernelOperator
    G: np.ndarray
    G1: np.ndarray | None
    Gamma: np.ndarray | None
    report: SolveReport

    @property
    def grid(self) -> DomainGrid:
        return self.operator.grid

    @property
    def reference(self) -> ReferenceMedium:
        return self.operator.reference

    def field_at(self, points, which: str = "G") -> np.ndarray:
        """Nystrom extension of a solved field to arbitrary points."""
        if which != "G" and self.operator.form == "dyadic":
            raise ValueError(f"the dyadic form solves G only, not {which!r}")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rows = self.operator.field_rows(points)
        if which == "Gamma":
            free = gamma0_vector(points, self.source, self.reference)
            return free + (rows @ self.Gamma.reshape(-1)).reshape(len(points), 3)
        if which == "G":
            free, solved = g0_tensor(points, self.source, self.reference), self.G
        elif which == "G1":
            free, solved = g1_0_tensor(points, self.source, self.reference), self.G1
        else:
            raise ValueError(f"unknown field {which!r}")
        return free + (rows @ solved.reshape(-1, 3)).reshape(len(points), 3, 3)


def _check_source(grid: DomainGrid, source: np.ndarray) -> None:
    gap = np.min(np.linalg.norm(grid.points - source, axis=1))
    if gap <= 1e-9 * grid.h:
        raise SingularInputError(f"source {source.tolist()} sits on a collocation point; place it with place_source")


def build_operator(
    model: PermittivityModel,
    omega,
    grid: DomainGrid,
    source=None,
    reference: str = "exterior",
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    form: str = "gradient",
) -> KernelOperator:
    domain = DomainMedium.of(model, grid, omega)
    if reference == "exterior":
        medium = ReferenceMedium.exterior(domain, constants)
    elif reference == "space_averaged":
        medium = ReferenceMedium.space_averaged(model, grid, omega, constants)
    elif reference == "at_source":
        medium = ReferenceMedium.at_source(domain, source, constants)
    else:
        raise ValueError(f"unknown reference {reference!r} (expected one of {', '.join(REFERENCES)})")
    return discretize(model, omega, grid, reference=medium, constants=constants, n_jobs=n_jobs, form=form, domain=domain)


def solve_all(
    model: PermittivityModel,
    omega,
    grid: DomainGrid,
    source,
    method: str = "direct",
    reference: str = "exterior",
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    max_iter: int = 500,
    tol: float = 1e-12,
    operator: KernelOperator | None = None,
    form: str = "gradient",
) -> GreenSolution:
    source = np.asarray(source, dtype=float)
    _check_source(grid, source)
    if operator is None:
        operator = build_operator(model, omega, grid, source, reference, constants, n_jobs, form)
    medium = operator.reference
    size = grid.size
    columns = [g0_tensor(grid.points, source, medium).reshape(3 * size, 3)]
    if operator.form == "gradient":
        columns += [
            g1_0_tensor(grid.points, source, medium).reshape(3 * size, 3),
            gamma0_vector(grid.points, source, medium).reshape(3 * size, 1),
        ]
    solution, report = _solve(operator, np.concatenate(columns, axis=1), method, max_iter, tol)
    gradient = operator.form == "gradient"
    return GreenSolution(
        omega=operator.omega,
        source=source,
        operator=operator,
        G=solution[:, 0:3].reshape(size, 3, 3),
        G1=solution[:, 3:6].reshape(size, 3, 3) if gradient else None,
        Gamma=solution[:, 6].reshape(size, 3) if gradient else None,
        report=report,
    )


def solve_G(model, omega, grid, source, **options) -> tuple[np.ndarray, SolveReport]:
    solution = solve_all(model, omega, grid, source, **options)
    return solution.G, solution.report


def solve_G1(model, omega, grid, source, **options) -> tuple[np.ndarray, SolveReport]:
    solution = solve_all(model, omega, grid, source, **options)
    return solution.G1, solution.report


def solve_Gamma(model, omega, grid, source, **options) -> tuple[np.ndarray, SolveReport]:
    solution = solve_all(model, omega, grid, source, **options)
    return solution.Gamma, solution.report


def fields_at_sources(
    model: PermittivityModel,
    omega,
    grid: DomainGrid,
    field_point,
    sources: Sequence[Sequence[float]],
    which: Sequence[str] = ("Gamma",),
    method: str = "direct",
    reference: str = "exterior",
    constants: Constants = NATURAL,
    n_jobs: int = 1,
    max_iter: int = 500,
    tol: float = 1e-12,
) -> dict[str, np.ndarray]:
    """Solved fields at one field point for many source positions.

    Returns {"G": (S, 3, 3), "G1": (S, 3, 3), "Gamma": (S, 3)} restricted
    to ``which``. With a source-independent reference every source shares
    one operator and one factorization; the source-point reference needs
    one operator per source.
    """
    sources = np.atleast_2d(np.asarray(sources, dtype=float))
    shared = None
    if reference != "at_source":
        shared = build_operator(model, omega, grid, sources[0], reference, constants, n_jobs)
    collected: dict[str, list[np.ndarray]] = {name: [] for name in which}
    for source in sources:
        solution = solve_all(
            model, omega, grid, source, method=method, reference=reference, constants=constants,
            n_jobs=n_jobs, max_iter=max_iter, tol=tol, operator=shared,
        )
        for name in which:
            collected[name].append(solution.field_at(field_point, name)[0])
    return {name: np.stack(values) for name, values in collected.items()}
