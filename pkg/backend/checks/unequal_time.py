import numpy as np
import pandas as pd

from checks.base import BaseCheck, CheckResult
from metrics.sumrule import (
    light_cone_window,
    path_span,
    sweep_G1,
    unequal_time_kernel,
    unequal_time_quadrature,
    vacuum_unequal_time,
)

# default time samples, in units of |r - r'| / c
TAU_MULTIPLES = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
DEFAULT_SIGMA = 10.0  # in units of c / |r - r'|


class Check(BaseCheck):
    """Gaussian-regulated unequal-time kernel on the first point pair.

    Passes when the kernel is even in tau; for vacuum it must also match
    the closed form and be suppressed inside the light cone.
    """

    name = "unequal_time"

    def run(self) -> CheckResult:
        context = self.context
        c = context.constants.c
        spec = context.scenario.unequal_time
        tol = context.tolerances
        r, r_prime = context.pairs[0]
        distance = float(np.linalg.norm(r - r_prime))
        light_time = distance / c
        sigma = spec.sigma or DEFAULT_SIGMA * c / distance
        taus = np.asarray(spec.taus if spec.taus is not None else [m * light_time for m in TAU_MULTIPLES])
        window = light_cone_window(distance, sigma, context.constants)
        times = np.concatenate([taus, -taus, window, [0.5 * light_time]])

        span = path_span(context.grid, r, r_prime)
        quadrature = unequal_time_quadrature(sigma, float(np.max(np.abs(times))), span, context.constants)
        sweep = sweep_G1(
            context.model, context.grid, r, r_prime, quadrature,
            constants=context.constants, n_jobs=context.n_jobs, **context.solve_options,
        )
        values = unequal_time_kernel(
            context.model, context.grid, r, r_prime, times, sigma, sweep=sweep, constants=context.constants
        )
        count = taus.size
        forward, backward = values[:count], values[count : 2 * count]
        peak = float(np.max(np.abs(values)))
        evenness = float(np.max(np.abs(forward - backward))) / peak if peak else 0.0
        passed = evenness <= tol.evenness

        summary = {"sigma": sigma, "distance": distance, "evenness": evenness, "quadrature_nodes": len(quadrature)}
        light_cone_peak = float(np.max(np.abs(values[2 * count : -1])))
        inside = float(np.max(np.abs(values[-1])))
        summary["suppression"] = light_cone_peak / inside if inside else float("inf")
        if context.model.vacuum:
            exact = vacuum_unequal_time(distance, taus, sigma, context.constants)
            diagonal = forward[:, 0, 0]
            summary["closed_form_error"] = float(np.max(np.abs(diagonal - exact)) / np.max(np.abs(exact)))
            passed = passed and summary["suppression"] >= tol.light_cone and summary["closed_form_error"] <= 1e-6

        table = pd.DataFrame(
            {
                "tau": taus,
                "abs_kernel": np.abs(forward).reshape(count, -1).max(axis=1),
                "re_xx": forward[:, 0, 0].real,
                "im_xx": forward[:, 0, 0].imag,
            }
        )
        return CheckResult(
            name=self.name,
            passed=bool(passed),
            summary=summary,
            reports=table.to_dict(orient="records"),
            tables={"unequal_time_kernel": table},
        )
