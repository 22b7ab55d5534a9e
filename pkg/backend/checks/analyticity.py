import numpy as np

from checks.base import BaseCheck, CheckResult
from media.permittivity import analyticity_check
from metrics.sumrule import analyticity_sweep, contour_samples
from quadrature import Rectangle


class Check(BaseCheck):
    """Contour integrals of eps - 1 and of omega G1 over an upper half-plane rectangle."""

    name = "analyticity"

    def run(self) -> CheckResult:
        context = self.context
        spec = context.scenario.contour
        rectangle = Rectangle(spec.re_min, spec.re_max, spec.im_min, spec.im_max)
        tolerance = context.tolerances.analyticity

        reports = []
        for index, (r, r_prime) in enumerate(context.pairs):
            residual = analyticity_check(context.model, r, rectangle, spec.n_points, spec.scheme)
            reports.append({"quantity": "eps", "pair": index, "residual": residual})

        if spec.green:
            r, r_prime = context.pairs[0]
            z, dz, values = contour_samples(
                context.model,
                context.grid,
                r,
                r_prime,
                rectangle,
                spec.n_points,
                spec.scheme,
                constants=context.constants,
                n_jobs=context.n_jobs,
                **context.solve_options,
            )
            residual = analyticity_sweep(z, dz, values, rectangle.perimeter)
            reports.append({"quantity": "omega_G1", "pair": 0, "residual": residual})

        worst = max(report["residual"] for report in reports)
        return CheckResult(
            name=self.name,
            passed=bool(worst <= tolerance),
            summary={
                "max_residual": worst,
                "tolerance": tolerance,
                "rectangle": [spec.re_min, spec.re_max, spec.im_min, spec.im_max],
                "scheme": spec.scheme,
                "causal_model": context.model.causal,
                "poles": [[p.real, p.imag] for m in context.model.models for p in np.atleast_1d(m.poles())],
            },
            reports=reports,
        )
