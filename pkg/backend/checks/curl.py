from checks.base import BaseCheck, CheckResult
from green.grid import DomainGrid
from green.solver import fields_at_sources
from metrics.sumrule import curl_comparison


class Check(BaseCheck):
    """Curl of the G2 = d_j^s Gamma part at the first pair's source, first frequency.

    Runs on its own grid of ``curl.resolution`` points per axis with the
    source step a fixed fraction of that grid's spacing.
    """

    name = "curl"

    def run(self) -> CheckResult:
        context = self.context
        spec = context.scenario.curl
        omega = float(context.frequencies[0])
        grid = DomainGrid(center=context.grid.center, edge=context.grid.edge, n=spec.resolution)
        pair = context.scenario.points[0]
        r, source = grid.place_source(pair.r), grid.place_source(pair.r_prime)
        step = spec.step_fraction * grid.h
        options = dict(context.solve_options, constants=context.constants, n_jobs=context.n_jobs)

        def sampler(which: str):
            def sample(sources):
                return fields_at_sources(context.model, omega, grid, r, sources, which=(which,), **options)[which]
            return sample

        report = curl_comparison(sampler("G"), sampler("G1"), sampler("Gamma"), source, step)
        tolerance = context.tolerances.curl
        passed = report.residual <= tolerance * report.curl_G1
        return CheckResult(
            name=self.name,
            passed=bool(passed),
            summary={"omega": omega, "resolution": grid.n, "step": step, "tolerance": tolerance, **report.to_dict()},
            reports=[report.to_dict()],
        )
