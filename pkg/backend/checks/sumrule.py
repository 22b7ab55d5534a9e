import logging

import numpy as np
import pandas as pd

from checks.base import BaseCheck, CheckResult
from media.permittivity import VACUUM
from metrics.sumrule import (
    bulk_sum_rule,
    commutator_sum_rule,
    imaginary_axis_quadrature,
    imaginary_axis_sweep,
    kernel_term,
    path_span,
    sweep_G1,
    sweep_quadrature,
)

logger = logging.getLogger(__name__)


class Check(BaseCheck):
    """Bulk relation, off-diagonal commutator sum rule and kernel term, per point pair."""

    name = "sumrule"

    def run(self) -> CheckResult:
        context = self.context
        spec = context.scenario.sumrule
        tolerance = context.tolerances.sumrule
        model = context.model
        background = VACUUM if model.vacuum else model.materials[model.profile.background]

        ladders = []
        tables = {}
        for index, (r, r_prime) in enumerate(context.pairs):
            distance = float(np.linalg.norm(r - r_prime))
            ladders.append(
                _tagged(bulk_sum_rule(distance, background, spec.bulk_cutoffs, context.constants, tolerance=tolerance), index)
            )

            options = dict(constants=context.constants, n_jobs=context.n_jobs, **context.solve_options)
            if spec.path == "imaginary":
                quadrature = imaginary_axis_quadrature(distance, context.constants, spec.nodes)
                logger.info("pair %d: sweeping G1 over %d imaginary-axis nodes", index, len(quadrature))
                sweep = imaginary_axis_sweep(model, context.grid, r, r_prime, quadrature, **options)
            else:
                quadrature = sweep_quadrature(spec.cutoffs, path_span(context.grid, r, r_prime), context.constants, spec.n_panels)
                logger.info("pair %d: sweeping G1 over %d real frequency nodes", index, len(quadrature))
                sweep = sweep_G1(model, context.grid, r, r_prime, quadrature, **options)
            ladders.append(_tagged(commutator_sum_rule(
                model, context.grid, r, r_prime, spec.cutoffs, sweep=sweep, tolerance=tolerance, constants=context.constants
            ), index))
            ladders.append(_tagged(kernel_term(
                model, context.grid, r, r_prime, spec.cutoffs, sweep=sweep, tolerance=tolerance, constants=context.constants
            ), index))

        for ladder in ladders:
            tables[f"{ladder.name}_pair{ladder.notes['pair']}"] = ladder.ladder_frame()
            logger.info("%s pair %d: exponent %.3g, |limit| %.3g (scale %.3g) -> %s", ladder.name, ladder.notes["pair"],
                        ladder.decay_exponent, ladder.limit_magnitude, ladder.scale, "pass" if ladder.passed else "FAIL")
        overview = pd.DataFrame(
            [
                {"ladder": ladder.name, "pair": ladder.notes["pair"], "exponent": ladder.decay_exponent,
                 "limit": ladder.limit_magnitude, "scale": ladder.scale, "passed": ladder.passed}
                for ladder in ladders
            ]
        )
        return CheckResult(
            name=self.name,
            passed=bool(all(ladder.passed for ladder in ladders)),
            summary={"ladders": len(ladders), "failed": int((~overview["passed"]).sum()), "tolerance": tolerance},
            tables=tables,
            ladders=ladders,
        )


def _tagged(report, pair: int):
    report.notes["pair"] = pair
    return report
