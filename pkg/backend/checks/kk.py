import numpy as np
import pandas as pd

from checks.base import BaseCheck, CheckResult
from media.permittivity import kk_residual

GRID_NODES = 2000


class Check(BaseCheck):
    """Kramers-Kronig residual of eps at every sampled point."""

    name = "kk"

    def run(self) -> CheckResult:
        context = self.context
        scale = context.model.resonance_scale()
        omega_grid = np.geomspace(1e-3 * scale, 1e3 * scale, self.params.get("nodes", GRID_NODES))
        tolerance = context.tolerances.kk

        rows = []
        for index, (r, r_prime) in enumerate(context.pairs):
            for role, point in (("r", r), ("r_prime", r_prime)):
                residual = kk_residual(context.model, point, omega_grid)
                rows.append({"pair": index, "point": role, "x": point[0], "y": point[1], "z": point[2], "residual": residual})
        table = pd.DataFrame(rows)
        worst = float(table["residual"].max())
        return CheckResult(
            name=self.name,
            passed=worst <= tolerance,
            summary={"max_residual": worst, "tolerance": tolerance, "grid_nodes": omega_grid.size},
            reports=rows,
            tables={"kk_residuals": table},
        )
