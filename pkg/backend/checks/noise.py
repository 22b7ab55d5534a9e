import numpy as np
import pandas as pd

from checks.base import BaseCheck, CheckResult
from metrics.noise import NORMALIZATION, noise_charge_spectrum, noise_spectrum


class Check(BaseCheck):
    """Sign coherence of the noise densities on every collocation point and pair point."""

    name = "noise"

    def run(self) -> CheckResult:
        context = self.context
        pair_points = np.concatenate([np.stack(pair) for pair in context.pairs])
        points = np.concatenate([context.grid.points, pair_points])

        rows = []
        for omega in context.frequencies:
            for point in points:
                spectrum = noise_spectrum(context.model, point, omega, context.constants)
                rows.append(
                    {
                        "omega": float(omega),
                        "x": point[0],
                        "y": point[1],
                        "z": point[2],
                        "eps_imag": spectrum.eps_imag,
                        "commutator": spectrum.commutator,
                        "symmetrized": spectrum.symmetrized,
                        "gain": spectrum.gain,
                        "mapping_consistent": spectrum.mapping_consistent,
                    }
                )
        table = pd.DataFrame(rows)
        coherent = (
            (table["gain"] == (table["commutator"] < 0))
            & (table["gain"] == (table["eps_imag"] < 0))
            & (table["symmetrized"] >= 0)
            & table["mapping_consistent"]
        )

        reports = []
        for omega in context.frequencies:
            for point in pair_points:
                entry = noise_spectrum(context.model, point, omega, context.constants).to_dict()
                charge = noise_charge_spectrum(context.model, point, omega, context.grid.h)
                entry["charge_density"] = {"re": charge.real, "im": charge.imag}
                reports.append(entry)

        return CheckResult(
            name=self.name,
            passed=bool(coherent.all()),
            summary={
                "samples": len(table),
                "incoherent": int((~coherent).sum()),
                "gain_samples": int(table["gain"].sum()),
                "normalization": NORMALIZATION,
            },
            reports=reports,
            tables={"noise_samples": table},
        )
