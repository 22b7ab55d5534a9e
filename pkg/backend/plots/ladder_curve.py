import matplotlib.pyplot as plt
import numpy as np

from metrics.ladder import SumRuleReport

from .base import PALETTE, configure_matplotlib, empty_figure, figure_to_svg


def build_figure(report: SumRuleReport) -> plt.Figure:
    """|I(cutoff)| on log-log axes with the fitted power law."""
    cutoffs = np.asarray(report.cutoffs, dtype=float)
    magnitudes = report.magnitudes
    positive = magnitudes > 0
    if not np.any(positive):
        return empty_figure("identically zero ladder", title=report.name)

    configure_matplotlib()
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog(cutoffs[positive], magnitudes[positive], "o-", color=PALETTE[1], linewidth=2, label="|residual|")
    if np.isfinite(report.decay_exponent) and np.count_nonzero(positive) >= 2:
        anchor = np.flatnonzero(positive)[0]
        fit = magnitudes[anchor] * (cutoffs / cutoffs[anchor]) ** (-report.decay_exponent)
        ax.loglog(cutoffs, fit, "--", color=PALETTE[0], linewidth=1.5, label=f"slope -{report.decay_exponent:.2f}")
    if 0 < report.scale < np.inf:
        ax.axhline(report.tolerance * report.scale, color="#999999", linestyle=":", label="tolerance x scale")
    ax.set_xlabel("cutoff")
    ax.set_ylabel("|residual|")
    ax.set_title(f"{report.name} ({'pass' if report.passed else 'fail'})")
    ax.legend(frameon=False)
    try:
        ax.set_box_aspect(0.75)
    except Exception:
        pass
    return fig


def render_svg(report: SumRuleReport) -> str:
    return figure_to_svg(build_figure(report))
