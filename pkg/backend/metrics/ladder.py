"""Cutoff ladders: decay exponent, extrapolated limit and pass/fail."""

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from errors import QuadratureError

MIN_RUNGS = 4
MIN_SPAN = 10.0
MIN_EXPONENT = 0.5


def _number(value: Any) -> float | None:
    try:
        number = float(value)
    except (TypeError, ValueError):
        return None
    if not math.isfinite(number):
        return None
    return number


def _magnitudes(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    return np.abs(values).reshape(values.shape[0], -1).max(axis=1)


def validate_ladder(cutoffs) -> np.ndarray:
    cutoffs = np.asarray(cutoffs, dtype=float)
    if cutoffs.ndim != 1 or cutoffs.size < MIN_RUNGS:
        raise QuadratureError(f"a cutoff ladder needs at least {MIN_RUNGS} rungs, got {cutoffs.size}")
    if np.any(cutoffs <= 0) or np.any(np.diff(cutoffs) <= 0):
        raise QuadratureError("cutoffs must be positive and strictly increasing")
    if cutoffs[-1] / cutoffs[0] < MIN_SPAN:
        raise QuadratureError(f"a cutoff ladder must span at least a decade, got {cutoffs[-1] / cutoffs[0]:.3g}x")
    return cutoffs


def decay_exponent(cutoffs, values) -> float:
    """p in the fit log|I| = A - p log(cutoff) + B / cutoff^2; inf for an identically zero ladder.

    The cutoff^-2 term takes up the leading correction of a regulated
    integral odd in 1/cutoff. With fewer than four non-zero rungs the fit
    is a straight line.
    """
    magnitude = _magnitudes(values)
    keep = magnitude > 0
    if np.count_nonzero(keep) < 2:
        return math.inf
    cutoffs = np.asarray(cutoffs, dtype=float)[keep]
    columns = [np.ones_like(cutoffs), -np.log(cutoffs)]
    if cutoffs.size >= MIN_RUNGS:
        columns.append(cutoffs**-2.0)
    coefficients, *_ = np.linalg.lstsq(np.stack(columns, axis=1), np.log(magnitude[keep]), rcond=None)
    return float(coefficients[1])


def extrapolated_limit(cutoffs, values) -> np.ndarray:
    """Value at 1/cutoff = 0 of the polynomial in 1/cutoff through every rung."""
    values = np.asarray(values, dtype=complex)
    inverse = 1.0 / np.asarray(cutoffs, dtype=float)
    flat = values.reshape(values.shape[0], -1)
    degree = len(inverse) - 1
    real = np.polyfit(inverse, flat.real, degree)[-1]
    imag = np.polyfit(inverse, flat.imag, degree)[-1]
    return (real + 1j * imag).reshape(values.shape[1:])


def is_monotone(values) -> bool:
    """Non-increasing after the first rung, one oscillating rung allowed."""
    magnitude = _magnitudes(values)[1:]
    return int(np.count_nonzero(np.diff(magnitude) > 0)) <= 1


@dataclass
class SumRuleReport:
    name: str
    cutoffs: np.ndarray
    values: np.ndarray
    decay_exponent: float
    extrapolated_limit: np.ndarray
    scale: float
    tolerance: float
    passed: bool
    monotone: bool
    notes: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_ladder(
        cls,
        name: str,
        cutoffs,
        values,
        scale: float,
        tolerance: float,
        min_exponent: float = MIN_EXPONENT,
        notes: dict[str, Any] | None = None,
    ) -> "SumRuleReport":
        cutoffs = validate_ladder(cutoffs)
        values = np.asarray(values, dtype=complex)
        exponent = decay_exponent(cutoffs, values)
        limit = extrapolated_limit(cutoffs, values)
        limit_size = float(np.max(np.abs(limit))) if np.size(limit) else 0.0
        passed = exponent >= min_exponent and limit_size <= tolerance * scale
        return cls(
            name=name,
            cutoffs=cutoffs,
            values=values,
            decay_exponent=exponent,
            extrapolated_limit=limit,
            scale=float(scale),
            tolerance=float(tolerance),
            passed=bool(passed),
            monotone=is_monotone(values),
            notes=dict(notes or {}),
        )

    @property
    def magnitudes(self) -> np.ndarray:
        return _magnitudes(self.values)

    @property
    def limit_magnitude(self) -> float:
        return float(np.max(np.abs(self.extrapolated_limit)))

    def ladder_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"cutoff": self.cutoffs, "abs_residual": self.magnitudes})

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "cutoffs": self.cutoffs.tolist(),
            "abs_residual": self.magnitudes.tolist(),
            "decay_exponent": self.decay_exponent,
            "extrapolated_limit": {
                "re": np.real(self.extrapolated_limit).tolist(),
                "im": np.imag(self.extrapolated_limit).tolist(),
            },
            "limit_magnitude": self.limit_magnitude,
            "scale": _number(self.scale),
            "tolerance": self.tolerance,
            "monotone": self.monotone,
            "passed": self.passed,
            "notes": self.notes,
        }
