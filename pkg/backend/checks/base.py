from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from green.grid import DomainGrid
from media.permittivity import PermittivityModel
from metrics.ladder import SumRuleReport
from scenario import Scenario, build_grid, build_model
from units import Constants, get_constants


@dataclass
class RunContext:
    """Everything a check needs, built once per run from the scenario."""

    scenario: Scenario
    model: PermittivityModel
    grid: DomainGrid
    constants: Constants
    n_jobs: int = 1

    @classmethod
    def from_scenario(cls, scenario: Scenario, units: str | None = None, n_jobs: int = 1) -> "RunContext":
        grid = build_grid(scenario.domain)
        return cls(
            scenario=scenario,
            model=build_model(scenario.model, grid),
            grid=grid,
            constants=get_constants(units or scenario.units),
            n_jobs=n_jobs,
        )

    @property
    def frequencies(self) -> np.ndarray:
        return self.scenario.frequencies.grid()

    @property
    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(r, r') per point pair, both moved off the collocation nodes."""
        return [(self.grid.place_source(pair.r), self.grid.place_source(pair.r_prime)) for pair in self.scenario.points]

    @property
    def tolerances(self):
        return self.scenario.tolerances

    @property
    def solve_options(self) -> dict[str, Any]:
        solver = self.scenario.solver
        return {"method": solver.method, "reference": solver.reference, "max_iter": solver.max_iter, "tol": solver.tol}


@dataclass
class CheckResult:
    name: str
    passed: bool
    summary: dict[str, Any] = field(default_factory=dict)
    reports: list[dict[str, Any]] = field(default_factory=list)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    ladders: list[SumRuleReport] = field(default_factory=list)
    error: str | None = None

    @classmethod
    def failed(cls, name: str, error: str) -> "CheckResult":
        return cls(name=name, passed=False, error=error)

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.name,
            "passed": self.passed,
            "error": self.error,
            "summary": self.summary,
            "reports": self.reports,
            "ladders": [ladder.to_dict() for ladder in self.ladders],
        }


class BaseCheck(ABC):
    name: str = ""

    def __init__(self, context: RunContext, **params):
        self.context = context
        self.params = params

    @abstractmethod
    def run(self) -> CheckResult:
        """Run the check against the context's scenario and return its result."""
