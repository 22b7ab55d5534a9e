from pathlib import Path

import numpy as np
import pytest

from green.grid import DomainGrid
from media.permittivity import DispersionModel, Material, PermittivityModel
from media.profiles import Ball, SpatialProfile

SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"


@pytest.fixture
def glass() -> Material:
    return Material("glass", (DispersionModel(omega_T=1.0, omega_p=0.3, gamma=0.1),))


@pytest.fixture
def weak_glass() -> Material:
    # |eps - 1| <= 0.1 on the real axis
    return Material("weak", (DispersionModel(omega_T=1.0, omega_p=0.1, gamma=0.1),))


@pytest.fixture
def grid() -> DomainGrid:
    return DomainGrid(edge=1.0, n=4)


@pytest.fixture
def vacuum_model() -> PermittivityModel:
    return PermittivityModel(vacuum=True)


@pytest.fixture
def ball_model(weak_glass, grid) -> PermittivityModel:
    profile = SpatialProfile(
        background="vacuum",
        regions=(Ball(center=(0.0, 0.0, 0.0), radius=0.25, material="weak"),),
        width=2.0 * grid.h,
    )
    return PermittivityModel(profile, {"weak": weak_glass})


@pytest.fixture
def pair() -> tuple[np.ndarray, np.ndarray]:
    return np.array([0.6, 0.0, 0.0]), np.array([-0.6, 0.0, 0.0])


@pytest.fixture
def amplifying_ball_model(weak_glass, grid) -> PermittivityModel:
    gain = Material("gain", (DispersionModel(omega_T=1.2, omega_p=0.05, gamma=0.1, sign=-1),))
    profile = SpatialProfile(
        background="weak",
        regions=(Ball(center=(0.0, 0.0, 0.0), radius=0.25, material="gain"),),
        width=2.0 * grid.h,
    )
    return PermittivityModel(profile, {"weak": weak_glass, "gain": gain})
