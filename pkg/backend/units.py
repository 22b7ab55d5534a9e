"""Physical constants for the two supported unit systems."""

from dataclasses import dataclass

from scipy import constants as _codata


@dataclass(frozen=True)
class Constants:
    """Speed of light, reduced Planck constant and vacuum permittivity."""

    name: str
    c: float
    hbar: float
    eps0: float


SI = Constants(name="si", c=_codata.c, hbar=_codata.hbar, eps0=_codata.epsilon_0)
NATURAL = Constants(name="natural", c=1.0, hbar=1.0, eps0=1.0)

UNIT_SYSTEMS = {"si": SI, "natural": NATURAL}


def get_constants(name: str) -> Constants:
    if name not in UNIT_SYSTEMS:
        raise ValueError(f"unknown unit system: {name!r} (expected one of {sorted(UNIT_SYSTEMS)})")
    return UNIT_SYSTEMS[name]
