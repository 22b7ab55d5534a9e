"""Scenario files: pydantic schema, loading and model/grid builders.

A scenario is one JSON document naming the medium, the domain, the
frequencies and point pairs to sample, and the checks to run. Every
problem in a file is reported at once through ``ScenarioError.problems``.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, PrivateAttr, ValidationError, field_validator

from config import SCENARIO_SCHEMA
from errors import KKGreenError, ScenarioError
from green.free import DomainMedium
from green.grid import BORN_MAX_RESOLUTION, DIRECT_MAX_RESOLUTION, DomainGrid
from media.permittivity import DispersionModel, Material, PermittivityModel
from media.profiles import Ball, Slab, SpatialProfile, VoxelMap

logger = logging.getLogger(__name__)

CHECK_NAMES = ("kk", "analyticity", "solve", "sumrule", "curl", "noise", "unequal_time")
AXES = {"x": 0, "y": 1, "z": 2}

Vector = tuple[float, float, float]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class OscillatorSpec(_Strict):
    omega_T: PositiveFloat
    omega_p: float = Field(ge=0)
    gamma: float
    sign: Literal[1, -1] = 1


class BallSpec(_Strict):
    shape: Literal["ball"]
    center: Vector = (0.0, 0.0, 0.0)
    radius: PositiveFloat
    material: str


class SlabSpec(_Strict):
    shape: Literal["slab"]
    axis: Literal["x", "y", "z"] = "z"
    lower: float | None = None  # null: unbounded
    upper: float | None = None
    material: str


class VoxelSpec(_Strict):
    shape: Literal["voxels"]
    origin: Vector
    cell: PositiveFloat
    indices: list[list[list[int]]]
    materials: list[str]


RegionSpec = Annotated[Union[BallSpec, SlabSpec, VoxelSpec], Field(discriminator="shape")]


class ModelSpec(_Strict):
    vacuum: bool = False
    materials: dict[str, list[OscillatorSpec]] = Field(default_factory=dict)
    background: str = "vacuum"
    regions: list[RegionSpec] = Field(default_factory=list)
    mollify_m: PositiveFloat | None = None


class DomainSpec(_Strict):
    center: Vector = (0.0, 0.0, 0.0)
    edge: PositiveFloat = 1.0
    resolution: PositiveInt = 4


class FrequencySpec(_Strict):
    omega_min: PositiveFloat = 0.5
    omega_max: PositiveFloat = 1.5
    nodes: PositiveInt = 3

    def grid(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.nodes)


class PointPair(_Strict):
    r: Vector
    r_prime: Vector


class ToleranceSpec(_Strict):
    kk: PositiveFloat = 1e-2
    analyticity: PositiveFloat = 1e-4
    vacuum_identity: PositiveFloat = 1e-12
    reality: PositiveFloat = 1e-12
    reciprocity: PositiveFloat = 1e-6
    born_direct: PositiveFloat = 1e-8
    sumrule: PositiveFloat = 1e-3
    curl: PositiveFloat = 1e-2
    evenness: PositiveFloat = 1e-10
    light_cone: PositiveFloat = 20.0


class SolverSpec(_Strict):
    method: Literal["direct", "born"] = "direct"
    reference: Literal["exterior", "space_averaged", "at_source"] = "exterior"
    max_iter: PositiveInt = 500
    tol: PositiveFloat = 1e-12


class SumRuleSpec(_Strict):
    cutoffs: list[PositiveFloat] = Field(default_factory=lambda: [10.0, 20.0, 50.0, 100.0])
    bulk_cutoffs: list[PositiveFloat] = Field(default_factory=lambda: [10.0, 20.0, 50.0, 100.0])
    path: Literal["imaginary", "real"] = "imaginary"
    nodes: PositiveInt = 48  # imaginary path: Gauss-Laguerre order
    n_panels: PositiveInt = 24  # real path: Gauss-Legendre panels


class CurlSpec(_Strict):
    resolution: PositiveInt = 8
    step_fraction: PositiveFloat = Field(0.0625, le=0.5)  # source step in units of the curl grid spacing


class UnequalTimeSpec(_Strict):
    sigma: PositiveFloat | None = None  # default 10 c / |r - r'|
    taus: list[float] | None = None  # default multiples of |r - r'| / c


class ContourSpec(_Strict):
    re_min: float = 0.2
    re_max: float = 2.0
    im_min: PositiveFloat = 0.05
    im_max: PositiveFloat = 1.0
    n_points: PositiveInt = 400
    scheme: Literal["gauss", "trapezoid"] = "gauss"
    green: bool = True


class Scenario(_Strict):
    schema_: Literal["kkgreen/scenario-v1"] = Field(SCENARIO_SCHEMA, alias="schema")
    name: str
    units: Literal["si", "natural"] = "natural"
    model: ModelSpec = Field(default_factory=ModelSpec)
    domain: DomainSpec = Field(default_factory=DomainSpec)
    frequencies: FrequencySpec = Field(default_factory=FrequencySpec)
    points: list[PointPair] = Field(min_length=1)
    checks: list[str] = Field(min_length=1)
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    solver: SolverSpec = Field(default_factory=SolverSpec)
    sumrule: SumRuleSpec = Field(default_factory=SumRuleSpec)
    curl: CurlSpec = Field(default_factory=CurlSpec)
    unequal_time: UnequalTimeSpec = Field(default_factory=UnequalTimeSpec)
    contour: ContourSpec = Field(default_factory=ContourSpec)

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, value: list[str]) -> list[str]:
        unknown = [name for name in value if name not in CHECK_NAMES]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; valid checks are: {', '.join(CHECK_NAMES)}")
        return list(dict.fromkeys(value))

    _defaults: list[str] = PrivateAttr(default_factory=list)

    @property
    def defaults(self) -> list[str]:
        """Dotted paths of the settings the file left to their defaults."""
        return self._defaults


# =============================================================================
# Builders
# =============================================================================


def _bound(value: float | None, infinite: float) -> float:
    return infinite if value is None else value


def build_region(spec: RegionSpec):
    if isinstance(spec, BallSpec):
        return Ball(center=spec.center, radius=spec.radius, material=spec.material)
    if isinstance(spec, SlabSpec):
        return Slab(
            axis=AXES[spec.axis],
            lower=_bound(spec.lower, -np.inf),
            upper=_bound(spec.upper, np.inf),
            material=spec.material,
        )
    return VoxelMap(origin=spec.origin, cell=spec.cell, indices=np.asarray(spec.indices), materials_list=tuple(spec.materials))


def build_materials(spec: ModelSpec) -> dict[str, Material]:
    return {
        name: Material(
            name,
            tuple(DispersionModel(o.omega_T, o.omega_p, o.gamma, o.sign) for o in oscillators),
        )
        for name, oscillators in spec.materials.items()
    }


def build_model(spec: ModelSpec, grid: DomainGrid | None = None) -> PermittivityModel:
    """PermittivityModel of a model spec; mollify_m defaults to 2h of ``grid``."""
    if spec.vacuum:
        return PermittivityModel(vacuum=True)
    width = spec.mollify_m
    if width is None:
        width = 2.0 * grid.h if grid is not None else 1.0
    profile = SpatialProfile(
        background=spec.background,
        regions=tuple(build_region(region) for region in spec.regions),
        width=width,
    )
    return PermittivityModel(profile, build_materials(spec))


def build_grid(spec: DomainSpec) -> DomainGrid:
    return DomainGrid(center=spec.center, edge=spec.edge, n=spec.resolution)


def scenario_digest(scenario: Scenario) -> str:
    canonical = json.dumps(scenario.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# =============================================================================
# Loading
# =============================================================================


def _defaults_filled(model: BaseModel, prefix: str = "") -> list[str]:
    filled = []
    for name, info in type(model).model_fields.items():
        key = info.alias or name
        path = f"{prefix}{key}"
        if name not in model.model_fields_set:
            filled.append(path)
            continue
        value = getattr(model, name)
        if isinstance(value, BaseModel):
            filled.extend(_defaults_filled(value, path + "."))
    return filled


def _format_pydantic(error: ValidationError) -> list[str]:
    problems = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        problems.append(f"{location}: {item['msg']}")
    return problems


def _semantic_problems(scenario: Scenario) -> list[str]:
    problems = []
    cap = DIRECT_MAX_RESOLUTION if scenario.solver.method == "direct" else BORN_MAX_RESOLUTION
    if scenario.domain.resolution > cap:
        problems.append(
            f"domain.resolution: {scenario.domain.resolution} exceeds the {scenario.solver.method} solver cap n <= {cap}"
        )
    if "curl" in scenario.checks and scenario.curl.resolution > cap:
        problems.append(f"curl.resolution: {scenario.curl.resolution} exceeds the {scenario.solver.method} solver cap n <= {cap}")
    frequencies = scenario.frequencies
    if frequencies.omega_min > frequencies.omega_max:
        problems.append("frequencies: omega_min must not exceed omega_max")
    if scenario.contour.re_min >= scenario.contour.re_max or scenario.contour.im_min >= scenario.contour.im_max:
        problems.append("contour: rectangle is degenerate (need re_min < re_max and im_min < im_max)")
    for index, pair in enumerate(scenario.points):
        if np.allclose(pair.r, pair.r_prime):
            problems.append(f"points.{index}: r and r_prime coincide")
    for key in ("cutoffs", "bulk_cutoffs"):
        ladder = getattr(scenario.sumrule, key)
        if len(ladder) < 4 or any(b <= a for a, b in zip(ladder, ladder[1:])) or ladder[-1] < 10.0 * ladder[0]:
            problems.append(f"sumrule.{key}: need >= 4 increasing cutoffs spanning at least a decade")

    spec = scenario.model
    if not spec.vacuum:
        defined = {"vacuum", *spec.materials}
        referenced = [spec.background]
        for region in spec.regions:
            referenced.extend(region.materials if isinstance(region, VoxelSpec) else [region.material])
        for name in dict.fromkeys(referenced):
            if name not in defined:
                problems.append(f"model: material {name!r} is not defined (defined: {sorted(defined)})")
        h = scenario.domain.edge / scenario.domain.resolution
        if spec.regions and spec.mollify_m is not None and spec.mollify_m < 2.0 * h:
            problems.append(f"model.mollify_m: {spec.mollify_m:g} is below two grid spacings (2h = {2.0 * h:g})")
        curl_h = scenario.domain.edge / scenario.curl.resolution
        width = 2.0 * h if spec.mollify_m is None else spec.mollify_m
        if spec.regions and "curl" in scenario.checks and width < 2.0 * curl_h:
            problems.append(
                f"curl.resolution: {scenario.curl.resolution} makes 2h = {2.0 * curl_h:g} exceed the mollification width {width:g}"
            )
    return problems


def parse_scenario(payload: dict) -> Scenario:
    try:
        scenario = Scenario.model_validate(payload)
    except ValidationError as error:
        raise ScenarioError("invalid scenario", _format_pydantic(error)) from error
    problems = _semantic_problems(scenario)
    if not problems:
        # building the medium catches gain in unbounded regions, bad shapes
        # and a boundary taper that does not fit in the domain
        try:
            grid = build_grid(scenario.domain)
            model = build_model(scenario.model, grid)
            DomainMedium.of(model, grid, scenario.frequencies.omega_min).sample(grid.points[:1])
        except KKGreenError as error:
            problems.append(f"model: {error}")
    if problems:
        raise ScenarioError("invalid scenario", problems)
    scenario._defaults = _defaults_filled(scenario)
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as error:
        raise ScenarioError(
            f"{path}: not valid JSON", [f"line {error.lineno}, column {error.colno}: {error.msg}"]
        ) from error
    if not isinstance(payload, dict):
        raise ScenarioError(f"{path}: the top level must be a JSON object")
    scenario = parse_scenario(payload)
    logger.info("loaded scenario %r from %s (%d defaults filled)", scenario.name, path, len(scenario.defaults))
    return scenario
