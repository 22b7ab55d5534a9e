import copy
import json

import pytest

from errors import ScenarioError
from scenario import build_grid, build_model, load_scenario, parse_scenario, scenario_digest

from conftest import SCENARIO_DIR

BASE = {
    "schema": "kkgreen/scenario-v1",
    "name": "sample",
    "model": {
        "materials": {"glass": [{"omega_T": 1.0, "omega_p": 0.1, "gamma": 0.1}]},
        "regions": [{"shape": "ball", "radius": 0.3, "material": "glass"}],
    },
    "points": [{"r": [0.6, 0.0, 0.0], "r_prime": [-0.6, 0.0, 0.0]}],
    "checks": ["kk", "solve"],
}


def _payload(**changes) -> dict:
    payload = copy.deepcopy(BASE)
    payload.update(changes)
    return payload


def _problems(payload) -> list[str]:
    with pytest.raises(ScenarioError) as info:
        parse_scenario(payload)
    return info.value.problems


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda path: path.stem)
def test_bundled_scenarios_load(path):
    scenario = load_scenario(path)
    assert scenario.name == path.stem
    build_model(scenario.model, build_grid(scenario.domain))


@pytest.mark.parametrize("name", ["ball", "gain_ball", "half_spaces"])
def test_scatterer_scenarios_use_default_criteria(name):
    scenario = load_scenario(SCENARIO_DIR / f"{name}.json")
    assert "tolerances" in scenario.defaults
    assert "sumrule" in scenario.defaults
    assert scenario.tolerances.reciprocity == 1e-6
    assert scenario.tolerances.curl == 1e-2
    if name != "half_spaces":
        assert "curl" in scenario.checks
        assert scenario.curl.resolution == 8

def test_defaults_are_recorded():
    scenario = parse_scenario(_payload())
    assert "domain" in scenario.defaults
    assert "units" in scenario.defaults
    assert "model.mollify_m" in scenario.defaults
    assert "schema" not in scenario.defaults
    assert "model.materials" not in scenario.defaults


def test_mollification_defaults_to_two_grid_spacings():
    scenario = parse_scenario(_payload())
    grid = build_grid(scenario.domain)
    assert build_model(scenario.model, grid).width == pytest.approx(2.0 * grid.h)


def test_resolution_cap_message():
    problems = _problems(_payload(domain={"resolution": 64}))
    assert any("n <= 12" in problem for problem in problems)


def test_unknown_check_lists_valid_ones():
    problems = _problems(_payload(checks=["kk", "entropy"]))
    assert any("entropy" in problem and "unequal_time" in problem for problem in problems)


def test_unknown_field_rejected():
    problems = _problems(_payload(solver={"method": "direct", "precondition": True}))
    assert any(problem.startswith("solver.precondition") for problem in problems)


def test_every_problem_reported():
    payload = _payload(
        points=[{"r": [0.2, 0.0, 0.0], "r_prime": [0.2, 0.0, 0.0]}],
        frequencies={"omega_min": 2.0, "omega_max": 1.0},
        sumrule={"cutoffs": [1.0, 2.0, 3.0, 4.0]},
    )
    payload["model"]["background"] = "unobtainium"
    problems = _problems(payload)
    assert len(problems) >= 4
    assert any("coincide" in problem for problem in problems)
    assert any("unobtainium" in problem for problem in problems)


def test_under_resolved_mollification():
    payload = _payload()
    payload["model"]["mollify_m"] = 0.1
    assert any("two grid spacings" in problem for problem in _problems(payload))


def test_gain_background_rejected():
    payload = _payload()
    payload["model"]["materials"]["glass"][0]["sign"] = -1
    payload["model"]["background"] = "glass"
    assert any(problem.startswith("model:") for problem in _problems(payload))


def test_invalid_json_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "name": ,\n}\n', encoding="utf-8")
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    assert info.value.problems[0].startswith("line 2, column")


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "absent.json")


def test_digest_is_deterministic(tmp_path):
    first = scenario_digest(parse_scenario(_payload()))
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(_payload(), indent=4), encoding="utf-8")
    assert scenario_digest(load_scenario(path)) == first
    assert scenario_digest(parse_scenario(_payload(name="other"))) != first
