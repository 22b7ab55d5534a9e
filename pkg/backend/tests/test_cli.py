import json

from main import main
from storage import read_json

from conftest import SCENARIO_DIR

VACUUM = str(SCENARIO_DIR / "vacuum.json")


def _report_bytes(directory) -> dict[str, bytes]:
    return {path.name: path.read_bytes() for path in sorted(directory.iterdir()) if path.name != "manifest.json"}


def test_list_checks(capsys):
    assert main(["list-checks"]) == 0
    output = capsys.readouterr().out
    assert "unequal_time" in output
    assert "[after solve]" in output


def test_validate(capsys):
    assert main(["validate", VACUUM]) == 0
    assert "defaults filled" in capsys.readouterr().out


def test_bad_scenario_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "points": [], "checks": ["solve"]}), encoding="utf-8")
    assert main(["validate", str(path)]) == 2
    assert main(["run", str(path), "--out", str(tmp_path)]) == 2
    assert "points" in capsys.readouterr().err


def test_missing_scenario(tmp_path):
    assert main(["run", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_bad_thread_count(tmp_path):
    assert main(["run", VACUUM, "--out", str(tmp_path), "--threads", "0"]) == 2


def test_vacuum_run_writes_json(tmp_path):
    assert main(["run", VACUUM, "--out", str(tmp_path), "--format", "json"]) == 0
    directory = tmp_path / "vacuum"
    assert {path.name for path in directory.iterdir()} == {"solve.json", "sumrule.json", "manifest.json"}
    manifest = read_json(directory / "manifest.json")
    assert manifest["passed"] is True
    assert manifest["checks"]["sumrule"]["passed"] is True
    assert "units" in manifest["defaults_filled"]
    sumrule = read_json(directory / "sumrule.json")
    assert {ladder["name"] for ladder in sumrule["ladders"]} == {"bulk", "commutator", "kernel_term"}


def test_reports_are_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["run", VACUUM, "--out", str(first)]) == 0
    assert main(["run", VACUUM, "--out", str(second)]) == 0
    assert _report_bytes(first / "vacuum") == _report_bytes(second / "vacuum")
    first_manifest = read_json(first / "vacuum" / "manifest.json")
    second_manifest = read_json(second / "vacuum" / "manifest.json")
    assert first_manifest["digest"] == second_manifest["digest"]


def test_csv_format(tmp_path):
    assert main(["run", VACUUM, "--out", str(tmp_path), "--format", "csv"]) == 0
    names = {path.name for path in (tmp_path / "vacuum").iterdir()}
    assert "solve_solve_samples.csv" in names
    assert "sumrule_commutator_pair0.csv" in names
    assert "sumrule_commutator_pair0.svg" in names
    assert not any(name.endswith(".json") and name != "manifest.json" for name in names)
    header = (tmp_path / "vacuum" / "sumrule_commutator_pair0.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "cutoff,abs_residual"


def test_failing_check_exit_code(tmp_path):
    assert main(["run", str(SCENARIO_DIR / "invalid_causality.json"), "--out", str(tmp_path)]) == 1
    result = read_json(tmp_path / "invalid_causality" / "analyticity.json")
    assert result["passed"] is False


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("KKGREEN_OUT", str(tmp_path / "env"))
    assert main(["run", VACUUM, "--format", "json"]) == 0
    assert (tmp_path / "env" / "vacuum" / "manifest.json").is_file()
