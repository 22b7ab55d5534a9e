"""运行场景：按依赖顺序执行检查，写出报告并返回清单。

检查按 CHECK_ORDER 顺序执行。抛出异常的检查记为失败并保存错误信息，运行继续；
solve 本身失败时，依赖它的检查直接标记为失败而不运行。数值输出不含时间戳，
同一场景重复运行得到逐字节相同的报告，只有清单记录运行时间。
"""

import datetime
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pandas as pd

from checks import DEPENDS_ON_SOLVE, load_check, ordered
from checks.base import CheckResult, RunContext
from config import VERSION
from plots.ladder_curve import render_svg
from scenario import Scenario, scenario_digest
from storage import write_csv, write_json, write_text

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "both")


@dataclass
class RunManifest:
    scenario: str
    digest: str
    version: str
    units: str
    timestamp: str
    results: list[CheckResult]
    defaults: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "digest": self.digest,
            "version": self.version,
            "units": self.units,
            "timestamp": self.timestamp,
            "defaults_filled": self.defaults,
            "passed": self.passed,
            "checks": {
                result.name: {"passed": result.passed, "error": result.error} for result in self.results
            },
            "outputs": self.outputs,
        }

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {"check": result.name, "status": "PASS" if result.passed else "FAIL", "error": result.error or ""}
                for result in self.results
            ]
        )


def _run_one(name: str, context: RunContext) -> CheckResult:
    try:
        check = load_check(name)(context)
        logger.info("running check %s", name)
        result = check.run()
    except Exception as e:
        logger.error("check %s failed with an error: %s", name, e)
        return CheckResult.failed(name, f"{type(e).__name__}: {e}")
    logger.info("check %s: %s", name, "pass" if result.passed else "FAIL")
    return result


def run(scenario: Scenario, units: str | None = None, n_jobs: int = 1) -> RunManifest:
    context = RunContext.from_scenario(scenario, units=units, n_jobs=n_jobs)
    results: list[CheckResult] = []
    solve_error = None
    for name in ordered(scenario.checks):
        if solve_error and name in DEPENDS_ON_SOLVE:
            results.append(CheckResult.failed(name, f"skipped: solve failed ({solve_error})"))
            continue
        result = _run_one(name, context)
        if name == "solve" and result.error:
            solve_error = result.error
        results.append(result)

    return RunManifest(
        scenario=scenario.name,
        digest=scenario_digest(scenario),
        version=VERSION,
        units=context.constants.name,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        results=results,
        defaults=list(scenario.defaults),
    )


def emit_reports(manifest: RunManifest, out_dir: Path, file_format: str = "both") -> list[Path]:
    """每个检查一个 JSON，外加 CSV 表格和截断阶梯 SVG 图，最后写清单。"""
    if file_format not in FORMATS:
        raise ValueError(f"format must be one of: {', '.join(FORMATS)}")
    out_dir = Path(out_dir) / manifest.scenario
    written: list[Path] = []
    for result in manifest.results:
        if file_format in ("json", "both"):
            written.append(write_json(out_dir / f"{result.name}.json", result.to_dict()))
        if file_format in ("csv", "both"):
            for stem, table in result.tables.items():
                written.append(write_csv(out_dir / f"{result.name}_{stem}.csv", table))
            for ladder in result.ladders:
                stem = f"{result.name}_{ladder.name}_pair{ladder.notes.get('pair', 0)}"
                written.append(write_text(out_dir / f"{stem}.svg", render_svg(ladder)))

    manifest.outputs = [path.as_posix() for path in written]
    manifest_path = out_dir / "manifest.json"
    manifest.outputs.append(manifest_path.as_posix())
    write_json(manifest_path, manifest.to_dict())
    return written + [manifest_path]
