"""validate / list-checks：不运行求解器的命令。"""

from checks import CHECK_ORDER, DEPENDS_ON_SOLVE, load_check
from scenario import Scenario, load_scenario


def validate(path: str) -> Scenario:
    """加载并完整校验场景；出错时抛出列出全部问题的 ScenarioError。"""
    return load_scenario(path)


def list_checks() -> list[tuple[str, str]]:
    rows = []
    for name in CHECK_ORDER:
        doc = (load_check(name).__doc__ or "").strip().splitlines()
        description = doc[0] if doc else ""
        if name in DEPENDS_ON_SOLVE:
            description += " [after solve]"
        rows.append((name, description.strip()))
    return rows
