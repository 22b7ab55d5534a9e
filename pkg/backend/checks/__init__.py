import importlib

CHECK_MAP = {  # 场景文件里的检查名称 -> checks 目录下的模块名
    "kk": "kk",
    "analyticity": "analyticity",
    "solve": "solve",
    "sumrule": "sumrule",
    "curl": "curl",
    "noise": "noise",
    "unequal_time": "unequal_time",
}

# solve 先于复用其求解设置的检查运行
CHECK_ORDER = ("kk", "analyticity", "solve", "sumrule", "curl", "noise", "unequal_time")
DEPENDS_ON_SOLVE = frozenset({"sumrule", "curl", "unequal_time"})


def load_check(name: str):
    """导入 checks/<name>.py 并返回其中的 Check 类。"""
    if name not in CHECK_MAP:
        raise ValueError(f"unknown check {name!r}; valid checks are: {', '.join(CHECK_ORDER)}")
    try:
        module = importlib.import_module(f".{CHECK_MAP[name]}", package=__name__)
        return module.Check
    except Exception as e:
        raise RuntimeError(f"failed to load check module {name}: {e}") from e


def ordered(names) -> list[str]:
    requested = set(names)
    return [name for name in CHECK_ORDER if name in requested]
