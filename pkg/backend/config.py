"""进程级配置：版本号、输出目录与日志初始化。"""

import logging
import os
from pathlib import Path

VERSION = "1.0.0"
SCENARIO_SCHEMA = "kkgreen/scenario-v1"

# 输出目录：命令行 --out 优先，其次环境变量 KKGREEN_OUT，最后默认值
OUT_ENV = "KKGREEN_OUT"
DEFAULT_OUT_DIR = "kkgreen_out"

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# 直接求解的条件数估计超过此值时，发出近共振警告
CONDITION_WARN_THRESHOLD = 1e10

# 近实轴极点的虚部平移量，以最小共振频率的比例表示
POLE_SHIFT_FRACTION = 1e-3


def resolve_out_dir(cli_value: str | None = None) -> Path:
    if cli_value:
        return Path(cli_value)
    return Path(os.environ.get(OUT_ENV) or DEFAULT_OUT_DIR)


def configure_logging(verbose: bool = False) -> None:
    root = logging.getLogger()
    level = logging.DEBUG if verbose else logging.INFO
    if not any(getattr(handler, "_kkgreen", False) for handler in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._kkgreen = True
        root.addHandler(handler)
    root.setLevel(level)
