"""Report writers: canonical JSON, CSV tables and temp-file cleanup.

Writes go to a temporary sibling first and are renamed into place, so an
interrupted run never leaves a half-written report behind.
"""

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pandas as pd


def to_jsonable(value: Any) -> Any:
    """numpy scalars/arrays, complex numbers and non-finite floats mapped to plain JSON."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(value.real)), "im": to_jsonable(float(value.imag))}
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if math.isnan(number):
            return "nan"
        if math.isinf(number):
            return "inf" if number > 0 else "-inf"
        return number
    if isinstance(value, Path):
        return value.as_posix()
    return value


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        os.replace(temp_name, path)
    except BaseException:
        cleanup_temp_files([temp_name])
        raise


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(to_jsonable(payload), ensure_ascii=False, indent=2, sort_keys=True) + "\n")
    return path


def read_json(path: Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    path = Path(path)
    _atomic_write(path, frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"))
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    _atomic_write(path, text)
    return path


def cleanup_temp_files(file_paths: Iterable[str | os.PathLike[str]]) -> None:
    for path in file_paths:
        if os.path.exists(path):
            os.remove(path)
