"""映射文件读写

    T
    <4 个浮点数>  × 4 行
    b
    <4 个浮点数>

空格分隔，全精度。
"""

from pathlib import Path
from typing import List, Union

import numpy as np

from errors import ModelFileError
from gait_data import atomic_write_text, format_float

from .linear import LinearMap

PathLike = Union[str, Path]


def _row(values) -> str:
    return " ".join(format_float(v) for v in values)


def write_map(linear_map: LinearMap, path: PathLike) -> Path:
    """写出映射文件"""
    lines = ["T"] + [_row(r) for r in linear_map.T] + ["b", _row(linear_map.b)]
    return atomic_write_text(path, "\n".join(lines) + "\n")


def load_map(path: PathLike) -> LinearMap:
    """读取映射文件

    Raises:
        ModelFileError: 格式错误
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        lines: List[str] = [line.strip() for line in f if line.strip()]
    if len(lines) != 7 or lines[0] != "T" or lines[5] != "b":
        raise ModelFileError(f"{path}: expected 'T', 4 rows, 'b', 1 row")
    try:
        T = np.array([[float(v) for v in line.split()] for line in lines[1:5]])
        b = np.array([float(v) for v in lines[6].split()])
        return LinearMap(T, b)
    except ValueError as e:
        raise ModelFileError(f"{path}: {e}") from e
