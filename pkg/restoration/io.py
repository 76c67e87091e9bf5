"""参考集文件读写

4 个块，每块四行:

    ybar <4 个浮点数>
    fourier_hip <2·order+1 个浮点数>
    fourier_knee <2·order+1 个浮点数>
    fit_rms <髋拟合 RMS> <膝拟合 RMS>
"""

from pathlib import Path
from typing import Union

import numpy as np

from errors import ModelFileError, SingularReferenceMatrix
from gait_data import atomic_write_text, format_float

from .reference import N_REFERENCES, FourierSeries, ReferenceSet

PathLike = Union[str, Path]

_KEYS = ("ybar", "fourier_hip", "fourier_knee", "fit_rms")
_BLOCK = len(_KEYS)


def write_references(refs: ReferenceSet, path: PathLike) -> Path:
    """写出参考集文件"""
    lines = []
    for vector, hip, knee in zip(refs.vectors, refs.hip, refs.knee):
        rows = (vector, hip.coefficients, knee.coefficients, (hip.rms, knee.rms))
        for key, values in zip(_KEYS, rows):
            lines.append(" ".join([key] + [format_float(v) for v in values]))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def load_references(path: PathLike) -> ReferenceSet:
    """读取参考集文件

    Raises:
        ModelFileError: 格式错误
        SingularReferenceMatrix: 参考矩阵奇异
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.split() for line in f if line.strip()]
    if len(lines) != _BLOCK * N_REFERENCES:
        raise ModelFileError(f"{path}: expected {_BLOCK * N_REFERENCES} lines, got {len(lines)}")

    vectors, hip, knee = [], [], []
    try:
        for block in range(N_REFERENCES):
            rows = lines[_BLOCK * block:_BLOCK * (block + 1)]
            keys = tuple(row[0] for row in rows)
            if keys != _KEYS:
                raise ModelFileError(f"{path}: block {block + 1} must be {' / '.join(_KEYS)}")
            ybar, hip_coeffs, knee_coeffs, rms = [np.array([float(v) for v in row[1:]]) for row in rows]
            if ybar.size != 4:
                raise ModelFileError(f"{path}: ybar needs 4 values")
            if rms.size != 2 or np.any(rms < 0):
                raise ModelFileError(f"{path}: fit_rms needs 2 non-negative values")
            vectors.append(ybar)
            hip.append(FourierSeries(hip_coeffs, rms=float(rms[0])))
            knee.append(FourierSeries(knee_coeffs, rms=float(rms[1])))
        return ReferenceSet(np.array(vectors), tuple(hip), tuple(knee))
    except (SingularReferenceMatrix, ModelFileError):
        raise
    except ValueError as e:
        raise ModelFileError(f"{path}: {e}") from e
