"""记录文件读写

CSV 记录格式（逐字节确定）:

    # sample_rate_hz=<float>
    time_s,shoulder_deg,elbow_deg,hip_deg,knee_deg
    <每个采样一行>

UTF-8，LF 换行，小数点为 `.`。合成数据另有同名 `.meta.csv` 伴随文件。
"""

import csv
import os
import tempfile
from pathlib import Path
from typing import List, Union

import numpy as np

from errors import BadHeader, InconsistentLength, MissingColumn, NonFiniteValue
from log import get_logger

from .base import ALL_JOINTS, GaitRecording
from .synth import TRUTH_COLUMNS, CycleTruth

logger = get_logger(__name__)

PathLike = Union[str, Path]

SAMPLE_RATE_PREFIX = "# sample_rate_hz="
TIME_COLUMN = "time_s"
RECORDING_COLUMNS = [TIME_COLUMN] + [j.column for j in ALL_JOINTS]
SIDECAR_COLUMNS = ["cycle_index", "start_sample", "end_sample"] + list(TRUTH_COLUMNS) + ["mode"]


def format_float(value: float) -> str:
    """全精度浮点格式（最短可往返表示）"""
    return repr(float(value))


def atomic_write_text(path: PathLike, text: str) -> Path:
    """原子写入文本文件（临时文件 + rename）

    Args:
        path: 目标路径
        text: 文件内容

    Returns:
        目标路径
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def sidecar_path(path: PathLike) -> Path:
    """R.csv → R.meta.csv"""
    path = Path(path)
    return path.with_name(f"{path.stem}.meta.csv")


def write_recording(recording: GaitRecording, path: PathLike) -> Path:
    """写出记录 CSV

    Args:
        recording: 记录
        path: 输出路径
    """
    lines = [
        f"{SAMPLE_RATE_PREFIX}{format_float(recording.sample_rate)}",
        ",".join(RECORDING_COLUMNS),
    ]
    columns = [recording.times()] + [recording.trace(j) for j in ALL_JOINTS]
    for row in zip(*columns):
        lines.append(",".join(format_float(v) for v in row))

    out = atomic_write_text(path, "\n".join(lines) + "\n")
    logger.debug("recording written", path=str(out), samples=recording.n_samples)
    return out


def load_recording(path: PathLike, format: str = "csv") -> GaitRecording:
    """读取记录 CSV

    Args:
        path: 文件路径
        format: 仅支持 "csv"

    Returns:
        GaitRecording

    Raises:
        BadHeader: 表头或采样率行错误
        MissingColumn: 缺少关节列
        NonFiniteValue: 含 NaN / Inf
        InconsistentLength: 行长度不一致
    """
    if format != "csv":
        raise BadHeader(f"unsupported recording format: {format}")

    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        first = f.readline().rstrip("\r\n")
        reader = csv.reader(f)
        header = [h.strip() for h in next(reader, [])]
        rows = [row for row in reader if any(cell.strip() for cell in row)]

    if not first.startswith(SAMPLE_RATE_PREFIX):
        raise BadHeader(f"{path}: first line must be '{SAMPLE_RATE_PREFIX}<float>'")
    try:
        sample_rate = float(first[len(SAMPLE_RATE_PREFIX):])
    except ValueError as e:
        raise BadHeader(f"{path}: bad sample rate in '{first}'") from e
    if not np.isfinite(sample_rate) or sample_rate <= 0:
        raise BadHeader(f"{path}: sample rate must be a positive number")

    if not header or header[0] != TIME_COLUMN:
        raise BadHeader(f"{path}: second line must start with '{TIME_COLUMN}'")
    missing = [c for c in RECORDING_COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"{path}: missing column(s): {', '.join(missing)}")

    if not rows:
        raise InconsistentLength(f"{path}: no samples")
    for number, row in enumerate(rows):
        if len(row) != len(header):
            raise InconsistentLength(
                f"{path}: sample row {number} has {len(row)} fields, header has {len(header)}"
            )
    try:
        table = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as e:
        raise InconsistentLength(f"{path}: malformed sample row ({e})") from e
    if not np.all(np.isfinite(table)):
        bad_row = int(np.argwhere(~np.isfinite(table))[0][0])
        raise NonFiniteValue(f"{path}: non-finite value in sample row {bad_row}")

    arrays = {j: table[:, header.index(j.column)] for j in ALL_JOINTS}
    recording = GaitRecording.from_arrays(arrays, sample_rate)
    logger.debug("recording loaded", path=str(path), samples=recording.n_samples, sample_rate=sample_rate)
    return recording


def write_sidecar(truths: List[CycleTruth], path: PathLike) -> Path:
    """写出合成数据伴随文件（真值周期边界与极值）

    Args:
        truths: 每周期真值
        path: 记录路径（自动替换为 .meta.csv）或伴随文件路径
    """
    path = Path(path)
    if not path.name.endswith(".meta.csv"):
        path = sidecar_path(path)
    lines = [",".join(SIDECAR_COLUMNS)]
    for t in truths:
        cells = [str(t.cycle_index), str(t.start_sample), str(t.end_sample)]
        cells += [format_float(v) for v in t.extrema]
        cells.append(str(t.mode))
        lines.append(",".join(cells))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def load_sidecar(path: PathLike) -> List[CycleTruth]:
    """读取伴随文件

    Raises:
        BadHeader: 表头不匹配
    """
    path = Path(path)
    if not path.name.endswith(".meta.csv"):
        path = sidecar_path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = [row for row in csv.reader(f) if row]
    if not rows or rows[0] != SIDECAR_COLUMNS:
        raise BadHeader(f"{path}: unexpected sidecar header")

    truths = []
    n_truth = len(TRUTH_COLUMNS)
    for cells in rows[1:]:
        truths.append(CycleTruth(
            cycle_index=int(cells[0]),
            start_sample=int(cells[1]),
            end_sample=int(cells[2]),
            extrema=tuple(float(v) for v in cells[3:3 + n_truth]),
            mode=int(cells[3 + n_truth]),
        ))
    return truths
