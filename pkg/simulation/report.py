"""误差报告、输出轨迹与运行清单的文件格式

误差报告 CSV:   experiment,metric,joint,mean,std
    phase_error / phase_difference 以周期比例给出，*_deg 行为 × 360。
    experiment 列为 original 的行是原始记录的协调相位差基线。

输出轨迹 CSV:   emit_cycle,phase,hip_deg,knee_deg
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np
import yaml

from errors import ModelFileError, ModelMissing
from gait_data import LOWER_JOINTS, atomic_write_text, format_float
from restoration import LowerCurves

from .analysis import ExperimentErrors, LagStats
from .pipeline import PipelineOutput

PathLike = Union[str, Path]

REPORT_COLUMNS = ("experiment", "metric", "joint", "mean", "std")
TRAJECTORY_COLUMNS = ("emit_cycle", "phase", "hip_deg", "knee_deg")
MANIFEST_NAME = "run.yaml"
REPORT_NAME = "error_report.csv"
ORIGINAL = "original"

Row = Tuple[str, str, str, float, float]


def _lag_rows(experiment: str, metric: str, joint: str, stats: LagStats) -> List[Row]:
    return [
        (experiment, metric, joint, stats.mean, stats.std),
        (experiment, f"{metric}_deg", joint, stats.mean_deg, stats.std_deg),
    ]


@dataclass
class ErrorReport:
    """多次实验的误差报告

    Attributes:
        experiments: 每次实验的误差
    """
    experiments: List[ExperimentErrors] = field(default_factory=list)

    @property
    def baseline(self) -> LagStats:
        """所有实验原始记录合并的肩髋相位差"""
        return LagStats(np.concatenate([e.baseline.lags for e in self.experiments]))

    def rows(self) -> List[Row]:
        rows: List[Row] = []
        if self.experiments:
            rows += _lag_rows(ORIGINAL, "phase_difference", "shoulder-hip", self.baseline)
        for exp in self.experiments:
            rows += _lag_rows(exp.name, "phase_error", "lower", exp.phase_error)
            for joint in LOWER_JOINTS:
                mean, std = exp.amplitude[joint]
                rows.append((exp.name, "amplitude_error", joint.value, mean, std))
            rows += _lag_rows(exp.name, "phase_difference", "shoulder-hip", exp.phase_difference)
        return rows

    def to_csv(self, path: PathLike) -> Path:
        lines = [",".join(REPORT_COLUMNS)]
        for experiment, metric, joint, mean, std in self.rows():
            lines.append(",".join([experiment, metric, joint, format_float(mean), format_float(std)]))
        return atomic_write_text(path, "\n".join(lines) + "\n")

    def render(self) -> str:
        """恢复误差表与协调相位差表（文本）"""
        names = [e.name for e in self.experiments]
        width = max([12] + [len(n) + 2 for n in names])

        out = ["Restoration error (phase in cycles, amplitude in degrees)"]
        out.append(f"{'':<14}" + "".join(f"{n:>{width * 2}}" for n in names))
        out.append(f"{'':<14}" + "".join(f"{'mean':>{width}}{'std':>{width}}" for _ in names))
        out.append(f"{'Phase':<14}" + "".join(
            f"{e.phase_error.mean:>{width}.4f}{e.phase_error.std:>{width}.4f}" for e in self.experiments))
        for joint in LOWER_JOINTS:
            out.append(f"{joint.value.capitalize():<14}" + "".join(
                f"{e.amplitude[joint][0]:>{width}.4f}{e.amplitude[joint][1]:>{width}.4f}" for e in self.experiments))

        out.append("")
        out.append("Shoulder-hip phase difference (cycles)")
        columns = [("Original", self.baseline)] + [(e.name, e.phase_difference) for e in self.experiments]
        out.append(f"{'':<14}" + "".join(f"{n:>{width}}" for n, _ in columns))
        out.append(f"{'Mean':<14}" + "".join(f"{s.mean:>{width}.4f}" for _, s in columns))
        out.append(f"{'Std':<14}" + "".join(f"{s.std:>{width}.4f}" for _, s in columns))
        return "\n".join(out)


def write_trajectory(output: PipelineOutput, path: PathLike) -> Path:
    """写出输出轨迹（每个输出周期 N 行）"""
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for o in output.outputs:
        n = o.curves.hip.size
        for j in range(n):
            lines.append(",".join([
                str(o.emit_cycle),
                format_float(j / n),
                format_float(o.curves.hip[j]),
                format_float(o.curves.knee[j]),
            ]))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def load_trajectory(path: PathLike) -> Dict[int, LowerCurves]:
    """读取输出轨迹 → emit_cycle → 曲线

    Raises:
        ModelFileError: 表头不匹配
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = [row for row in csv.reader(f) if row]
    if not rows or tuple(rows[0]) != TRAJECTORY_COLUMNS:
        raise ModelFileError(f"{path}: unexpected trajectory header")

    grouped: Dict[int, Tuple[List[float], List[float]]] = {}
    try:
        for row in rows[1:]:
            cycle, _, hip, knee = row
            hips, knees = grouped.setdefault(int(cycle), ([], []))
            hips.append(float(hip))
            knees.append(float(knee))
    except ValueError as e:
        raise ModelFileError(f"{path}: {e}") from e
    return {c: LowerCurves(np.array(h), np.array(k)) for c, (h, k) in grouped.items()}


def write_manifest(path: PathLike, data: Dict[str, Any]) -> Path:
    """写出运行清单（YAML）"""
    text = yaml.safe_dump(data, default_flow_style=False, allow_unicode=True, sort_keys=False)
    return atomic_write_text(path, text)


def load_manifest(path: PathLike) -> Dict[str, Any]:
    """读取运行清单

    Raises:
        ModelMissing: 清单不存在
        ModelFileError: 清单格式错误
    """
    path = Path(path)
    if not path.exists():
        raise ModelMissing(f"{path} not found; run 'simulate' first")
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict) or not isinstance(data.get("experiments"), list):
        raise ModelFileError(f"{path}: manifest lacks an experiments list")
    return data
