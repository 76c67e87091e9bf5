"""变化率带通滤波器

每个关节一条 |变化率| 接受带，外加波谷 / 波峰出现的相位窗口。
相位窗口 lo > hi 表示跨越相位 0 的环绕窗口。

文件格式（每个关节一行）:

    joint,lower_rate,upper_rate,trough_phase_lo,trough_phase_hi,peak_phase_lo,peak_phase_hi
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, Mapping, Tuple, Union

import numpy as np

from errors import DegenerateDistribution, EmptyInput, InvalidParams, ModelFileError
from gait_data import ALL_JOINTS, JointId, atomic_write_text, format_float
from log import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]
FULL_WINDOW: Tuple[float, float] = (0.0, 1.0)


def in_window(phase: float, window: Tuple[float, float]) -> bool:
    """相位是否落在窗口内（支持环绕窗口）"""
    lo, hi = window
    if hi - lo >= 1.0:
        return True
    phase = phase % 1.0
    if lo <= hi:
        return lo <= phase <= hi
    return phase >= lo or phase <= hi


@dataclass(frozen=True)
class JointBand:
    """单关节变化率带与相位窗口

    Attributes:
        lower_rate: |变化率| 下限（度/秒）
        upper_rate: |变化率| 上限（度/秒）
        trough_window: 波谷相位窗口
        peak_window: 波峰相位窗口
    """
    lower_rate: float
    upper_rate: float
    trough_window: Tuple[float, float] = FULL_WINDOW
    peak_window: Tuple[float, float] = FULL_WINDOW

    def __post_init__(self):
        if not (0.0 <= self.lower_rate < self.upper_rate) or not np.isfinite(self.upper_rate):
            raise InvalidParams(
                f"band must satisfy 0 <= lower_rate < upper_rate, got ({self.lower_rate}, {self.upper_rate})"
            )

    def accepts_flanks(self, left: float, right: float) -> bool:
        """两侧变化率是否都不超过上限且不同时低于下限"""
        if left > self.upper_rate or right > self.upper_rate:
            return False
        return not (left < self.lower_rate and right < self.lower_rate)


@dataclass(frozen=True)
class ChangeRateBand:
    """四关节带通滤波器"""
    joints: Mapping[JointId, JointBand]

    def __post_init__(self):
        missing = [j.value for j in ALL_JOINTS if j not in self.joints]
        if missing:
            raise ModelFileError(f"band lacks joint(s): {', '.join(missing)}")
        object.__setattr__(self, "joints", {j: self.joints[j] for j in ALL_JOINTS})

    def __getitem__(self, joint: JointId) -> JointBand:
        return self.joints[joint]

    def widened(self, factor: float) -> "ChangeRateBand":
        """按比例放宽（下限除以、上限乘以 factor）"""
        return ChangeRateBand({
            j: replace(b, lower_rate=b.lower_rate / factor, upper_rate=b.upper_rate * factor)
            for j, b in self.joints.items()
        })

    def with_windows(
        self,
        windows: Mapping[JointId, Tuple[Tuple[float, float], Tuple[float, float]]],
    ) -> "ChangeRateBand":
        """替换相位窗口：joint → (trough_window, peak_window)"""
        joints = dict(self.joints)
        for joint, (trough, peak) in windows.items():
            joints[joint] = replace(joints[joint], trough_window=trough, peak_window=peak)
        return ChangeRateBand(joints)


def fit_band(
    rates: Mapping[JointId, Iterable[np.ndarray]],
    q_low: float = 2.0,
    q_high: float = 98.0,
) -> ChangeRateBand:
    """由多周期变化率拟合带通滤波器

    每个关节汇总所有周期的 |变化率|，取 q_low / q_high 百分位。

    Args:
        rates: 关节 → 各周期变化率序列
        q_low: 下限百分位
        q_high: 上限百分位

    Raises:
        EmptyInput: 某关节没有数据
        DegenerateDistribution: |变化率| 全部相等
    """
    if not 0.0 <= q_low < q_high <= 100.0:
        raise InvalidParams(f"percentiles must satisfy 0 <= q_low < q_high <= 100, got ({q_low}, {q_high})")

    joints: Dict[JointId, JointBand] = {}
    for joint in ALL_JOINTS:
        chunks = [np.abs(np.asarray(r, dtype=float)).ravel() for r in rates.get(joint, [])]
        pooled = np.concatenate(chunks) if chunks else np.empty(0)
        if pooled.size == 0:
            raise EmptyInput(f"no change-rate data for {joint.value}")
        if np.ptp(pooled) == 0:
            raise DegenerateDistribution(f"all change rates of {joint.value} are equal")
        lower, upper = np.percentile(pooled, [q_low, q_high])
        if not lower < upper:
            raise DegenerateDistribution(
                f"{joint.value}: percentiles {q_low}/{q_high} coincide at {lower}"
            )
        joints[joint] = JointBand(float(lower), float(upper))

    logger.debug(
        "band fitted",
        q_low=q_low,
        q_high=q_high,
        **{f"{j.value}_upper": round(b.upper_rate, 3) for j, b in joints.items()},
    )
    return ChangeRateBand(joints)


def write_band(band: ChangeRateBand, path: PathLike) -> Path:
    """写出滤波器文件"""
    lines = []
    for joint, b in band.joints.items():
        values = (b.lower_rate, b.upper_rate) + tuple(b.trough_window) + tuple(b.peak_window)
        lines.append(",".join([joint.value] + [format_float(v) for v in values]))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def load_band(path: PathLike) -> ChangeRateBand:
    """读取滤波器文件

    Raises:
        ModelFileError: 格式错误或缺少关节
    """
    path = Path(path)
    joints: Dict[JointId, JointBand] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            cells = line.strip().split(",")
            if len(cells) != 7:
                raise ModelFileError(f"{path}:{lineno}: expected 7 fields, got {len(cells)}")
            try:
                joint = JointId(cells[0])
                v = [float(c) for c in cells[1:]]
                joints[joint] = JointBand(v[0], v[1], (v[2], v[3]), (v[4], v[5]))
            except ValueError as e:
                raise ModelFileError(f"{path}:{lineno}: {e}") from e
    return ChangeRateBand(joints)
