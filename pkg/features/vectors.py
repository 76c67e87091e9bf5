"""上 / 下肢特征向量

上肢 x = (肩谷, 肩峰, 肘谷, 肘峰)
下肢 y = (髋谷, 髋峰, 膝峰, 膝谷)   注意膝关节先峰后谷
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import FeatureConfig
from errors import FeatureIncomplete
from gait_data import ALL_JOINTS, GaitCycle, JointId
from log import get_logger

from .band import FULL_WINDOW, ChangeRateBand, fit_band
from .extrema import Extrema, extract_extrema, parabolic_vertex
from .rate import estimate_change_rate

logger = get_logger(__name__)

# 窗口最小半宽（相位）
MIN_HALF_WIDTH = 0.05


@dataclass(frozen=True, eq=False)
class UpperFeature:
    """上肢特征向量 x_i"""
    x: np.ndarray
    cycle_index: int

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.shape != (4,):
            raise FeatureIncomplete(f"upper feature needs 4 components, got {x.shape}")
        if x[0] > x[1] or x[2] > x[3]:
            raise FeatureIncomplete(f"cycle {self.cycle_index}: trough above peak in upper feature")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


@dataclass(frozen=True, eq=False)
class LowerFeature:
    """下肢特征向量 y_i"""
    y: np.ndarray
    cycle_index: int

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        if y.shape != (4,):
            raise FeatureIncomplete(f"lower feature needs 4 components, got {y.shape}")
        if y[0] > y[1] or y[3] > y[2]:
            raise FeatureIncomplete(f"cycle {self.cycle_index}: trough above peak in lower feature")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)


def _joint_extrema(cycle: GaitCycle, joint: JointId, band: ChangeRateBand, config: FeatureConfig) -> Extrema:
    return extract_extrema(
        cycle.curve(joint),
        band[joint],
        cycle.grid_rate,
        flank_window=config.flank_window,
        repair_iterations=config.repair_iterations,
        refine=config.refine,
    )


def build_upper_feature(
    cycle: GaitCycle,
    band: ChangeRateBand,
    config: Optional[FeatureConfig] = None,
) -> UpperFeature:
    """提取上肢特征

    Raises:
        FeatureIncomplete: 肩或肘缺少波谷 / 波峰
    """
    config = config or FeatureConfig()
    shoulder = _joint_extrema(cycle, JointId.SHOULDER, band, config)
    elbow = _joint_extrema(cycle, JointId.ELBOW, band, config)
    return UpperFeature(
        x=np.array([shoulder.trough, shoulder.peak, elbow.trough, elbow.peak]),
        cycle_index=cycle.index,
    )


def build_lower_feature(
    cycle: GaitCycle,
    band: ChangeRateBand,
    config: Optional[FeatureConfig] = None,
) -> LowerFeature:
    """提取下肢特征

    Raises:
        FeatureIncomplete: 髋或膝缺少波谷 / 波峰
    """
    config = config or FeatureConfig()
    hip = _joint_extrema(cycle, JointId.HIP, band, config)
    knee = _joint_extrema(cycle, JointId.KNEE, band, config)
    return LowerFeature(
        y=np.array([hip.trough, hip.peak, knee.peak, knee.trough]),
        cycle_index=cycle.index,
    )


@dataclass
class FeatureSet:
    """按周期对齐的特征集合

    Attributes:
        upper: 上肢特征
        lower: 下肢特征
        cycles: 成功提取的周期
        skipped: 提取失败的周期序号
    """
    upper: List[UpperFeature] = field(default_factory=list)
    lower: List[LowerFeature] = field(default_factory=list)
    cycles: List[GaitCycle] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.upper)

    @property
    def X(self) -> np.ndarray:
        return np.array([f.x for f in self.upper]).reshape(-1, 4)

    @property
    def Y(self) -> np.ndarray:
        return np.array([f.y for f in self.lower]).reshape(-1, 4)


def extract_features(
    cycles: Sequence[GaitCycle],
    band: ChangeRateBand,
    config: Optional[FeatureConfig] = None,
) -> FeatureSet:
    """批量提取特征，失败的周期记入 skipped"""
    config = config or FeatureConfig()
    result = FeatureSet()
    for cycle in cycles:
        try:
            upper = build_upper_feature(cycle, band, config)
            lower = build_lower_feature(cycle, band, config)
        except FeatureIncomplete as e:
            logger.warning("cycle skipped", cycle=cycle.index, reason=str(e))
            result.skipped.append(cycle.index)
            continue
        result.upper.append(upper)
        result.lower.append(lower)
        result.cycles.append(cycle)
    return result


def cycle_rates(cycles: Sequence[GaitCycle]) -> Dict[JointId, List[np.ndarray]]:
    """各周期各关节的变化率"""
    return {
        joint: [estimate_change_rate(c.curve(joint), c.grid_rate) for c in cycles]
        for joint in ALL_JOINTS
    }


def _phase_window(phases: np.ndarray, sigma: float) -> Tuple[float, float]:
    angles = 2.0 * np.pi * phases
    center = (np.arctan2(np.sin(angles).mean(), np.cos(angles).mean()) / (2.0 * np.pi)) % 1.0
    deviation = ((phases - center + 0.5) % 1.0) - 0.5
    half = max(sigma * float(deviation.std()), MIN_HALF_WIDTH)
    if half >= 0.5:
        return FULL_WINDOW
    return ((center - half) % 1.0, (center + half) % 1.0)


def fit_windows(
    cycles: Sequence[GaitCycle],
    band: ChangeRateBand,
    config: Optional[FeatureConfig] = None,
) -> ChangeRateBand:
    """由训练周期估计极值相位窗口（圆均值 ± window_sigma 倍标准差）

    每个训练周期取全局最小 / 最大值的相位（抛物线细化），对噪声比
    “首个候选点”稳健。没有训练周期时保留原窗口。
    """
    config = config or FeatureConfig()
    if not cycles:
        return band
    windows = {}
    for joint in ALL_JOINTS:
        troughs, peaks = [], []
        for cycle in cycles:
            curve = cycle.curve(joint)
            n = curve.size
            lo, hi = int(np.argmin(curve)), int(np.argmax(curve))
            troughs.append(((lo + parabolic_vertex(curve, lo)[0]) / n) % 1.0)
            peaks.append(((hi + parabolic_vertex(curve, hi)[0]) / n) % 1.0)
        windows[joint] = (
            _phase_window(np.array(troughs), config.window_sigma),
            _phase_window(np.array(peaks), config.window_sigma),
        )
    logger.debug("phase windows fitted", cycles=len(cycles))
    return band.with_windows(windows)


def train_band(cycles: Sequence[GaitCycle], config: Optional[FeatureConfig] = None) -> ChangeRateBand:
    """拟合变化率带并估计相位窗口"""
    config = config or FeatureConfig()
    band = fit_band(cycle_rates(cycles), config.q_low, config.q_high)
    return fit_windows(cycles, band, config)
