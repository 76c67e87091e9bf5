"""合成步态记录

每个关节在每个周期内是截断傅里叶模型：

    angle(phase) = mean + offset + scale * Σ_h a_h · sin(2π·h·phase + φ_h)

周期时长、幅值按种子抖动，叠加高斯噪声和单点尖峰。生成器同时给出
真值周期边界和每周期真值极值（伴随文件），用于测试对照。

默认系数只含相位为 0 或 π 的正弦项，因此 phase=0 处振荡分量为零，
幅值在周期间变化时曲线仍连续。
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from errors import InvalidParams
from log import get_logger

from .base import ALL_JOINTS, UPPER_JOINTS, GaitRecording, JointId

logger = get_logger(__name__)

TRUTH_COLUMNS: Tuple[str, ...] = (
    "shoulder_trough", "shoulder_peak",
    "elbow_trough", "elbow_peak",
    "hip_trough", "hip_peak",
    "knee_peak", "knee_trough",
)

# 真值极值的相位网格
_TRUTH_GRID = 4096


@dataclass(frozen=True)
class JointHarmonics:
    """单关节傅里叶系数

    Attributes:
        mean: 均值（度）
        amplitudes: 各次谐波幅值（度）
        phases: 各次谐波相位（弧度）
    """
    mean: float
    amplitudes: Tuple[float, ...]
    phases: Tuple[float, ...]

    def __post_init__(self):
        if len(self.amplitudes) != len(self.phases):
            raise InvalidParams("amplitudes and phases must have equal length")

    def waveform(self, phase: np.ndarray, scale=1.0, offset=0.0) -> np.ndarray:
        """在给定相位处求值（scale / offset 可为与 phase 同形的数组）"""
        phase = np.asarray(phase, dtype=float)
        osc = np.zeros_like(phase)
        for h, (a, phi) in enumerate(zip(self.amplitudes, self.phases), start=1):
            osc = osc + a * np.sin(2.0 * np.pi * h * phase + phi)
        return self.mean + offset + scale * osc


DEFAULT_HARMONICS: Dict[JointId, JointHarmonics] = {
    JointId.SHOULDER: JointHarmonics(5.0, (20.0, 1.5, 0.5), (0.0, 0.0, math.pi)),
    JointId.ELBOW: JointHarmonics(-30.0, (12.0, 1.0, 0.4), (0.0, math.pi, 0.0)),
    JointId.HIP: JointHarmonics(18.0, (22.0, 2.0, 0.8), (0.0, 0.0, 0.0)),
    JointId.KNEE: JointHarmonics(-55.5, (47.5, 3.0, 1.0), (math.pi, 0.0, math.pi)),
}


@dataclass(frozen=True)
class MotionMode:
    """运动模式（用于植入可聚类的步态类型）

    Attributes:
        scale: 关节 → 幅值倍率（缺省 1.0）
        offset: 关节 → 均值偏移（度，缺省 0.0）
        weight: 被抽中的相对概率
    """
    scale: Mapping[JointId, float] = field(default_factory=dict)
    offset: Mapping[JointId, float] = field(default_factory=dict)
    weight: float = 1.0

    def scale_for(self, joint: JointId) -> float:
        return float(self.scale.get(joint, 1.0))

    def offset_for(self, joint: JointId) -> float:
        return float(self.offset.get(joint, 0.0))


# 相互分离的下肢模式（髋 / 膝幅值倍率与均值偏移），供 synth --modes 使用
PLANTED_MODES: Tuple[MotionMode, ...] = (
    MotionMode(),
    MotionMode(scale={JointId.HIP: 1.25, JointId.KNEE: 0.9}, offset={JointId.HIP: 2.0, JointId.KNEE: -3.0}),
    MotionMode(scale={JointId.HIP: 0.8, JointId.KNEE: 1.15}, offset={JointId.HIP: -3.0, JointId.KNEE: 2.0}),
    MotionMode(scale={JointId.HIP: 1.1, JointId.KNEE: 1.2}, offset={JointId.HIP: 4.0, JointId.KNEE: 4.0}),
)


@dataclass(frozen=True)
class SynthParams:
    """合成参数

    Attributes:
        n_cycles: 完整周期数
        base_period: 基准周期（秒）
        sample_rate: 采样率（Hz）
        harmonics: 每关节傅里叶系数
        period_jitter: 周期相对标准差
        amplitude_jitter: 幅值相对标准差
        coupling: 幅值抖动中各关节共享分量的比例 (0~1)
        noise_std: 加性高斯噪声标准差（度）
        spike_rate: 每周期每关节尖峰数
        spike_scale: 尖峰幅度 / 一次谐波幅值
        modes: 运动模式（为空表示单一模式）
        upper_phase_lead: 上肢曲线超前下肢的相位（周期比例）
        seed: 随机种子
    """
    n_cycles: int = 20
    base_period: float = 1.1
    sample_rate: float = 100.0
    harmonics: Mapping[JointId, JointHarmonics] = field(default_factory=lambda: dict(DEFAULT_HARMONICS))
    period_jitter: float = 0.03
    amplitude_jitter: float = 0.05
    coupling: float = 0.8
    noise_std: float = 0.0
    spike_rate: float = 0.0
    spike_scale: float = 10.0
    modes: Tuple[MotionMode, ...] = ()
    upper_phase_lead: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        """校验参数

        Raises:
            InvalidParams: 参数非法
        """
        if self.n_cycles < 1:
            raise InvalidParams("n_cycles must be >= 1")
        if not self.base_period > 0 or not self.sample_rate > 0:
            raise InvalidParams("base_period and sample_rate must be positive")
        for name in ("period_jitter", "amplitude_jitter", "noise_std", "spike_rate", "spike_scale"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidParams(f"{name} must be a finite value >= 0")
        if not 0.0 <= self.coupling <= 1.0:
            raise InvalidParams("coupling must lie in [0, 1]")
        missing = [j.value for j in ALL_JOINTS if j not in self.harmonics]
        if missing:
            raise InvalidParams(f"missing harmonics for: {', '.join(missing)}")
        if any(m.weight <= 0 for m in self.modes):
            raise InvalidParams("mode weights must be positive")


@dataclass(frozen=True)
class CycleTruth:
    """单周期真值

    Attributes:
        cycle_index: 周期序号
        start_sample: 起始采样点
        end_sample: 结束采样点（下一周期起点）
        extrema: 8 个真值极值，顺序见 TRUTH_COLUMNS
        mode: 运动模式序号（无模式为 -1）
    """
    cycle_index: int
    start_sample: int
    end_sample: int
    extrema: Tuple[float, ...]
    mode: int = -1

    @property
    def upper(self) -> np.ndarray:
        """(肩谷, 肩峰, 肘谷, 肘峰)"""
        return np.array(self.extrema[:4])

    @property
    def lower(self) -> np.ndarray:
        """(髋谷, 髋峰, 膝峰, 膝谷)"""
        return np.array(self.extrema[4:])


@dataclass(frozen=True, eq=False)
class SynthResult:
    """合成结果：记录 + 每周期真值"""
    recording: GaitRecording
    truths: List[CycleTruth]
    params: SynthParams


def _truth_extrema(params: SynthParams, scales: np.ndarray, offsets: np.ndarray) -> Tuple[float, ...]:
    grid = np.arange(_TRUTH_GRID) / _TRUTH_GRID
    values = {}
    for col, joint in enumerate(ALL_JOINTS):
        curve = params.harmonics[joint].waveform(grid, scales[col], offsets[col])
        values[joint] = (float(curve.min()), float(curve.max()))
    return (
        values[JointId.SHOULDER][0], values[JointId.SHOULDER][1],
        values[JointId.ELBOW][0], values[JointId.ELBOW][1],
        values[JointId.HIP][0], values[JointId.HIP][1],
        values[JointId.KNEE][1], values[JointId.KNEE][0],
    )


def synthesize_recording(params: Optional[SynthParams] = None) -> SynthResult:
    """生成合成记录

    给定种子结果确定。记录前后各有约 1/4 周期的过渡段，使每个完整周期
    两端都有可检测的髋关节上升过零点。

    Args:
        params: 合成参数，None 使用默认值

    Returns:
        SynthResult

    Raises:
        InvalidParams: 参数非法
    """
    params = params or SynthParams()
    params.validate()

    rng = np.random.default_rng(params.seed)
    spike_rng = np.random.default_rng([params.seed, 1])
    n = params.n_cycles
    fs = params.sample_rate
    n_joints = len(ALL_JOINTS)

    periods = params.base_period * (1.0 + params.period_jitter * rng.standard_normal(n))
    periods = np.clip(periods, 0.5 * params.base_period, None)

    if params.modes:
        weights = np.array([m.weight for m in params.modes], dtype=float)
        mode_ids = rng.choice(len(params.modes), size=n, p=weights / weights.sum())
    else:
        mode_ids = np.full(n, -1)

    shared = rng.standard_normal(n)
    own = rng.standard_normal((n, n_joints))
    mix = params.coupling * shared[:, None] + math.sqrt(1.0 - params.coupling ** 2) * own
    scales = 1.0 + params.amplitude_jitter * mix
    offsets = np.zeros((n, n_joints))
    for c, mode_id in enumerate(mode_ids):
        if mode_id >= 0:
            mode = params.modes[mode_id]
            scales[c] *= [mode.scale_for(j) for j in ALL_JOINTS]
            offsets[c] = [mode.offset_for(j) for j in ALL_JOINTS]

    # 过渡段取半个采样点的偏移，使过零点不落在采样点上
    lead = (round(0.25 * params.base_period * fs) + 0.5) / fs
    starts = lead + np.concatenate([[0.0], np.cumsum(periods)])
    n_samples = int(math.floor((starts[-1] + lead) * fs)) + 1
    t = np.arange(n_samples) / fs

    cycle_of = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, n - 1)
    phase = (t - starts[cycle_of]) / periods[cycle_of]

    arrays: Dict[JointId, np.ndarray] = {}
    for col, joint in enumerate(ALL_JOINTS):
        lead_phase = params.upper_phase_lead if joint in UPPER_JOINTS else 0.0
        arrays[joint] = params.harmonics[joint].waveform(
            phase + lead_phase, scales[cycle_of, col], offsets[cycle_of, col]
        )
        if params.noise_std > 0:
            arrays[joint] = arrays[joint] + rng.normal(0.0, params.noise_std, n_samples)

    boundaries = np.ceil(starts * fs).astype(int)
    if params.spike_rate > 0:
        whole, frac = divmod(params.spike_rate, 1.0)
        for c in range(n):
            lo, hi = boundaries[c], boundaries[c + 1]
            for col, joint in enumerate(ALL_JOINTS):
                count = int(whole) + int(spike_rng.random() < frac)
                for _ in range(count):
                    pos = int(spike_rng.integers(lo, hi))
                    sign = 1.0 if spike_rng.random() < 0.5 else -1.0
                    magnitude = params.spike_scale * abs(params.harmonics[joint].amplitudes[0] * scales[c, col])
                    arrays[joint][pos] += sign * magnitude

    truths = [
        CycleTruth(
            cycle_index=c,
            start_sample=int(boundaries[c]),
            end_sample=int(boundaries[c + 1]),
            extrema=_truth_extrema(params, scales[c], offsets[c]),
            mode=int(mode_ids[c]),
        )
        for c in range(n)
    ]

    recording = GaitRecording.from_arrays(arrays, fs)
    logger.info(
        "recording synthesized",
        cycles=n,
        samples=n_samples,
        seed=params.seed,
        modes=len(params.modes),
    )
    return SynthResult(recording=recording, truths=truths, params=params)
