"""误差分析：相位误差、幅值误差、上下肢协调相位差

相位以周期比例表示，符号约定：正值表示第一条曲线滞后于第二条。
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from errors import InconsistentLength, TooFewCycles
from gait_data import GaitCycle, JointId, LOWER_JOINTS
from log import get_logger
from restoration import LowerCurves

from .pipeline import original_lower

logger = get_logger(__name__)

MIN_PAIRS = 2


@dataclass(frozen=True, eq=False)
class LagStats:
    """逐周期延迟及其均值 / 总体标准差（周期比例）"""
    lags: np.ndarray

    @property
    def n(self) -> int:
        return int(self.lags.size)

    @property
    def mean(self) -> float:
        return float(self.lags.mean())

    @property
    def std(self) -> float:
        return float(self.lags.std())

    @property
    def mean_deg(self) -> float:
        """均值（周期角度，比例 × 360）"""
        return self.mean * 360.0

    @property
    def std_deg(self) -> float:
        return self.std * 360.0


def _cross_correlation(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """c[k] = Σ_n a[n]·b[n−k]（循环，去均值）"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InconsistentLength(f"curves must have equal length, got {a.shape} and {b.shape}")
    a = a - a.mean()
    b = b - b.mean()
    return np.fft.ifft(np.fft.fft(a) * np.conj(np.fft.fft(b))).real


def _lag_index(corr: np.ndarray) -> int:
    """相关峰位置，映射到 (−n/2, n/2]"""
    n = corr.size
    k = int(np.argmax(corr))
    return k - n if k > n // 2 else k


def circular_lag(a: np.ndarray, b: np.ndarray) -> float:
    """a 相对 b 的循环延迟（周期比例，(−0.5, 0.5]）"""
    corr = _cross_correlation(a, b)
    return _lag_index(corr) / corr.size


def _lower_lag_index(output: LowerCurves, original: LowerCurves) -> Tuple[int, int]:
    corr = sum(_cross_correlation(output[j], original[j]) for j in LOWER_JOINTS)
    return _lag_index(corr), corr.size


def _check_pairs(outputs: Sequence, originals: Sequence) -> None:
    if len(outputs) != len(originals):
        raise InconsistentLength(f"{len(outputs)} outputs vs {len(originals)} originals")
    if len(outputs) < MIN_PAIRS:
        raise TooFewCycles(f"need at least {MIN_PAIRS} comparable cycles, got {len(outputs)}")


def phase_error(outputs: Sequence[LowerCurves], originals: Sequence[LowerCurves]) -> LagStats:
    """输出曲线相对（前一周期）原始曲线的延迟

    髋、膝互相关求和后取峰值。

    Raises:
        TooFewCycles: 少于 2 对
    """
    _check_pairs(outputs, originals)
    lags = []
    for out, orig in zip(outputs, originals):
        k, n = _lower_lag_index(out, orig)
        lags.append(k / n)
    return LagStats(np.array(lags))


def amplitude_error(
    outputs: Sequence[LowerCurves],
    originals: Sequence[LowerCurves],
) -> Dict[JointId, Tuple[float, float]]:
    """补偿每周期相位延迟后的逐点差值统计（输出 − 原始）

    Returns:
        关节 → (均值, 总体标准差)，单位度

    Raises:
        TooFewCycles: 少于 2 对
    """
    _check_pairs(outputs, originals)
    diffs: Dict[JointId, List[np.ndarray]] = {j: [] for j in LOWER_JOINTS}
    for out, orig in zip(outputs, originals):
        k, _ = _lower_lag_index(out, orig)
        for joint in LOWER_JOINTS:
            diffs[joint].append(np.roll(out[joint], -k) - orig[joint])
    stats = {}
    for joint, chunks in diffs.items():
        pooled = np.concatenate(chunks)
        stats[joint] = (float(pooled.mean()), float(pooled.std()))
    return stats


def phase_difference(upper: Sequence[np.ndarray], lower: Sequence[np.ndarray]) -> LagStats:
    """下肢（髋）曲线相对上肢（肩）曲线的延迟

    Raises:
        TooFewCycles: 少于 2 个周期
    """
    _check_pairs(upper, lower)
    return LagStats(np.array([circular_lag(lo, up) for up, lo in zip(upper, lower)]))


def baseline_phase_difference(cycles: Sequence[GaitCycle]) -> LagStats:
    """原始记录中同一周期肩与髋的相位差（正常行走分布）"""
    return phase_difference(
        [c.curve(JointId.SHOULDER) for c in cycles],
        [c.curve(JointId.HIP) for c in cycles],
    )


@dataclass(frozen=True, eq=False)
class ExperimentErrors:
    """单次实验的误差

    Attributes:
        name: 实验名
        phase_error: 相位误差
        amplitude: 关节 → (均值, 标准差)
        phase_difference: 肩（周期 j+1）与输出髋（周期 j+1）的相位差
        baseline: 原始记录的肩髋相位差
        emitted: 输出周期数
        skipped: 跳过的输入周期数
    """
    name: str
    phase_error: LagStats
    amplitude: Mapping[JointId, Tuple[float, float]]
    phase_difference: LagStats
    baseline: LagStats
    emitted: int
    skipped: int = 0


def compare_emissions(
    name: str,
    cycles: Sequence[GaitCycle],
    emitted: Mapping[int, LowerCurves],
    skipped: int = 0,
) -> ExperimentErrors:
    """比较输出与原始记录

    输出周期 e 对应原始周期 e−1（一周期滞后）；协调相位差只在记录中
    存在周期 e 时计算。
    """
    by_index = {c.index: c for c in cycles}
    emit_ids = sorted(emitted)

    outputs = [emitted[e] for e in emit_ids if e - 1 in by_index]
    originals = [original_lower(by_index[e - 1]) for e in emit_ids if e - 1 in by_index]

    coordinated = [e for e in emit_ids if e in by_index]
    shoulder = [by_index[e].curve(JointId.SHOULDER) for e in coordinated]
    emitted_hip = [emitted[e].hip for e in coordinated]

    errors = ExperimentErrors(
        name=name,
        phase_error=phase_error(outputs, originals),
        amplitude=amplitude_error(outputs, originals),
        phase_difference=phase_difference(shoulder, emitted_hip),
        baseline=baseline_phase_difference(cycles),
        emitted=len(emit_ids),
        skipped=skipped,
    )
    logger.info(
        "experiment analyzed",
        experiment=name,
        phase_mean=round(errors.phase_error.mean, 4),
        hip_std=round(errors.amplitude[JointId.HIP][1], 3),
        knee_std=round(errors.amplitude[JointId.KNEE][1], 3),
    )
    return errors
