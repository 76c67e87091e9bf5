"""波峰 / 波谷提取

候选点为周期曲线（首尾相接）的局部极小 / 极大值。候选点任一侧
±flank_window 个点内的 |变化率| 超过上限，或两侧都低于下限，则视为
扰动并剔除。两侧都超过上限的候选点是单点尖峰的顶点：用邻域二次
拟合替换后重新搜索，使叠加在真实极值上的尖峰不会遮住它。
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from errors import FeatureIncomplete, TooShort

from .band import JointBand, in_window
from .rate import periodic_change_rate

# 尖峰修复：替换 i-1..i+1，用 i±2, i±3 做二次最小二乘拟合
_REPAIR_OFFSETS = np.array([-3, -2, 2, 3])
_REPAIR_TARGETS = np.array([-1, 0, 1])


@dataclass(frozen=True)
class Extrema:
    """一个周期内首个波谷与首个波峰

    Attributes:
        trough: 波谷值（度）
        peak: 波峰值（度）
        trough_phase: 波谷相位 [0,1)
        peak_phase: 波峰相位 [0,1)
    """
    trough: float
    peak: float
    trough_phase: float
    peak_phase: float


def _candidates(y: np.ndarray, kind: str) -> np.ndarray:
    prev, nxt = np.roll(y, 1), np.roll(y, -1)
    if kind == "min":
        mask = (y < prev) & (y <= nxt)
    else:
        mask = (y > prev) & (y >= nxt)
    return np.flatnonzero(mask)


def _flanks(abs_rate: np.ndarray, i: int, width: int) -> Tuple[float, float]:
    n = abs_rate.size
    left = abs_rate[[(i - k) % n for k in range(1, width + 1)]].max()
    right = abs_rate[[(i + k) % n for k in range(1, width + 1)]].max()
    return float(left), float(right)


def _repair(y: np.ndarray, i: int) -> None:
    n = y.size
    coeffs = np.polyfit(_REPAIR_OFFSETS, y[(i + _REPAIR_OFFSETS) % n], 2)
    y[(i + _REPAIR_TARGETS) % n] = np.polyval(coeffs, _REPAIR_TARGETS)


def parabolic_vertex(y: np.ndarray, i: int) -> Tuple[float, float]:
    """三点抛物线顶点 (偏移, 值)"""
    n = y.size
    a, b, c = y[(i - 1) % n], y[i], y[(i + 1) % n]
    denom = a - 2.0 * b + c
    if denom == 0:
        return 0.0, float(b)
    delta = float(np.clip(0.5 * (a - c) / denom, -0.5, 0.5))
    return delta, float(b - 0.25 * (a - c) * delta)


def _first_in_window(indices: List[int], n: int, window: Tuple[float, float]) -> int:
    lo = window[0] if window[1] - window[0] < 1.0 else 0.0
    inside = [i for i in indices if in_window(i / n, window)]
    if not inside:
        return -1
    return min(inside, key=lambda i: (((i / n) - lo) % 1.0, i))


def extract_extrema(
    curve: np.ndarray,
    band: JointBand,
    sample_rate: float,
    flank_window: int = 2,
    repair_iterations: int = 5,
    refine: bool = True,
) -> Extrema:
    """提取首个波谷和首个波峰

    Args:
        curve: 一个相位归一化周期的曲线
        band: 该关节的变化率带与相位窗口
        sample_rate: 曲线点率（点/秒）
        flank_window: 两侧变化率检查的点数
        repair_iterations: 尖峰修复的最大轮数，0 表示不修复
        refine: 是否做抛物线顶点细化

    Returns:
        Extrema

    Raises:
        FeatureIncomplete: 没有通过滤波的波谷或波峰
    """
    y = np.array(curve, dtype=float)
    n = y.size
    if n < 2 * max(3, flank_window) + 1:
        raise TooShort(f"curve of {n} points is too short for extrema search")

    for iteration in range(repair_iterations + 1):
        abs_rate = np.abs(periodic_change_rate(y, sample_rate))
        survivors = {"min": [], "max": []}
        spikes = []
        for kind in ("min", "max"):
            for i in _candidates(y, kind):
                left, right = _flanks(abs_rate, int(i), flank_window)
                if band.accepts_flanks(left, right):
                    survivors[kind].append(int(i))
                elif left > band.upper_rate and right > band.upper_rate:
                    spikes.append(int(i))
        if not spikes or iteration == repair_iterations:
            break
        for i in spikes:
            _repair(y, i)

    trough_i = _first_in_window(survivors["min"], n, band.trough_window)
    peak_i = _first_in_window(survivors["max"], n, band.peak_window)
    if trough_i < 0 or peak_i < 0:
        missing = "trough" if trough_i < 0 else "peak"
        raise FeatureIncomplete(f"no surviving {missing} in the search window")

    if refine:
        dt, trough = parabolic_vertex(y, trough_i)
        dp, peak = parabolic_vertex(y, peak_i)
    else:
        dt, trough, dp, peak = 0.0, float(y[trough_i]), 0.0, float(y[peak_i])

    return Extrema(
        trough=trough,
        peak=peak,
        trough_phase=((trough_i + dt) / n) % 1.0,
        peak_phase=((peak_i + dp) / n) % 1.0,
    )
