"""步态周期切分与相位归一化

周期边界取去均值、中值去尖峰并滑动平均平滑后的髋关节曲线的上升过零点；
周期长度的初值由髋关节自相关的主延迟估计。
"""

from typing import List, Optional

import numpy as np
from scipy.ndimage import median_filter, uniform_filter1d
from scipy.signal import correlate

from config import SegmentationConfig
from errors import FlatSignal, NoCyclesFound, SliceTooShort
from log import get_logger

from .base import ALL_JOINTS, GaitCycle, GaitRecording, JointId

logger = get_logger(__name__)

_FLAT_PTP = 1e-9


def estimate_period(samples: np.ndarray, sample_rate: float) -> float:
    """由自相关主延迟估计周期

    取第一次变负之后的自相关最大值对应的延迟。

    Args:
        samples: 角度序列
        sample_rate: 采样率（Hz）

    Returns:
        周期（秒）

    Raises:
        FlatSignal: 序列无波动
        NoCyclesFound: 自相关没有正的次峰
    """
    x = np.asarray(samples, dtype=float)
    x = x - x.mean()
    ac = correlate(x, x, mode="full", method="fft")[x.size - 1:] / x.size
    if ac[0] <= 0:
        raise FlatSignal("trace has no variance")

    negative = np.flatnonzero(ac < 0)
    if negative.size == 0:
        raise NoCyclesFound("autocorrelation never turns negative; recording shorter than one period")
    first_neg = int(negative[0])
    lag = first_neg + int(np.argmax(ac[first_neg:]))
    if ac[lag] <= 0:
        raise NoCyclesFound("no repeating pattern in the hip trace")
    return lag / sample_rate


def resample_cycle(samples: np.ndarray, n: int, closing: Optional[float] = None) -> np.ndarray:
    """线性插值到 [0,1) 上 n 个等距相位点

    片段第 k 个采样位于相位 k/L；相位 1 处的值取 closing（下一周期首个
    采样），未给出时线性外推。相位 1 本身不在输出中。

    Args:
        samples: 一个周期的采样
        n: 网格点数
        closing: 相位 1 处的值

    Raises:
        SliceTooShort: 片段少于 2 个采样或 n < 2
    """
    y = np.asarray(samples, dtype=float)
    if y.size < 2 or n < 2:
        raise SliceTooShort(f"cannot resample {y.size} samples onto {n} points")

    length = y.size
    end_value = float(closing) if closing is not None else 2.0 * y[-1] - y[-2]
    positions = np.append(np.arange(length) / length, 1.0)
    values = np.append(y, end_value)
    return np.interp(np.arange(n) / n, positions, values)


def ascending_crossings(signal: np.ndarray, min_spacing: float) -> List[int]:
    """上升过零点（s[i-1] < 0 <= s[i]），相邻点间隔不小于 min_spacing 个采样"""
    idx = np.flatnonzero((signal[:-1] < 0) & (signal[1:] >= 0)) + 1
    kept: List[int] = []
    for i in idx:
        if not kept or i - kept[-1] >= min_spacing:
            kept.append(int(i))
    return kept


def segment_cycles(
    recording: GaitRecording,
    config: Optional[SegmentationConfig] = None,
) -> List[GaitCycle]:
    """切分完整步态周期

    首尾不完整的片段被丢弃；返回的周期首尾相接、不重叠、按时间排序。

    Args:
        recording: 四关节记录
        config: 切分配置，None 使用默认值

    Returns:
        GaitCycle 列表，每条曲线 grid_size 点

    Raises:
        FlatSignal: 髋关节曲线无波动
        NoCyclesFound: 不足一个完整周期
    """
    config = config or SegmentationConfig()
    fs = recording.sample_rate
    hip = recording.trace(JointId.HIP)

    if np.ptp(hip) < _FLAT_PTP:
        raise FlatSignal("hip trace is constant")

    # 3 点中值先去掉单点尖峰，否则尖峰经平滑后会制造假过零点
    despiked = median_filter(hip, size=3, mode="nearest")
    period = estimate_period(despiked, fs)
    window = max(1, int(round(config.smoothing_fraction * period * fs)))
    if window % 2 == 0:
        window += 1
    smoothed = uniform_filter1d(despiked - despiked.mean(), size=window, mode="nearest")

    crossings = ascending_crossings(smoothed, config.min_spacing_fraction * period * fs)
    if len(crossings) < 2:
        raise NoCyclesFound(
            f"found {len(crossings)} ascending hip crossing(s); need two to bound a cycle"
        )

    cycles = []
    for index, (start, end) in enumerate(zip(crossings[:-1], crossings[1:])):
        curves = {
            joint: resample_cycle(
                recording.trace(joint)[start:end],
                config.grid_size,
                closing=recording.trace(joint)[end],
            )
            for joint in ALL_JOINTS
        }
        cycles.append(GaitCycle(
            index=index,
            start_sample=start,
            end_sample=end,
            period=(end - start) / fs,
            curves=curves,
        ))

    logger.info(
        "cycles segmented",
        count=len(cycles),
        period_s=round(period, 4),
        smoothing_window=window,
    )
    return cycles
