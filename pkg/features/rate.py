"""关节角度变化率"""

import numpy as np

from errors import TooShort


def estimate_change_rate(curve: np.ndarray, sample_rate: float) -> np.ndarray:
    """变化率（度/秒）

    内部点用中心差分，两端用单侧差分，输出与输入等长。

    Args:
        curve: 角度序列（度）
        sample_rate: 采样率（Hz），对相位网格曲线为 grid_size / period

    Raises:
        TooShort: 少于 3 个点
    """
    y = np.asarray(curve, dtype=float)
    if y.ndim != 1 or y.size < 3:
        raise TooShort(f"need at least 3 points to estimate a change rate, got {y.size}")
    return np.gradient(y, 1.0 / sample_rate)


def periodic_change_rate(curve: np.ndarray, sample_rate: float) -> np.ndarray:
    """周期曲线的中心差分变化率（首尾相接）"""
    y = np.asarray(curve, dtype=float)
    if y.ndim != 1 or y.size < 3:
        raise TooShort(f"need at least 3 points to estimate a change rate, got {y.size}")
    return (np.roll(y, -1) - np.roll(y, 1)) * (sample_rate / 2.0)
