"""线性映射 y = T·x + b 的最小二乘辨识

对每个输出分量 j 求解 Φ·(t_j, b_j)ᵀ ≈ Y_j，Φ 的第 i 行为 (x_iᵀ, 1)。
求解走 Φ 的 QR 分解 + 上三角回代，不显式求 (ΦᵀΦ)⁻¹。
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import solve_triangular

from errors import MisalignedPairs, NonFiniteValue, RankDeficient, TooFewSamples
from features import LowerFeature, UpperFeature
from log import get_logger

logger = get_logger(__name__)

MIN_SAMPLES = 5
DEFAULT_RANK_THRESHOLD = 1e8

FeatureInput = Union[np.ndarray, Sequence[UpperFeature], Sequence[LowerFeature]]


@dataclass(frozen=True, eq=False)
class LinearMap:
    """线性算子 T (4×4) 与偏置 b (4)"""
    T: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        T = np.array(self.T, dtype=float)
        b = np.array(self.b, dtype=float)
        if T.shape != (4, 4) or b.shape != (4,):
            raise ValueError(f"expected T 4x4 and b 4, got {T.shape} and {b.shape}")
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(b))):
            raise NonFiniteValue("linear map has non-finite entries")
        T.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls) -> "LinearMap":
        return cls(np.eye(4), np.zeros(4))


@dataclass(frozen=True, eq=False)
class ResidualStats:
    """残差 y′ − y 的逐分量均值与总体标准差"""
    mean: np.ndarray
    std: np.ndarray
    m: int

    def rows(self) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        return tuple(float(v) for v in self.mean), tuple(float(v) for v in self.std)


def _matrix(features: FeatureInput, attr: str) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """特征序列或 (m,4) 数组 → (矩阵, cycle_index 或 None)"""
    if isinstance(features, np.ndarray):
        return np.atleast_2d(np.asarray(features, dtype=float)), None
    items = list(features)
    if not items:
        return np.empty((0, 4)), np.empty(0, dtype=int)
    matrix = np.array([getattr(f, attr) for f in items], dtype=float)
    return matrix, np.array([f.cycle_index for f in items])


def _aligned(X: FeatureInput, Y: FeatureInput) -> Tuple[np.ndarray, np.ndarray]:
    xm, xi = _matrix(X, "x")
    ym, yi = _matrix(Y, "y")
    if xm.shape[0] != ym.shape[0]:
        raise MisalignedPairs(f"{xm.shape[0]} upper vs {ym.shape[0]} lower features")
    if xi is not None and yi is not None and not np.array_equal(xi, yi):
        raise MisalignedPairs("upper and lower features are not aligned by cycle_index")
    return xm, ym


def assemble_design(X: FeatureInput) -> np.ndarray:
    """设计矩阵 Φ (m×5)，第 i 行为 (x_i1..x_i4, 1)"""
    xm, _ = _matrix(X, "x")
    return np.column_stack([xm, np.ones(xm.shape[0])])


def apply_map(linear_map: LinearMap, x: Union[UpperFeature, np.ndarray]) -> np.ndarray:
    """y′ = T·x + b；x 可为 (4,) 或 (m,4)"""
    xv = x.x if isinstance(x, UpperFeature) else np.asarray(x, dtype=float)
    if xv.ndim == 1:
        return linear_map.T @ xv + linear_map.b
    return xv @ linear_map.T.T + linear_map.b


def residual_stats(linear_map: LinearMap, X: FeatureInput, Y: FeatureInput) -> ResidualStats:
    """残差统计（总体标准差）

    Raises:
        TooFewSamples: 少于 2 对
    """
    xm, ym = _aligned(X, Y)
    if xm.shape[0] < 2:
        raise TooFewSamples(f"residual statistics need at least 2 pairs, got {xm.shape[0]}")
    residual = apply_map(linear_map, xm) - ym
    return ResidualStats(mean=residual.mean(axis=0), std=residual.std(axis=0), m=int(xm.shape[0]))


def identify(
    X: FeatureInput,
    Y: FeatureInput,
    rank_threshold: float = DEFAULT_RANK_THRESHOLD,
) -> Tuple[LinearMap, ResidualStats]:
    """最小二乘辨识 T̂, b̂

    Args:
        X: 上肢特征（UpperFeature 序列或 (m,4) 数组）
        Y: 下肢特征（LowerFeature 序列或 (m,4) 数组）
        rank_threshold: Φ 条件数上限

    Returns:
        (LinearMap, 训练残差统计)

    Raises:
        TooFewSamples: m < 5
        MisalignedPairs: 未按 cycle_index 对齐
        RankDeficient: Φ 条件数超过阈值
    """
    xm, ym = _aligned(X, Y)
    m = xm.shape[0]
    if m < MIN_SAMPLES:
        raise TooFewSamples(f"identification needs at least {MIN_SAMPLES} cycles, got {m}")

    phi = np.column_stack([xm, np.ones(m)])
    cond = float(np.linalg.cond(phi))
    if not np.isfinite(cond) or cond > rank_threshold:
        raise RankDeficient(f"design matrix condition number {cond:.3g} exceeds {rank_threshold:.3g}")

    q, r = np.linalg.qr(phi)
    coef = solve_triangular(r, q.T @ ym)
    linear_map = LinearMap(T=coef[:4].T, b=coef[4])
    stats = residual_stats(linear_map, xm, ym)

    logger.info("map identified", m=m, cond=round(cond, 2), residual_std=[round(s, 4) for s in stats.std])
    return linear_map, stats


def split_holdout(
    X: Sequence,
    Y: Sequence,
    fraction: float,
    seed: int = 0,
) -> Tuple[list, list, list, list]:
    """按种子随机划分训练 / 留出集

    Returns:
        (train_X, train_Y, test_X, test_Y)，各部分保持原有周期顺序
    """
    X, Y = list(X), list(Y)
    if len(X) != len(Y):
        raise MisalignedPairs(f"{len(X)} upper vs {len(Y)} lower features")
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"holdout fraction must lie in [0, 1), got {fraction}")
    n_test = int(round(fraction * len(X)))
    if fraction > 0:
        n_test = max(n_test, 1)
    order = np.random.default_rng(seed).permutation(len(X))
    test = set(int(i) for i in order[:n_test])
    train_idx = [i for i in range(len(X)) if i not in test]
    test_idx = sorted(test)
    return (
        [X[i] for i in train_idx], [Y[i] for i in train_idx],
        [X[i] for i in test_idx], [Y[i] for i in test_idx],
    )


def operator_norm(linear_map: LinearMap) -> float:
    """‖T‖₂：‖y′(x₁) − y′(x₂)‖ ≤ ‖T‖₂·‖x₁ − x₂‖"""
    return float(np.linalg.norm(linear_map.T, 2))


def render_residual_table(stats: ResidualStats, title: str = "Linear mapping residual") -> str:
    """残差统计的表格文本（均值行 + 标准差行）"""
    header = f"{'':<12}" + "".join(f"{f'y{j + 1}':>12}" for j in range(len(stats.mean)))
    mean_row = f"{'Mean(deg)':<12}" + "".join(f"{v:>12.4g}" for v in stats.mean)
    std_row = f"{'Std(deg)':<12}" + "".join(f"{v:>12.4f}" for v in stats.std)
    return "\n".join([title, header, mean_row, std_row, f"m = {stats.m} (population std)"])
