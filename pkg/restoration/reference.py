"""参考向量、参考曲线与曲线还原

还原步骤：
1. 由映射得到的下肢特征 y′ 求解 y′ = Σ a_k·ȳ_k
2. 输出曲线 f′(phase) = Σ a_k·f_k(phase)，f_k 为参考曲线的傅里叶拟合
"""

from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from errors import OrderTooHigh, SingularReferenceMatrix, TooFewClusters
from features import LowerFeature
from gait_data import GaitCycle, JointId
from log import get_logger

from .kmeans import ClusterModel

logger = get_logger(__name__)

N_REFERENCES = 4
# 条件数超过此值视为奇异，构造时拒绝
SINGULAR_THRESHOLD = 1e12
# 条件数超过此值时求解仍进行，但结果标记为病态
ILL_CONDITIONED_THRESHOLD = 1e8


def _basis(phase: np.ndarray, order: int) -> np.ndarray:
    """[1, cos 2πφ, sin 2πφ, ..., cos 2π·order·φ, sin 2π·order·φ]"""
    phase = np.asarray(phase, dtype=float)
    columns = [np.ones_like(phase)]
    for h in range(1, order + 1):
        columns.append(np.cos(2.0 * np.pi * h * phase))
        columns.append(np.sin(2.0 * np.pi * h * phase))
    return np.stack(columns, axis=-1)


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """截断傅里叶级数 a0 + Σ (a_h cos 2πhφ + b_h sin 2πhφ)

    Attributes:
        coefficients: [a0, a1, b1, ..., a_order, b_order]
        rms: 拟合残差均方根（度）
    """
    coefficients: np.ndarray
    rms: float = 0.0

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or coeffs.size % 2 != 1:
            raise ValueError(f"expected 2*order+1 coefficients, got {coeffs.size}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def order(self) -> int:
        return (self.coefficients.size - 1) // 2

    def __call__(self, phase) -> np.ndarray:
        return _basis(phase, self.order) @ self.coefficients


def fit_reference_curve(raw: np.ndarray, fit_order: int = 6) -> FourierSeries:
    """在相位网格 j/N 上最小二乘拟合傅里叶级数

    Raises:
        OrderTooHigh: 2·order + 1 > N
    """
    y = np.asarray(raw, dtype=float)
    n = y.size
    if 2 * fit_order + 1 > n:
        raise OrderTooHigh(f"order {fit_order} needs {2 * fit_order + 1} points, curve has {n}")
    design = _basis(np.arange(n) / n, fit_order)
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coeffs - y) ** 2)))
    return FourierSeries(coeffs, rms)


@dataclass(frozen=True, eq=False)
class LowerCurves:
    """一个周期的髋、膝曲线"""
    hip: np.ndarray
    knee: np.ndarray

    def __getitem__(self, joint: JointId) -> np.ndarray:
        if joint == JointId.HIP:
            return self.hip
        if joint == JointId.KNEE:
            return self.knee
        raise KeyError(joint)

    def __add__(self, other: "LowerCurves") -> "LowerCurves":
        return LowerCurves(self.hip + other.hip, self.knee + other.knee)


@dataclass(frozen=True, eq=False)
class RawReferences:
    """选出的代表簇（拟合前）

    Attributes:
        vectors: (4, 4) 每行一个 ȳ_k
        hip: (4, N) 簇内平均髋曲线
        knee: (4, N) 簇内平均膝曲线
        cluster_ids: 对应簇号
        sizes: 对应簇大小
    """
    vectors: np.ndarray
    hip: np.ndarray
    knee: np.ndarray
    cluster_ids: Tuple[int, ...]
    sizes: Tuple[int, ...]


def _check_matrix(vectors: np.ndarray) -> float:
    matrix = np.asarray(vectors, dtype=float).T
    if matrix.shape != (N_REFERENCES, N_REFERENCES):
        raise SingularReferenceMatrix(f"need {N_REFERENCES} reference vectors of 4 components")
    cond = float(np.linalg.cond(matrix))
    if not np.isfinite(cond) or cond > SINGULAR_THRESHOLD or np.linalg.matrix_rank(matrix) < N_REFERENCES:
        raise SingularReferenceMatrix(f"reference matrix is singular (condition number {cond:.3g})")
    return cond


@dataclass(frozen=True, eq=False)
class ReferenceSet:
    """四个参考向量与对应的髋 / 膝参考曲线

    Attributes:
        vectors: (4, 4) 每行一个 ȳ_k = (髋谷, 髋峰, 膝峰, 膝谷)
        hip: 4 条髋参考曲线
        knee: 4 条膝参考曲线
    """
    vectors: np.ndarray
    hip: Tuple[FourierSeries, ...]
    knee: Tuple[FourierSeries, ...]
    condition_number: float = field(init=False, default=0.0)

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=float)
        if len(self.hip) != N_REFERENCES or len(self.knee) != N_REFERENCES:
            raise SingularReferenceMatrix(f"need {N_REFERENCES} hip and knee reference curves")
        cond = _check_matrix(vectors)
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "hip", tuple(self.hip))
        object.__setattr__(self, "knee", tuple(self.knee))
        object.__setattr__(self, "condition_number", cond)

    @property
    def matrix(self) -> np.ndarray:
        """[ȳ₁ ȳ₂ ȳ₃ ȳ₄]，列为参考向量"""
        return self.vectors.T

    @property
    def fit_order(self) -> int:
        return self.hip[0].order

    @property
    def fit_rms(self) -> float:
        """所有参考曲线中最大的拟合 RMS"""
        return max(s.rms for s in self.hip + self.knee)


@dataclass(frozen=True, eq=False)
class RestorationWeights:
    """还原权重 a₁..a₄"""
    a: np.ndarray
    ill_conditioned: bool = False
    residual: float = 0.0


def select_representative(
    model: ClusterModel,
    Y: Sequence[LowerFeature],
    cycles: Sequence[GaitCycle],
) -> RawReferences:
    """取成员最多的 4 个簇（同样大小取簇号小者）

    参考向量为簇内 LowerFeature 的均值；参考原始曲线为簇内周期
    相位归一化髋 / 膝曲线的逐点均值。

    Raises:
        TooFewClusters: 非空簇少于 4 个
        SingularReferenceMatrix: 参考矩阵奇异
    """
    by_index_y: Dict[int, np.ndarray] = {f.cycle_index: f.y for f in Y}
    by_index_cycle: Dict[int, GaitCycle] = {c.index: c for c in cycles}

    sizes = model.sizes()
    non_empty = [c for c in range(model.k) if sizes[c] > 0]
    if len(non_empty) < N_REFERENCES:
        raise TooFewClusters(f"{len(non_empty)} non-empty cluster(s); need {N_REFERENCES}")
    chosen = sorted(non_empty, key=lambda c: (-sizes[c], c))[:N_REFERENCES]

    vectors, hips, knees = [], [], []
    for cluster_id in chosen:
        members = model.members(cluster_id)
        vectors.append(np.mean([by_index_y[i] for i in members], axis=0))
        hips.append(np.mean([by_index_cycle[i].curve(JointId.HIP) for i in members], axis=0))
        knees.append(np.mean([by_index_cycle[i].curve(JointId.KNEE) for i in members], axis=0))

    vectors = np.array(vectors)
    _check_matrix(vectors)
    logger.info("references selected", clusters=chosen, sizes=[int(sizes[c]) for c in chosen])
    return RawReferences(
        vectors=vectors,
        hip=np.array(hips),
        knee=np.array(knees),
        cluster_ids=tuple(int(c) for c in chosen),
        sizes=tuple(int(sizes[c]) for c in chosen),
    )


def build_reference_set(raw: RawReferences, fit_order: int = 6) -> ReferenceSet:
    """拟合参考曲线并构造 ReferenceSet"""
    hip = tuple(fit_reference_curve(curve, fit_order) for curve in raw.hip)
    knee = tuple(fit_reference_curve(curve, fit_order) for curve in raw.knee)
    refs = ReferenceSet(raw.vectors, hip, knee)
    logger.info("references fitted", fit_order=fit_order, fit_rms=round(refs.fit_rms, 5))
    return refs


def solve_weights(
    y_prime: np.ndarray,
    refs: ReferenceSet,
    cond_threshold: float = ILL_CONDITIONED_THRESHOLD,
) -> RestorationWeights:
    """求解 y′ = Σ a_k·ȳ_k

    条件数超过 cond_threshold 时照常求解，但结果标记为病态并记录警告。
    """
    y_prime = np.asarray(y_prime, dtype=float)
    try:
        a = np.linalg.solve(refs.matrix, y_prime)
    except np.linalg.LinAlgError as e:
        raise SingularReferenceMatrix(f"reference matrix is singular: {e}") from e
    residual = float(np.linalg.norm(refs.matrix @ a - y_prime))
    ill = refs.condition_number > cond_threshold
    if ill:
        logger.warning("ill-conditioned weight solve", cond=refs.condition_number)
    return RestorationWeights(a=a, ill_conditioned=ill, residual=residual)


def evaluate_curves(weights: RestorationWeights, refs: ReferenceSet, phase: np.ndarray) -> LowerCurves:
    """在任意相位处求 Σ a_k·f_k"""
    phase = np.asarray(phase, dtype=float)
    hip = np.zeros_like(phase)
    knee = np.zeros_like(phase)
    for a_k, f_hip, f_knee in zip(weights.a, refs.hip, refs.knee):
        hip = hip + a_k * f_hip(phase)
        knee = knee + a_k * f_knee(phase)
    return LowerCurves(hip=hip, knee=knee)


def restore_curve(weights: RestorationWeights, refs: ReferenceSet, n: int = 100) -> LowerCurves:
    """在 n 个相位点 j/n 上还原髋、膝曲线"""
    return evaluate_curves(weights, refs, np.arange(n) / n)
