"""KMeans 聚类（numpy 实现，确定性初始化）

初始化为带种子的贪心最远点法：首个中心由种子随机选取，之后每次取
离已选中心最远的点。出现空簇时以 seed + 重启次数 重新初始化。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Literal, Sequence, Tuple

import numpy as np

from errors import EmptyCluster, TooFewSamples
from features import LowerFeature, UpperFeature
from log import get_logger

logger = get_logger(__name__)

ClusterSpace = Literal["paired", "pooled"]


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """聚类结果

    Attributes:
        k: 簇数
        centroids: (k, d) 中心
        assignments: cycle_index → 簇号
        seed: 实际使用的种子（含重启偏移）
        inertia_history: 每次分配后的簇内平方和
        n_iter: 迭代次数
        space: 聚类空间 paired | pooled
    """
    k: int
    centroids: np.ndarray
    assignments: Dict[int, int]
    seed: int
    inertia_history: Tuple[float, ...] = ()
    n_iter: int = 0
    space: str = "paired"

    def sizes(self) -> np.ndarray:
        """每簇的周期数"""
        return np.bincount(np.fromiter(self.assignments.values(), dtype=int), minlength=self.k)

    def members(self, cluster_id: int) -> List[int]:
        """簇内的 cycle_index（升序）"""
        return sorted(c for c, label in self.assignments.items() if label == cluster_id)

    @property
    def inertia(self) -> float:
        return self.inertia_history[-1] if self.inertia_history else 0.0


def _farthest_point_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    chosen = [int(rng.integers(points.shape[0]))]
    nearest = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        idx = int(np.argmax(nearest))
        chosen.append(idx)
        nearest = np.minimum(nearest, np.sum((points - points[idx]) ** 2, axis=1))
    return points[chosen].copy()


@dataclass
class _LloydResult:
    centroids: np.ndarray
    labels: np.ndarray
    history: List[float] = field(default_factory=list)
    n_iter: int = 0
    empty: bool = False


def _lloyd(points: np.ndarray, centroids: np.ndarray, max_iter: int) -> _LloydResult:
    result = _LloydResult(centroids=centroids, labels=np.full(points.shape[0], -1))
    k = centroids.shape[0]
    for it in range(1, max_iter + 1):
        dist = ((points[:, None, :] - result.centroids[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dist, axis=1)
        result.history.append(float(dist[np.arange(points.shape[0]), labels].sum()))
        result.n_iter = it
        counts = np.bincount(labels, minlength=k)
        if np.any(counts == 0):
            result.labels = labels
            result.empty = True
            return result
        if np.array_equal(labels, result.labels):
            break
        result.labels = labels
        result.centroids = np.array([points[labels == c].mean(axis=0) for c in range(k)])
    return result


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    max_restarts: int = 10,
) -> Tuple[np.ndarray, np.ndarray, List[float], int, int]:
    """KMeans

    Returns:
        (centroids, labels, inertia_history, n_iter, 使用的种子)

    Raises:
        TooFewSamples: 点数少于 k
        EmptyCluster: 重启 max_restarts 次后仍有空簇
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < k:
        raise TooFewSamples(f"need at least k={k} points, got {points.shape[0] if points.ndim else 0}")
    if k < 1:
        raise TooFewSamples("k must be >= 1")

    for restart in range(max_restarts + 1):
        attempt_seed = seed + restart
        rng = np.random.default_rng(attempt_seed)
        result = _lloyd(points, _farthest_point_init(points, k, rng), max_iter)
        if not result.empty:
            return result.centroids, result.labels, result.history, result.n_iter, attempt_seed
        logger.warning("empty cluster, restarting", seed=attempt_seed, restart=restart + 1)

    raise EmptyCluster(f"empty cluster persisted after {max_restarts} restarts (k={k})")


def cluster_features(
    X: Sequence[UpperFeature],
    Y: Sequence[LowerFeature],
    k: int = 9,
    seed: int = 0,
    space: ClusterSpace = "paired",
    max_iter: int = 300,
    max_restarts: int = 10,
) -> ClusterModel:
    """对上下肢特征聚类

    paired: 每个周期一个 8 维点 (x_i; y_i)
    pooled: X 与 Y 合并为 2m 个 4 维点，周期所属簇取其 y_i 点的簇

    Raises:
        TooFewSamples: 周期数少于 k
        EmptyCluster: 空簇无法消除
    """
    X, Y = list(X), list(Y)
    if len(X) != len(Y):
        raise TooFewSamples(f"{len(X)} upper vs {len(Y)} lower features")
    m = len(X)
    if m < k:
        raise TooFewSamples(f"clustering into k={k} needs at least {k} cycles, got {m}")

    xm = np.array([f.x for f in X], dtype=float).reshape(-1, 4)
    ym = np.array([f.y for f in Y], dtype=float).reshape(-1, 4)
    if space == "paired":
        points = np.hstack([xm, ym])
    elif space == "pooled":
        points = np.vstack([xm, ym])
    else:
        raise ValueError(f"unknown cluster space: {space}")

    centroids, labels, history, n_iter, used_seed = kmeans(points, k, seed, max_iter, max_restarts)
    cycle_labels = labels if space == "paired" else labels[m:]
    assignments = {int(f.cycle_index): int(label) for f, label in zip(Y, cycle_labels)}

    logger.info("features clustered", k=k, m=m, space=space, n_iter=n_iter, inertia=round(history[-1], 4))
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assignments,
        seed=used_seed,
        inertia_history=tuple(history),
        n_iter=n_iter,
        space=space,
    )
