"""特征还原模块

聚类选取参考向量 / 参考曲线，求解还原权重并重建下肢曲线。
"""

from .io import load_references, write_references
from .kmeans import ClusterModel, cluster_features, kmeans
from .reference import (
    ILL_CONDITIONED_THRESHOLD,
    N_REFERENCES,
    FourierSeries,
    LowerCurves,
    RawReferences,
    ReferenceSet,
    RestorationWeights,
    build_reference_set,
    evaluate_curves,
    fit_reference_curve,
    restore_curve,
    select_representative,
    solve_weights,
)

__all__ = [
    "load_references",
    "write_references",
    "ClusterModel",
    "cluster_features",
    "kmeans",
    "ILL_CONDITIONED_THRESHOLD",
    "N_REFERENCES",
    "FourierSeries",
    "LowerCurves",
    "RawReferences",
    "ReferenceSet",
    "RestorationWeights",
    "build_reference_set",
    "evaluate_curves",
    "fit_reference_curve",
    "restore_curve",
    "select_representative",
    "solve_weights",
]
