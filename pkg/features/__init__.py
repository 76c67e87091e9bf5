"""特征提取模块

变化率带通滤波与每周期峰谷特征向量。
"""

from .band import FULL_WINDOW, ChangeRateBand, JointBand, fit_band, in_window, load_band, write_band
from .extrema import Extrema, extract_extrema, parabolic_vertex
from .rate import estimate_change_rate, periodic_change_rate
from .vectors import (
    FeatureSet,
    LowerFeature,
    UpperFeature,
    build_lower_feature,
    build_upper_feature,
    cycle_rates,
    extract_features,
    fit_windows,
    train_band,
)

__all__ = [
    "FULL_WINDOW",
    "ChangeRateBand",
    "JointBand",
    "fit_band",
    "in_window",
    "load_band",
    "write_band",
    "Extrema",
    "extract_extrema",
    "parabolic_vertex",
    "estimate_change_rate",
    "periodic_change_rate",
    "FeatureSet",
    "LowerFeature",
    "UpperFeature",
    "build_lower_feature",
    "build_upper_feature",
    "cycle_rates",
    "extract_features",
    "fit_windows",
    "train_band",
]
