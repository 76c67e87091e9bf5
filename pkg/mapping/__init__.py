"""映射辨识模块

上肢特征 → 下肢特征的线性映射：最小二乘辨识、应用、残差统计。
"""

from .io import load_map, write_map
from .linear import (
    LinearMap,
    ResidualStats,
    apply_map,
    assemble_design,
    identify,
    operator_norm,
    render_residual_table,
    residual_stats,
    split_holdout,
)

__all__ = [
    "LinearMap",
    "ResidualStats",
    "apply_map",
    "assemble_design",
    "identify",
    "operator_norm",
    "render_residual_table",
    "residual_stats",
    "split_holdout",
    "load_map",
    "write_map",
]
