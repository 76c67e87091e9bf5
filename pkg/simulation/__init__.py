"""流水线仿真与误差分析

一周期滞后的逐周期流水线、相位 / 幅值误差、上下肢协调相位差、
误差报告与 SVG 图。
"""

from .analysis import (
    ExperimentErrors,
    LagStats,
    amplitude_error,
    baseline_phase_difference,
    circular_lag,
    compare_emissions,
    phase_difference,
    phase_error,
)
from .pipeline import CycleOutput, PipelineOutput, original_lower, run_pipeline
from .plots import plot_coordination, plot_feature_distribution, plot_restoration
from .report import (
    MANIFEST_NAME,
    REPORT_COLUMNS,
    REPORT_NAME,
    TRAJECTORY_COLUMNS,
    ErrorReport,
    load_manifest,
    load_trajectory,
    write_manifest,
    write_trajectory,
)

__all__ = [
    "ExperimentErrors",
    "LagStats",
    "amplitude_error",
    "baseline_phase_difference",
    "circular_lag",
    "compare_emissions",
    "phase_difference",
    "phase_error",
    "CycleOutput",
    "PipelineOutput",
    "original_lower",
    "run_pipeline",
    "plot_coordination",
    "plot_feature_distribution",
    "plot_restoration",
    "MANIFEST_NAME",
    "REPORT_COLUMNS",
    "REPORT_NAME",
    "TRAJECTORY_COLUMNS",
    "ErrorReport",
    "load_manifest",
    "load_trajectory",
    "write_manifest",
    "write_trajectory",
]
