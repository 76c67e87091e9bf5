"""逐周期流水线（一周期滞后）

对每个输入周期 j：提取上肢特征 x_j → y′_j = T·x_j + b → 求解权重 a_j
→ 还原髋 / 膝曲线，并在周期 j+1 期间输出。输出曲线按固定的名义周期
推进相位，因此实际周期长度偏离名义周期时会产生相位误差。

特征提取失败的周期被跳过：不产生新输出，沿用上一条轨迹。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config import RunConfig
from errors import FeatureIncomplete, ModelMissing
from features import ChangeRateBand, build_upper_feature
from gait_data import GaitCycle, GaitRecording, JointId, resample_cycle, segment_cycles
from log import get_logger
from mapping import LinearMap, apply_map
from restoration import LowerCurves, ReferenceSet, RestorationWeights, evaluate_curves, solve_weights

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class CycleOutput:
    """单个输入周期的输出

    Attributes:
        input_cycle: 输入周期 j
        emit_cycle: 输出周期 j+1
        y_prime: 映射得到的下肢特征
        weights: 还原权重
        curves: 输出曲线在 emit_cycle 上的相位归一化结果（N 点）
        timestamps: 输出采样时刻（秒）
        samples: 逐采样输出的髋 / 膝角度
    """
    input_cycle: int
    emit_cycle: int
    y_prime: np.ndarray
    weights: RestorationWeights
    curves: LowerCurves
    timestamps: np.ndarray
    samples: LowerCurves

    @property
    def emit_start(self) -> float:
        return float(self.timestamps[0])


@dataclass
class PipelineOutput:
    """流水线结果

    Attributes:
        cycles: 切分得到的输入周期
        outputs: 成功的输出（每个成功提取特征的周期一条）
        skipped: 特征提取失败的输入周期
        held: 沿用上一条轨迹的输出周期
    """
    cycles: List[GaitCycle]
    outputs: List[CycleOutput] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)
    held: List[int] = field(default_factory=list)

    def emitted(self) -> Dict[int, LowerCurves]:
        """emit_cycle → 输出曲线"""
        return {o.emit_cycle: o.curves for o in self.outputs}


def run_pipeline(
    recording: GaitRecording,
    band: Optional[ChangeRateBand],
    linear_map: Optional[LinearMap],
    refs: Optional[ReferenceSet],
    config: Optional[RunConfig] = None,
) -> PipelineOutput:
    """运行完整流水线

    Raises:
        ModelMissing: 缺少滤波器、映射或参考集
        NoCyclesFound: 记录无法切分
    """
    missing = [name for name, obj in (("band", band), ("map", linear_map), ("refs", refs)) if obj is None]
    if missing:
        raise ModelMissing(f"pipeline needs model(s): {', '.join(missing)}")

    config = config or RunConfig()
    fs = recording.sample_rate
    nominal = config.simulation.nominal_period
    grid = config.segmentation.grid_size
    cycles = segment_cycles(recording, config.segmentation)
    result = PipelineOutput(cycles=cycles)

    for pos, cycle in enumerate(cycles):
        emit = cycle.index + 1
        try:
            upper = build_upper_feature(cycle, band, config.features)
        except FeatureIncomplete as e:
            result.skipped.append(cycle.index)
            if result.outputs:
                result.held.append(emit)
            logger.warning("cycle skipped, holding previous output", cycle=cycle.index, reason=str(e))
            continue

        y_prime = apply_map(linear_map, upper)
        weights = solve_weights(y_prime, refs, config.restoration.cond_threshold)

        if pos + 1 < len(cycles):
            start, end = cycles[pos + 1].start_sample, cycles[pos + 1].end_sample
        else:
            start = cycle.end_sample
            end = start + max(2, int(round(nominal * fs)))
        t = np.arange(start, end + 1) / fs
        samples = evaluate_curves(weights, refs, ((t - t[0]) / nominal) % 1.0)

        curves = LowerCurves(
            hip=resample_cycle(samples.hip[:-1], grid, closing=samples.hip[-1]),
            knee=resample_cycle(samples.knee[:-1], grid, closing=samples.knee[-1]),
        )
        result.outputs.append(CycleOutput(
            input_cycle=cycle.index,
            emit_cycle=emit,
            y_prime=y_prime,
            weights=weights,
            curves=curves,
            timestamps=t[:-1],
            samples=LowerCurves(hip=samples.hip[:-1], knee=samples.knee[:-1]),
        ))

    logger.info(
        "pipeline finished",
        cycles=len(cycles),
        emitted=len(result.outputs),
        skipped=len(result.skipped),
    )
    return result


def original_lower(cycle: GaitCycle) -> LowerCurves:
    """周期的原始髋 / 膝曲线"""
    return LowerCurves(hip=cycle.curve(JointId.HIP), knee=cycle.curve(JointId.KNEE))
