"""步态数据基础类型

定义关节角度序列、同步记录和单周期数据结构。
所有类型构造后不可变，可在线程间共享。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np

from errors import InconsistentLength, InvalidParams, MissingColumn, NonFiniteValue


class JointId(str, Enum):
    """关节标识

    右上肢（肩、肘）与左下肢（髋、膝）配对。
    """
    SHOULDER = "shoulder"
    ELBOW = "elbow"
    HIP = "hip"
    KNEE = "knee"

    @property
    def column(self) -> str:
        """CSV 列名"""
        return f"{self.value}_deg"


ALL_JOINTS: Tuple[JointId, ...] = (JointId.SHOULDER, JointId.ELBOW, JointId.HIP, JointId.KNEE)
UPPER_JOINTS: Tuple[JointId, ...] = (JointId.SHOULDER, JointId.ELBOW)
LOWER_JOINTS: Tuple[JointId, ...] = (JointId.HIP, JointId.KNEE)


def _frozen_array(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointTrace:
    """单关节角度序列

    Attributes:
        joint_id: 关节
        samples: 角度（度）
        sample_rate: 采样率（Hz）
    """
    joint_id: JointId
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = _frozen_array(self.samples)
        object.__setattr__(self, "samples", samples)
        if not self.sample_rate > 0:
            raise InvalidParams(f"{self.joint_id.value}: sample_rate must be positive")
        if samples.ndim != 1 or samples.size == 0:
            raise InconsistentLength(f"{self.joint_id.value}: samples must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(samples)):
            raise NonFiniteValue(f"{self.joint_id.value}: non-finite angle value")

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True, eq=False)
class GaitRecording:
    """同步的四关节记录

    Attributes:
        traces: 每个关节一条 JointTrace
    """
    traces: Mapping[JointId, JointTrace]

    def __post_init__(self):
        traces = dict(self.traces)
        for joint in ALL_JOINTS:
            if joint not in traces:
                raise MissingColumn(f"missing joint trace: {joint.value}")
        lengths = {len(t) for t in traces.values()}
        rates = {t.sample_rate for t in traces.values()}
        if len(lengths) != 1:
            raise InconsistentLength(f"trace lengths differ: {sorted(lengths)}")
        if len(rates) != 1:
            raise InconsistentLength(f"sample rates differ: {sorted(rates)}")
        object.__setattr__(self, "traces", {j: traces[j] for j in ALL_JOINTS})

    @classmethod
    def from_arrays(cls, arrays: Mapping[JointId, Iterable[float]], sample_rate: float) -> "GaitRecording":
        """由每关节数组构造记录"""
        return cls({j: JointTrace(j, np.asarray(a, dtype=float), sample_rate) for j, a in arrays.items()})

    @property
    def sample_rate(self) -> float:
        return self.traces[JointId.HIP].sample_rate

    @property
    def n_samples(self) -> int:
        return len(self.traces[JointId.HIP])

    @property
    def duration(self) -> float:
        """时长（秒）"""
        return self.n_samples / self.sample_rate

    def trace(self, joint: JointId) -> np.ndarray:
        """关节角度数组（只读）"""
        return self.traces[joint].samples

    def times(self) -> np.ndarray:
        """采样时刻（秒）"""
        return np.arange(self.n_samples) / self.sample_rate


@dataclass(frozen=True, eq=False)
class GaitCycle:
    """单个步态周期

    Attributes:
        index: 周期序号
        start_sample: 起始采样点（含）
        end_sample: 结束采样点（不含，即下一周期起点）
        period: 周期（秒）
        curves: 每关节在 [0,1) 相位网格上的 N 点曲线
    """
    index: int
    start_sample: int
    end_sample: int
    period: float
    curves: Dict[JointId, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if not self.start_sample < self.end_sample:
            raise InconsistentLength(
                f"cycle {self.index}: start_sample {self.start_sample} >= end_sample {self.end_sample}"
            )
        curves = {j: _frozen_array(c) for j, c in self.curves.items()}
        if len({c.size for c in curves.values()}) > 1:
            raise InconsistentLength(f"cycle {self.index}: curve lengths differ")
        object.__setattr__(self, "curves", curves)

    @property
    def grid_size(self) -> int:
        return int(next(iter(self.curves.values())).size) if self.curves else 0

    @property
    def grid_rate(self) -> float:
        """相位网格对应的等效采样率（点/秒）"""
        return self.grid_size / self.period

    @property
    def n_samples(self) -> int:
        return self.end_sample - self.start_sample

    def curve(self, joint: JointId) -> np.ndarray:
        return self.curves[joint]
