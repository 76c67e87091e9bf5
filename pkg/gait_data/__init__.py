"""步态数据模块

关节角度记录的读写、合成、周期切分与相位归一化。
"""

from .base import (
    ALL_JOINTS,
    LOWER_JOINTS,
    UPPER_JOINTS,
    GaitCycle,
    GaitRecording,
    JointId,
    JointTrace,
)
from .io import (
    atomic_write_text,
    format_float,
    load_recording,
    load_sidecar,
    sidecar_path,
    write_recording,
    write_sidecar,
)
from .segment import estimate_period, resample_cycle, segment_cycles
from .synth import (
    DEFAULT_HARMONICS,
    TRUTH_COLUMNS,
    CycleTruth,
    JointHarmonics,
    PLANTED_MODES,
    MotionMode,
    SynthParams,
    SynthResult,
    synthesize_recording,
)

__all__ = [
    "ALL_JOINTS",
    "LOWER_JOINTS",
    "UPPER_JOINTS",
    "GaitCycle",
    "GaitRecording",
    "JointId",
    "JointTrace",
    "atomic_write_text",
    "format_float",
    "load_recording",
    "load_sidecar",
    "sidecar_path",
    "write_recording",
    "write_sidecar",
    "estimate_period",
    "resample_cycle",
    "segment_cycles",
    "DEFAULT_HARMONICS",
    "TRUTH_COLUMNS",
    "CycleTruth",
    "JointHarmonics",
    "PLANTED_MODES",
    "MotionMode",
    "SynthParams",
    "SynthResult",
    "synthesize_recording",
]
