"""
Test Configuration
==================

测试夹具：种子确定的合成记录、已发表的映射矩阵 / 偏置 / 参考向量常量。
"""

import sys
from pathlib import Path

# 项目根目录放到 sys.path 最前面
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) in sys.path:
    sys.path.remove(str(ROOT))
sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from config import RunConfig
from features import train_band
from gait_data import SynthParams, segment_cycles, synthesize_recording
from log import configure_logger

# 已发表的上肢 → 下肢映射
PUBLISHED_T = np.array([
    [0.0946, -0.1917, 1.6623, -0.0483],
    [-0.0151, -0.1066, 1.3587, 0.0959],
    [0.2514, -0.1003, -1.5821, 0.2368],
    [0.0907, -0.1945, -1.0221, -0.0946],
])
PUBLISHED_B = np.array([3.0487, 40.2068, -3.3855, -89.9575])

# 已发表的四个参考向量（髋谷, 髋峰, 膝峰, 膝谷）
PUBLISHED_YBAR = np.array([
    [-4.0344, 39.8672, -8.0813, -102.6813],
    [-0.9446, 43.0250, -5.5536, -99.4214],
    [-3.3208, 42.1188, -7.9562, -105.1646],
    [3.1625, 45.8825, -8.2300, -102.1600],
])


@pytest.fixture(autouse=True, scope="session")
def _quiet_logging():
    """测试期间只输出警告以上日志"""
    configure_logger(level="WARNING", format="console")


@pytest.fixture
def run_config():
    return RunConfig()


@pytest.fixture(scope="session")
def clean_synth():
    """20 个周期、无噪声的合成记录"""
    return synthesize_recording(SynthParams(n_cycles=20, seed=7))


@pytest.fixture(scope="session")
def clean_cycles(clean_synth):
    return segment_cycles(clean_synth.recording)


@pytest.fixture(scope="session")
def clean_band(clean_cycles):
    return train_band(clean_cycles)


@pytest.fixture(scope="session")
def training_synth():
    """训练用合成记录（60 周期，轻噪声）"""
    return synthesize_recording(SynthParams(n_cycles=60, noise_std=0.3, seed=3))
