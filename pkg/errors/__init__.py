"""Gait-Rehab 异常定义

所有模块共用的异常层次。

- GaitRehabError: 根异常，命令行映射为退出码 2
- DataError: 数据 / 模型契约违反（同时是 ValueError）
- UsageError: 命令行用法错误，退出码 1
"""


class GaitRehabError(Exception):
    """Gait-Rehab 根异常"""

    exit_code: int = 2


class DataError(GaitRehabError, ValueError):
    """数据或模型不满足契约"""


class UsageError(GaitRehabError):
    """命令行用法错误

    Attributes:
        flag: 出错的参数名（可选）
    """

    exit_code = 1

    def __init__(self, message: str, flag: str = ""):
        super().__init__(message)
        self.flag = flag


# ========== gait_data ==========

class MissingColumn(DataError):
    """CSV 缺少必需列"""


class NonFiniteValue(DataError):
    """出现 NaN / Inf"""


class InconsistentLength(DataError):
    """各关节序列长度或采样率不一致"""


class BadHeader(DataError):
    """CSV 表头格式错误"""


class InvalidParams(DataError):
    """合成参数非法"""


class NoCyclesFound(DataError):
    """未检测到完整步态周期"""


class FlatSignal(DataError):
    """信号无振荡"""


class SliceTooShort(DataError):
    """重采样片段过短"""


# ========== features ==========

class TooShort(DataError):
    """曲线过短，无法求变化率"""


class EmptyInput(DataError):
    """输入为空"""


class DegenerateDistribution(DataError):
    """变化率分布退化（全部相等）"""


class FeatureIncomplete(DataError):
    """周期内没有通过滤波的波谷或波峰"""


# ========== mapping / restoration ==========

class TooFewSamples(DataError):
    """样本数不足"""


class MisalignedPairs(DataError):
    """上下肢特征未按 cycle_index 对齐"""


class RankDeficient(DataError):
    """设计矩阵条件数过大"""


class EmptyCluster(DataError):
    """KMeans 重启次数耗尽后仍有空簇"""


class TooFewClusters(DataError):
    """非空簇数量不足"""


class SingularReferenceMatrix(DataError):
    """参考向量矩阵奇异"""


class OrderTooHigh(DataError):
    """傅里叶阶数超过网格可辨识范围"""


# ========== simulation ==========

class TooFewCycles(DataError):
    """可比较周期不足"""


class ModelMissing(DataError):
    """流水线缺少模型"""


class ModelFileError(DataError):
    """模型文件格式错误"""


__all__ = [
    "GaitRehabError",
    "DataError",
    "UsageError",
    "MissingColumn",
    "NonFiniteValue",
    "InconsistentLength",
    "BadHeader",
    "InvalidParams",
    "NoCyclesFound",
    "FlatSignal",
    "SliceTooShort",
    "TooShort",
    "EmptyInput",
    "DegenerateDistribution",
    "FeatureIncomplete",
    "TooFewSamples",
    "MisalignedPairs",
    "RankDeficient",
    "EmptyCluster",
    "TooFewClusters",
    "SingularReferenceMatrix",
    "OrderTooHigh",
    "TooFewCycles",
    "ModelMissing",
    "ModelFileError",
]
