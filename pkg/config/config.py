"""配置加载器实现

支持 YAML 配置文件、环境变量覆盖、类型安全且带范围校验的配置访问。
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from errors import UsageError


class Settings(BaseSettings):
    """环境变量配置（前缀 GAIT_REHAB_，支持 .env）"""

    log_level: str = "INFO"
    log_format: str = "console"
    log_file: Optional[str] = None

    model_config = SettingsConfigDict(
        env_prefix="GAIT_REHAB_",
        env_file=".env",
        extra="ignore",
    )


class _Section(BaseModel):
    model_config = {"extra": "forbid", "validate_assignment": True}


class PathsConfig(_Section):
    """文件路径"""
    recording: Optional[str] = None
    band: Optional[str] = None
    map: Optional[str] = None
    refs: Optional[str] = None
    out_dir: Optional[str] = None


class SegmentationConfig(_Section):
    """周期切分配置"""
    grid_size: int = Field(default=100, ge=10)
    # 平滑窗口占估计周期的比例
    smoothing_fraction: float = Field(default=0.05, gt=0.0, le=0.5)
    # 相邻上升过零点的最小间隔（估计周期的比例）
    min_spacing_fraction: float = Field(default=0.5, gt=0.0, lt=1.0)


class FeatureConfig(_Section):
    """特征提取配置"""
    q_low: float = Field(default=2.0, ge=0.0, le=100.0)
    q_high: float = Field(default=98.0, ge=0.0, le=100.0)
    flank_window: int = Field(default=2, ge=1)
    window_sigma: float = Field(default=3.0, gt=0.0)
    repair_iterations: int = Field(default=5, ge=0)
    refine: bool = True

    @model_validator(mode="after")
    def _check_percentiles(self) -> "FeatureConfig":
        if not self.q_low < self.q_high:
            raise ValueError("q_low must be below q_high")
        return self


class MappingConfig(_Section):
    """最小二乘辨识配置"""
    rank_threshold: float = Field(default=1e8, gt=1.0)
    holdout: float = Field(default=0.0, ge=0.0, lt=1.0)
    holdout_seed: int = 0


class RestorationConfig(_Section):
    """聚类与参考曲线配置"""
    k: int = Field(default=9, ge=2)
    seed: int = 0
    fit_order: int = Field(default=6, ge=1, le=20)
    max_iter: int = Field(default=300, ge=1)
    max_restarts: int = Field(default=10, ge=0)
    cluster_space: Literal["paired", "pooled"] = "paired"
    cond_threshold: float = Field(default=1e8, gt=1.0)


class SimulationConfig(_Section):
    """流水线仿真配置"""
    # 输出曲线的固定周期（秒）
    nominal_period: float = Field(default=1.1, gt=0.0)


class SynthConfig(_Section):
    """合成数据配置"""
    n_cycles: int = Field(default=20, ge=1)
    base_period: float = Field(default=1.1, gt=0.0)
    sample_rate: float = Field(default=100.0, gt=0.0)
    period_jitter: float = Field(default=0.03, ge=0.0)
    amplitude_jitter: float = Field(default=0.05, ge=0.0)
    noise_std: float = Field(default=0.3, ge=0.0)
    spike_rate: float = Field(default=0.0, ge=0.0)
    seed: int = 0
    experiment_seeds: List[int] = Field(default_factory=lambda: [101, 102, 103])


class GlobalConfig(_Section):
    """全局配置"""
    log_level: str = "INFO"
    log_format: Literal["json", "console"] = "console"
    log_file: Optional[str] = None


class RunConfig(_Section):
    """主配置"""
    version: str = "1.0.0"
    paths: PathsConfig = Field(default_factory=PathsConfig)
    segmentation: SegmentationConfig = Field(default_factory=SegmentationConfig)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    mapping: MappingConfig = Field(default_factory=MappingConfig)
    restoration: RestorationConfig = Field(default_factory=RestorationConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    synth: SynthConfig = Field(default_factory=SynthConfig)
    global_settings: GlobalConfig = Field(default_factory=GlobalConfig)


# 扁平键（与命令行参数同名）→ 分节路径
FLAT_KEYS: Dict[str, str] = {
    "grid_size": "segmentation.grid_size",
    "smoothing_fraction": "segmentation.smoothing_fraction",
    "q_low": "features.q_low",
    "q_high": "features.q_high",
    "holdout": "mapping.holdout",
    "k": "restoration.k",
    "seed": "restoration.seed",
    "fit_order": "restoration.fit_order",
    "cluster_space": "restoration.cluster_space",
    "nominal_period": "simulation.nominal_period",
    "cycles": "synth.n_cycles",
    "experiment_seeds": "synth.experiment_seeds",
    "log_level": "global_settings.log_level",
    "log_format": "global_settings.log_format",
}

_SECTIONS = (
    "paths", "segmentation", "features", "mapping",
    "restoration", "simulation", "synth",
)


class ConfigLoader:
    """配置加载器

    支持:
    - YAML 配置文件（分节或扁平 `key: value`）
    - 环境变量引用 ${VAR}
    - 默认配置（配置文件不存在时）
    - 配置热重载
    """

    DEFAULT_PATH = "gait_rehab.yaml"

    def __init__(self, path: Optional[str] = None):
        """初始化配置加载器

        Args:
            path: 配置文件路径，默认 gait_rehab.yaml
        """
        self._path = path or self.DEFAULT_PATH
        self._config: Optional[RunConfig] = None

    def load(self, reload: bool = False) -> RunConfig:
        """加载配置

        Args:
            reload: 是否重新加载

        Returns:
            RunConfig: 配置对象

        Raises:
            UsageError: 配置文件内容非法
        """
        if self._config is not None and not reload:
            return self._config

        config_path = Path(self._path)
        if config_path.exists():
            with open(config_path, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f)
            if raw is None:
                raw = {}
            if not isinstance(raw, dict):
                raise UsageError(f"config file {config_path} is not a mapping", flag="--config")
            raw = self._resolve_env_vars(raw)
            self._config = self._parse_config(raw)
        else:
            self._config = self._default_config()

        return self._config

    def _resolve_env_vars(self, data: Any) -> Any:
        """解析环境变量引用 ${VAR}，缺失时替换为空字符串"""
        pattern = re.compile(r'\$\{(\w+)\}')

        def resolve(value):
            if isinstance(value, str):
                for var_name in pattern.findall(value):
                    value = value.replace(f"${{{var_name}}}", os.getenv(var_name, ""))
            return value

        def traverse(obj):
            if isinstance(obj, dict):
                return {k: traverse(v) for k, v in obj.items()}
            elif isinstance(obj, list):
                return [traverse(item) for item in obj]
            return resolve(obj)

        return traverse(data)

    def _parse_config(self, raw: Dict[str, Any]) -> RunConfig:
        """解析配置字典（分节键与扁平键可混用）"""
        nested: Dict[str, Any] = {}
        for key, value in raw.items():
            if key == "global":
                nested.setdefault("global_settings", {}).update(value or {})
            elif key in _SECTIONS:
                nested.setdefault(key, {}).update(value or {})
            elif key in FLAT_KEYS:
                section, field = FLAT_KEYS[key].split(".")
                nested.setdefault(section, {})[field] = value
            elif key == "version":
                nested["version"] = str(value)
            else:
                raise UsageError(f"unknown config key: {key}", flag="--config")

        try:
            return RunConfig(**self._with_env_defaults(nested))
        except ValidationError as e:
            raise UsageError(f"invalid config: {e}", flag="--config") from e

    def _default_config(self) -> RunConfig:
        """返回默认配置（全局节取自环境变量）"""
        return RunConfig(**self._with_env_defaults({}))

    @staticmethod
    def _with_env_defaults(nested: Dict[str, Any]) -> Dict[str, Any]:
        settings = Settings()
        global_cfg = {
            "log_level": settings.log_level,
            "log_format": settings.log_format,
            "log_file": settings.log_file,
        }
        global_cfg.update(nested.get("global_settings", {}))
        return {**nested, "global_settings": global_cfg}

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值

        Args:
            key: 点号分隔的路径，如 'restoration.k'
            default: 默认值
        """
        if self._config is None:
            self.load()

        obj: Any = self._config
        for part in key.split('.'):
            if hasattr(obj, part):
                obj = getattr(obj, part)
            else:
                return default
        return obj

    def reload(self) -> RunConfig:
        """重新加载配置"""
        self._config = None
        return self.load(reload=True)

    @property
    def path(self) -> str:
        return str(self._path)


def apply_overrides(config: RunConfig, overrides: Dict[str, Any]) -> RunConfig:
    """用命令行参数覆盖配置（参数优先）

    Args:
        config: 基础配置
        overrides: 扁平键或 'section.field' 路径 → 值；值为 None 的项忽略

    Raises:
        UsageError: 覆盖值超出范围
    """
    data = config.model_dump()
    for key, value in overrides.items():
        if value is None:
            continue
        path = FLAT_KEYS.get(key, key)
        section, field = path.split(".")
        data.setdefault(section, {})[field] = value
    try:
        return RunConfig(**data)
    except ValidationError as e:
        bad = e.errors()[0]["loc"]
        flag = "--" + str(bad[-1]).replace("_", "-") if bad else ""
        raise UsageError(f"invalid value for {flag}: {e.errors()[0]['msg']}", flag=flag) from e


# 全局配置实例
_config_instance: Optional[ConfigLoader] = None


def get_config(path: Optional[str] = None) -> RunConfig:
    """获取全局配置实例"""
    global _config_instance

    if _config_instance is None:
        _config_instance = ConfigLoader(path)

    return _config_instance.load()


def reset_config():
    """重置全局配置实例"""
    global _config_instance
    _config_instance = None
