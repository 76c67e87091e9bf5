"""Gait-Rehab 配置模块

提供统一的配置管理，支持 YAML 配置文件、环境变量和命令行覆盖。
"""

from .config import (
    RunConfig,
    PathsConfig,
    SegmentationConfig,
    FeatureConfig,
    MappingConfig,
    RestorationConfig,
    SimulationConfig,
    SynthConfig,
    GlobalConfig,
    Settings,
    ConfigLoader,
    apply_overrides,
    get_config,
    reset_config,
)

__all__ = [
    "RunConfig",
    "PathsConfig",
    "SegmentationConfig",
    "FeatureConfig",
    "MappingConfig",
    "RestorationConfig",
    "SimulationConfig",
    "SynthConfig",
    "GlobalConfig",
    "Settings",
    "ConfigLoader",
    "apply_overrides",
    "get_config",
    "reset_config",
    "create_default_config",
]


def create_default_config(path: str = "gait_rehab.yaml") -> str:
    """生成默认配置文件

    Args:
        path: 配置文件路径

    Returns:
        生成的配置内容
    """
    import yaml
    from pathlib import Path

    data = RunConfig().model_dump(exclude={"paths"})
    data["global"] = data.pop("global_settings")

    content = yaml.safe_dump(data, default_flow_style=False, allow_unicode=True, sort_keys=False)

    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(content)

    return content
