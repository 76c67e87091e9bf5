"""配置模块单元测试

测试 ConfigLoader、范围校验与命令行覆盖。
"""

import os
import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from config import (
    ConfigLoader,
    FeatureConfig,
    GlobalConfig,
    RestorationConfig,
    RunConfig,
    SegmentationConfig,
    apply_overrides,
    create_default_config,
    get_config,
    reset_config,
)
from errors import UsageError


def _write(tmp_path: Path, text: str) -> str:
    path = tmp_path / "gait_rehab.yaml"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestConfigClasses:
    """测试配置默认值与范围校验"""

    def test_defaults(self):
        """默认值"""
        config = RunConfig()
        assert config.segmentation.grid_size == 100
        assert config.features.q_low == 2.0
        assert config.features.q_high == 98.0
        assert config.restoration.k == 9
        assert config.restoration.fit_order == 6
        assert config.restoration.cluster_space == "paired"
        assert config.simulation.nominal_period == 1.1
        assert config.synth.experiment_seeds == [101, 102, 103]
        assert config.paths.map is None

    def test_grid_size_lower_bound(self):
        """N ≥ 10"""
        SegmentationConfig(grid_size=10)
        with pytest.raises(ValueError):
            SegmentationConfig(grid_size=9)

    def test_fit_order_range(self):
        """1 ≤ fit_order ≤ 20"""
        with pytest.raises(ValueError):
            RestorationConfig(fit_order=0)
        with pytest.raises(ValueError):
            RestorationConfig(fit_order=21)

    def test_k_lower_bound(self):
        """k ≥ 2"""
        with pytest.raises(ValueError):
            RestorationConfig(k=1)

    def test_percentiles_ordered(self):
        """q_low < q_high"""
        with pytest.raises(ValueError):
            FeatureConfig(q_low=50, q_high=50)

    def test_unknown_field_rejected(self):
        """未知字段报错"""
        with pytest.raises(ValueError):
            SegmentationConfig(window=5)

    def test_log_format_choices(self):
        """日志格式只允许 json / console"""
        with pytest.raises(ValueError):
            GlobalConfig(log_format="xml")


class TestConfigLoader:
    """测试配置加载器"""

    def test_missing_file_gives_defaults(self):
        """配置文件不存在时使用默认值"""
        config = ConfigLoader("/nonexistent/gait_rehab.yaml").load()
        assert isinstance(config, RunConfig)
        assert config.restoration.k == 9

    def test_sectioned_yaml(self, tmp_path):
        """分节 YAML"""
        path = _write(tmp_path, """
version: "2.0"
segmentation:
  grid_size: 200
restoration:
  k: 5
  cluster_space: pooled
simulation:
  nominal_period: 1.2
global:
  log_level: DEBUG
""")
        config = ConfigLoader(path).load()
        assert config.version == "2.0"
        assert config.segmentation.grid_size == 200
        assert config.restoration.k == 5
        assert config.restoration.cluster_space == "pooled"
        assert config.simulation.nominal_period == 1.2
        assert config.global_settings.log_level == "DEBUG"

    def test_flat_keys(self, tmp_path):
        """扁平 key: value 与命令行参数同名"""
        path = _write(tmp_path, "k: 4\nfit_order: 3\nnominal_period: 0.9\ncycles: 12\n")
        config = ConfigLoader(path).load()
        assert config.restoration.k == 4
        assert config.restoration.fit_order == 3
        assert config.simulation.nominal_period == 0.9
        assert config.synth.n_cycles == 12

    def test_env_var_substitution(self, tmp_path, monkeypatch):
        """${VAR} 环境变量替换"""
        monkeypatch.setenv("GAIT_TEST_OUT", "/data/out")
        path = _write(tmp_path, "paths:\n  out_dir: \"${GAIT_TEST_OUT}\"\n")
        assert ConfigLoader(path).load().paths.out_dir == "/data/out"

    def test_missing_env_var(self, tmp_path, monkeypatch):
        """缺失的环境变量替换为空字符串"""
        monkeypatch.delenv("GAIT_TEST_MISSING", raising=False)
        path = _write(tmp_path, "paths:\n  map: \"${GAIT_TEST_MISSING}\"\n")
        assert ConfigLoader(path).load().paths.map == ""

    def test_unknown_key(self, tmp_path):
        """未知键是用法错误"""
        path = _write(tmp_path, "hotkey: f2\n")
        with pytest.raises(UsageError) as exc:
            ConfigLoader(path).load()
        assert exc.value.flag == "--config"

    def test_out_of_range_value(self, tmp_path):
        """超出范围的值是用法错误"""
        path = _write(tmp_path, "segmentation:\n  grid_size: 4\n")
        with pytest.raises(UsageError):
            ConfigLoader(path).load()

    def test_empty_file(self, tmp_path):
        """空文件使用默认值"""
        path = _write(tmp_path, "")
        assert ConfigLoader(path).load().segmentation.grid_size == 100

    def test_get(self, tmp_path):
        """点号路径访问"""
        path = _write(tmp_path, "restoration:\n  seed: 11\n")
        loader = ConfigLoader(path)
        assert loader.get("restoration.seed") == 11
        assert loader.get("nonexistent.key", "default") == "default"

    def test_reload(self, tmp_path):
        """热重载"""
        path = _write(tmp_path, "k: 3\n")
        loader = ConfigLoader(path)
        assert loader.load().restoration.k == 3
        Path(path).write_text("k: 6\n", encoding="utf-8")
        assert loader.load().restoration.k == 3
        assert loader.reload().restoration.k == 6

    def test_env_settings_feed_global_section(self, monkeypatch):
        """GAIT_REHAB_ 前缀的环境变量提供日志默认值"""
        monkeypatch.setenv("GAIT_REHAB_LOG_LEVEL", "ERROR")
        config = ConfigLoader("/nonexistent/gait_rehab.yaml").load()
        assert config.global_settings.log_level == "ERROR"


class TestApplyOverrides:
    """测试命令行覆盖"""

    def test_flags_win(self, tmp_path):
        """命令行值优先于配置文件，None 忽略"""
        path = _write(tmp_path, "k: 4\nfit_order: 3\n")
        config = apply_overrides(ConfigLoader(path).load(), {"k": 7, "fit_order": None})
        assert config.restoration.k == 7
        assert config.restoration.fit_order == 3

    def test_section_path(self):
        """'section.field' 路径"""
        config = apply_overrides(RunConfig(), {"synth.noise_std": 3.0})
        assert config.synth.noise_std == 3.0

    def test_invalid_value_names_flag(self):
        """越界值报出对应参数名"""
        with pytest.raises(UsageError) as exc:
            apply_overrides(RunConfig(), {"grid_size": 3})
        assert exc.value.flag == "--grid-size"

    def test_input_not_mutated(self):
        """不修改原配置"""
        base = RunConfig()
        apply_overrides(base, {"k": 3})
        assert base.restoration.k == 9


class TestDefaultConfigFile:
    """测试默认配置文件生成"""

    def test_written_file_loads_to_defaults(self, tmp_path):
        """生成的文件可被加载且等于默认值"""
        path = tmp_path / "conf" / "gait_rehab.yaml"
        content = create_default_config(str(path))
        assert "segmentation:" in content
        assert "global:" in content
        assert ConfigLoader(str(path)).load().model_dump(exclude={"paths"}) == RunConfig().model_dump(exclude={"paths"})


class TestGlobalConfig:
    """测试全局配置实例"""

    def test_singleton_and_reset(self):
        """get_config 单例，reset_config 后重新加载"""
        reset_config()
        first = get_config("/nonexistent/gait_rehab.yaml")
        assert get_config() is first
        reset_config()
        assert get_config("/nonexistent/gait_rehab.yaml") is not first
        reset_config()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
