"""Gait-Rehab 日志模块

基于 structlog 的结构化日志，stdlib logging 作为输出端。

- JSON 格式：文件 / 机器解析
- console 格式：命令行诊断（默认写到 stderr）

Usage:
    from log import get_logger

    logger = get_logger(__name__)
    logger.info("cycles segmented", count=12, period_s=1.1)
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import structlog

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_LOG_FILE = "logs/gait-rehab.log"
DEFAULT_FORMAT = "json"

# 轮转日志参数
MAX_LOG_BYTES = 10 * 1024 * 1024
BACKUP_COUNT = 5

_VALID_FORMATS = ("json", "console")


def _resolve_level(level: str) -> int:
    """解析日志级别名称

    Raises:
        ValueError: 未知级别
    """
    value = logging.getLevelName(str(level).upper())
    if not isinstance(value, int):
        raise ValueError(f"Unknown log level: {level}")
    return value


def configure_logger(
    level: str = DEFAULT_LOG_LEVEL,
    format: str = DEFAULT_FORMAT,
    log_file: Optional[str] = None,
    stream: Optional[TextIO] = None,
) -> None:
    """配置全局日志

    Args:
        level: 日志级别 (DEBUG/INFO/WARNING/ERROR/CRITICAL)
        format: 输出格式 (json | console)
        log_file: 日志文件路径，None 表示不写文件
        stream: 控制台输出流，默认 sys.stderr

    Raises:
        ValueError: 无效的级别或格式
    """
    numeric_level = _resolve_level(level)
    if format not in _VALID_FORMATS:
        raise ValueError(f"Unknown log format: {format}")

    handlers: list = [logging.StreamHandler(stream if stream is not None else sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(RotatingFileHandler(
            log_file,
            maxBytes=MAX_LOG_BYTES,
            backupCount=BACKUP_COUNT,
            encoding="utf-8",
        ))

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    formatter = logging.Formatter("%(message)s")
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)
    root.setLevel(numeric_level)

    processors = [
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]
    if format == "json":
        processors.append(structlog.processors.JSONRenderer(sort_keys=True))
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    # 测试中会反复重新配置，因此不缓存 logger
    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


def get_logger(name: Optional[str] = None) -> Any:
    """获取 structlog logger

    Args:
        name: 模块名，通常为 __name__
    """
    if name is None:
        return structlog.get_logger()
    return structlog.get_logger(name)


class LogManager:
    """日志管理器

    持有日志配置并缓存按名称创建的 logger。

    配置键:
        level: 日志级别
        file: 日志文件（None 不写文件）
        format: json | console
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self._config: Dict[str, Any] = config or {}
        self._loggers: Dict[str, Any] = {}

    def setup(self, stream: Optional[TextIO] = None) -> None:
        """按配置初始化日志系统"""
        configure_logger(
            level=self._config.get("level", DEFAULT_LOG_LEVEL),
            format=self._config.get("format", DEFAULT_FORMAT),
            log_file=self._config.get("file"),
            stream=stream,
        )

    def get_logger(self, name: str) -> Any:
        """获取（缓存的）logger"""
        if name not in self._loggers:
            self._loggers[name] = get_logger(name)
        return self._loggers[name]


_log_manager: Optional[LogManager] = None


def setup_logging(
    level: Optional[str] = None,
    log_file: Optional[str] = None,
    format: Optional[str] = None,
    config: Optional[Dict[str, Any]] = None,
    stream: Optional[TextIO] = None,
) -> LogManager:
    """配置日志并替换全局 LogManager

    Args:
        level: 日志级别（覆盖 config）
        log_file: 日志文件（覆盖 config）
        format: 输出格式（覆盖 config）
        config: LogManager 配置字典
        stream: 控制台输出流

    Returns:
        新的全局 LogManager
    """
    global _log_manager

    merged: Dict[str, Any] = dict(config or {})
    if level is not None:
        merged["level"] = level
    if log_file is not None:
        merged["file"] = log_file
    if format is not None:
        merged["format"] = format

    manager = LogManager(merged)
    manager.setup(stream=stream)
    _log_manager = manager
    return manager


def get_log_manager() -> LogManager:
    """获取全局 LogManager（不存在时创建默认实例）"""
    global _log_manager
    if _log_manager is None:
        _log_manager = LogManager()
    return _log_manager


def log_debug(event: str, **kwargs: Any) -> None:
    get_logger().debug(event, **kwargs)


def log_info(event: str, **kwargs: Any) -> None:
    get_logger().info(event, **kwargs)


def log_warning(event: str, **kwargs: Any) -> None:
    get_logger().warning(event, **kwargs)


def log_error(event: str, **kwargs: Any) -> None:
    get_logger().error(event, **kwargs)


__all__ = [
    "get_logger",
    "configure_logger",
    "setup_logging",
    "get_log_manager",
    "LogManager",
    "log_error",
    "log_info",
    "log_warning",
    "log_debug",
    "DEFAULT_LOG_LEVEL",
    "DEFAULT_LOG_FILE",
    "DEFAULT_FORMAT",
]
