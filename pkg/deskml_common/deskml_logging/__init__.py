"""Structured logging for deskml: DeskLogger, logging.yaml configuration and level control"""

from .logging_config import LoggingConfig, configure_cli_logging, setup_logging
from .logging_manager import DeskLogger, JsonFormatter, get_cached_logger, get_logger, set_log_level

__all__ = [
    "DeskLogger",
    "JsonFormatter",
    "get_logger",
    "get_cached_logger",
    "set_log_level",
    "LoggingConfig",
    "setup_logging",
    "configure_cli_logging",
]
