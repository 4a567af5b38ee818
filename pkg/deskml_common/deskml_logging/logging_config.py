"""Logging configuration from logging.yaml, with a basicConfig fallback"""

import logging
import logging.config
import os
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from .logging_manager import DATE_FORMAT, LOG_LEVEL_ENV, TEXT_FORMAT, set_log_level


class LoggingConfig:
    """Applies a dictConfig YAML file to the deskml_* loggers"""

    def __init__(self, config_dir: Optional[str] = None):
        self.config_dir = Path(config_dir) if config_dir is not None else Path(__file__).parent
        self.config_file = self.config_dir / "logging.yaml"

    def setup_logging(self,
                      config_file: Optional[Union[str, Path]] = None,
                      level: Optional[str] = None,
                      log_dir: str = "logs") -> bool:
        """
        Apply the YAML configuration, or basicConfig when there is no file

        Args:
            config_file: Overrides <config_dir>/logging.yaml
            level: Forced onto every configured logger and the root
            log_dir: Relative handler filenames are placed here

        Returns:
            False when the file exists but could not be applied
        """
        path = Path(config_file) if config_file else self.config_file
        if not path.exists():
            self._setup_basic_logging(level)
            return True
        try:
            config: Dict[str, Any] = yaml.safe_load(path.read_text(encoding="utf-8"))
            if self._rebase_file_handlers(config, Path(log_dir)):
                Path(log_dir).mkdir(parents=True, exist_ok=True)
            if level:
                for section in config.get("loggers", {}).values():
                    section["level"] = level.upper()
                if "root" in config:
                    config["root"]["level"] = level.upper()
            logging.config.dictConfig(config)
            return True
        except Exception as e:
            print(f"Failed to apply logging configuration {path}: {e}", file=sys.stderr)
            self._setup_basic_logging(level)
            return False

    @staticmethod
    def _rebase_file_handlers(config: Dict[str, Any], log_dir: Path) -> bool:
        """Returns whether any handler writes to a file"""
        has_files = False
        for handler in config.get("handlers", {}).values():
            if "filename" in handler:
                has_files = True
                filename = Path(handler["filename"])
                if not filename.is_absolute():
                    handler["filename"] = str(log_dir / filename.name)
        return has_files

    @staticmethod
    def _setup_basic_logging(level: Optional[str]):
        name = (level or os.getenv(LOG_LEVEL_ENV, "INFO")).upper()
        logging.basicConfig(level=getattr(logging, name), format=TEXT_FORMAT, datefmt=DATE_FORMAT,
                            stream=sys.stderr)


_config_manager = LoggingConfig()


def setup_logging(**kwargs) -> bool:
    """Shortcut for LoggingConfig().setup_logging"""
    return _config_manager.setup_logging(**kwargs)


def configure_cli_logging(level: Optional[str] = None, config_file: Optional[Union[str, Path]] = None) -> None:
    """Apply a --log-config file, then a --log-level to the deskml loggers"""
    if config_file:
        setup_logging(config_file=config_file, level=level)
    if level:
        set_log_level(level)
