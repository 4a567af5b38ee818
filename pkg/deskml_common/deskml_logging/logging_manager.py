"""Unified logging manager - structured key=value logging for the deskml packages"""

import json
import logging
import os
import sys
import threading
import time
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

LOG_LEVEL_ENV = "DESKML_LOG_LEVEL"
TEXT_FORMAT = "%(asctime)s | %(name)s | %(levelname)-8s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _plain(value: Any) -> Any:
    """numpy scalars and arrays become Python values; everything else is left alone"""
    item = getattr(value, "item", None)
    if callable(item) and getattr(value, "ndim", None) == 0:
        return item()
    tolist = getattr(value, "tolist", None)
    if callable(tolist) and hasattr(value, "shape"):
        return tolist()
    return value


def _render(value: Any) -> str:
    value = _plain(value)
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, tuple):
        return "(" + ", ".join(_render(v) for v in value) + ")"
    return str(value)


class DeskLogger:
    """Module logger that appends keyword context to every message"""

    def __init__(self,
                 module_name: str,
                 level: str = "INFO",
                 log_dir: str = "logs",
                 enable_file_logging: bool = True,
                 enable_console_logging: bool = True,
                 enable_json_logging: bool = False,
                 session_id: Optional[str] = None):
        """
        Args:
            module_name: Dotted module name, also the underlying logger name
            level: Fallback level when DESKML_LOG_LEVEL is unset
            log_dir: Directory for per-module log files
            enable_file_logging: Write to <log_dir>/<module>_<session or date>.log
            enable_console_logging: Write to stderr
            enable_json_logging: Emit one JSON object per record
            session_id: Run or worker identifier, used in file names and JSON records
        """
        self.module_name = module_name
        self.session_id = session_id
        self.enable_json_logging = enable_json_logging
        self.log_dir = Path(log_dir)

        if enable_file_logging:
            self.log_dir.mkdir(parents=True, exist_ok=True)

        self.logger = logging.getLogger(module_name)
        self.logger.setLevel(getattr(logging, os.getenv(LOG_LEVEL_ENV, level).upper()))
        self.logger.handlers.clear()
        self.logger.propagate = False

        formatter = JsonFormatter() if enable_json_logging else logging.Formatter(TEXT_FORMAT, datefmt=DATE_FORMAT)
        handlers = []
        if enable_console_logging:
            # stdout carries CSV and report output
            handlers.append(logging.StreamHandler(sys.stderr))
        if enable_file_logging:
            handlers.append(logging.FileHandler(self.log_dir / self._file_name(), encoding="utf-8"))
        for handler in handlers:
            handler.setFormatter(formatter)
            self.logger.addHandler(handler)

    def _file_name(self) -> str:
        suffix = self.session_id or datetime.now().strftime("%Y%m%d")
        return f"{self.module_name}_{suffix}.log"

    def is_enabled_for(self, level: int) -> bool:
        return self.logger.isEnabledFor(level)

    def debug(self, message: str, **context):
        self._log(logging.DEBUG, message, context)

    def info(self, message: str, **context):
        self._log(logging.INFO, message, context)

    def warning(self, message: str, **context):
        self._log(logging.WARNING, message, context)

    def error(self, message: str, **context):
        self._log(logging.ERROR, message, context)

    def critical(self, message: str, **context):
        self._log(logging.CRITICAL, message, context)

    def _log(self, level: int, message: str, context: Dict[str, Any]):
        if not self.logger.isEnabledFor(level):
            return
        if self.enable_json_logging:
            payload = {
                "timestamp": datetime.now().isoformat(),
                "level": logging.getLevelName(level),
                "module": self.module_name,
                "message": message,
                "session_id": self.session_id,
                "context": {k: _plain(v) for k, v in context.items()},
            }
            self.logger.log(level, json.dumps(payload, ensure_ascii=False, default=str))
            return
        if context:
            message = " | ".join([message] + [f"{k}={_render(v)}" for k, v in context.items()])
        self.logger.log(level, message)

    @contextmanager
    def log_execution_time(self, operation: str, **context):
        """Time the wrapped block; success is logged at INFO, failure at ERROR and re-raised"""
        start = time.perf_counter()
        self.debug(f"Starting execution: {operation}", **context)
        try:
            yield
        except Exception as e:
            self.error(f"Execution failed: {operation}", error=str(e),
                       elapsed_ms=(time.perf_counter() - start) * 1e3, **context)
            raise
        self.info(f"Completed execution: {operation}",
                  elapsed_ms=(time.perf_counter() - start) * 1e3, **context)


class JsonFormatter(logging.Formatter):
    """JSON format log formatter"""

    def format(self, record):
        data = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "module": record.name,
            "message": record.getMessage(),
            "thread": record.thread,
            "process": record.process,
        }
        if record.exc_info:
            data["exception"] = self.formatException(record.exc_info)
        return json.dumps(data, ensure_ascii=False)


def get_logger(module_name: str, **kwargs) -> DeskLogger:
    """A fresh DeskLogger; kwargs go to the constructor"""
    return DeskLogger(module_name, **kwargs)


_logger_cache: Dict[Tuple[str, Optional[str]], DeskLogger] = {}
_cache_lock = threading.Lock()


def get_cached_logger(module_name: str, **kwargs) -> DeskLogger:
    """A DeskLogger shared per (module, session_id)"""
    key = (module_name, kwargs.get("session_id"))
    with _cache_lock:
        if key not in _logger_cache:
            _logger_cache[key] = DeskLogger(module_name, **kwargs)
        return _logger_cache[key]


def set_log_level(level: str, prefix: str = "deskml_") -> None:
    """Re-level every already-created deskml logger, e.g. from a CLI --log-level option"""
    numeric = getattr(logging, level.upper())
    for name, candidate in list(logging.root.manager.loggerDict.items()):
        if name.startswith(prefix) and isinstance(candidate, logging.Logger):
            candidate.setLevel(numeric)
