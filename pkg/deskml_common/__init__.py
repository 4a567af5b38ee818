"""deskml-common package - shared infrastructure for the deskml packages

This package provides:
- Unified logging management system
- Environment-driven settings
- Version information
"""

from .deskml_logging import (
    DeskLogger,
    get_logger,
    get_cached_logger,
    set_log_level,
    JsonFormatter,
    LoggingConfig,
    setup_logging,
    configure_cli_logging,
)
from .settings import DeskSettings, get_settings
from .version import DESKML_VERSION

__version__ = DESKML_VERSION

__all__ = [
    # Logging manager
    "DeskLogger",
    "get_logger",
    "get_cached_logger",
    "set_log_level",
    "JsonFormatter",

    # Logging configuration
    "LoggingConfig",
    "setup_logging",
    "configure_cli_logging",

    # Settings
    "DeskSettings",
    "get_settings",

    "DESKML_VERSION",
    "__version__",
]
