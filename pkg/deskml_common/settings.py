"""Environment-driven settings shared by the coordinator, workers and bench driver"""

import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

DEFAULT_MAX_FRAME_BYTES = 256 * 1024 * 1024


class DeskSettings(BaseModel):
    """Process-wide settings, read once from the environment"""

    log_level: str = Field(default="INFO", description="Default log level")
    max_frame_bytes: int = Field(default=DEFAULT_MAX_FRAME_BYTES, gt=1, description="Largest accepted wire frame")
    connect_retries: int = Field(default=20, ge=1, description="Worker connection attempts")
    connect_backoff_s: float = Field(default=0.25, ge=0.0, description="Wait between connection attempts")
    join_timeout_s: float = Field(default=60.0, gt=0.0, description="How long the coordinator waits for workers")

    @classmethod
    def from_env(cls) -> "DeskSettings":
        values = {
            "log_level": os.getenv("DESKML_LOG_LEVEL"),
            "max_frame_bytes": os.getenv("DESKML_MAX_FRAME_BYTES"),
            "connect_retries": os.getenv("DESKML_CONNECT_RETRIES"),
            "connect_backoff_s": os.getenv("DESKML_CONNECT_BACKOFF_S"),
            "join_timeout_s": os.getenv("DESKML_JOIN_TIMEOUT_S"),
        }
        return cls(**{k: v for k, v in values.items() if v is not None})


@lru_cache(maxsize=1)
def get_settings() -> DeskSettings:
    """Cached settings instance; call `get_settings.cache_clear()` after changing the environment"""
    return DeskSettings.from_env()
