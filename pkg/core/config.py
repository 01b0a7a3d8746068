import os
from functools import lru_cache
from typing import Optional

from pydantic import BaseModel, Field

ENV_PREFIX = "PROJCOUNT_"


class Settings(BaseModel):
    """Process-wide settings, read once from PROJCOUNT_* environment variables."""

    log_level: str = "WARNING"
    log_file: Optional[str] = None

    default_mode: str = "dyn"
    cache_cap: Optional[int] = Field(default=None, ge=1)

    # brute-force enumeration bounds
    oracle_max_counted_vars: int = Field(default=20, ge=0)
    oracle_max_total_vars: int = Field(default=24, ge=0)

    bench_jobs: int = Field(default=1, ge=1)

    broker_url: str = "redis://localhost:6379/0"
    result_backend: str = "redis://localhost:6379/0"
    api_host: str = "127.0.0.1"
    api_port: int = 8000


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    values = {}
    for name in Settings.model_fields:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = raw
    return Settings(**values)
