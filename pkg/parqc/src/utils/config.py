
import os
import tempfile
from typing import Optional

try:
    # Pydantic v2
    from pydantic_settings import BaseSettings, SettingsConfigDict
except ImportError:  # pragma: no cover
    # Fallback for v1 environments
    from pydantic import BaseSettings  # type: ignore
    SettingsConfigDict = dict  # type: ignore


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="PARQC_")

    seed: Optional[str] = None
    log_level: str = "WARNING"
    progress_period_ms: int = 200
    chatty: bool = False
    tmp_root: Optional[str] = None


def get_settings() -> Settings:
    # Re-read the environment on every call so CLI invocations see PARQC_* changes
    return Settings()


def get_default_tmp_root() -> str:
    configured = get_settings().tmp_root
    return configured or os.path.join(tempfile.gettempdir(), "parqc")
