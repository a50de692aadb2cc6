"""
Runtime settings.

Defaults come from the environment (optionally a .env file); CLI flags
override them per run.
"""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

DEFAULT_DMAX = 12
DEFAULT_BOUND = 64
DEFAULT_LOG_LEVEL = "WARNING"

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Environment-level defaults."""

    d_max: int = Field(default=DEFAULT_DMAX, gt=0, description="Groebner degree cutoff")
    bound: int = Field(default=DEFAULT_BOUND, gt=0, description="Bound on resolution lengths and tensor powers")
    log_level: str = Field(default=DEFAULT_LOG_LEVEL)


class RunConfig(BaseModel):
    """One CLI invocation."""

    subcommand: str
    inputs: list[str] = Field(default_factory=list)
    d_max: int = Field(gt=0)
    bound: int = Field(gt=0)
    out: Optional[str] = None
    json_output: bool = False
    verbose: int = 0

    @field_validator("verbose")
    @classmethod
    def _verbosity(cls, v: int) -> int:
        if v < 0:
            raise ValueError("verbosity must be nonnegative")
        return v


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        raise EnvironmentError(
            f"{name} must be a positive integer, got '{raw}'.\n"
            "Fix or remove it in your .env file (see .env.example)."
        )
    return value


def _load_env_vars() -> dict:
    """Load and validate the QPKIT_* environment variables."""
    load_dotenv()
    level = os.getenv("QPKIT_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper() or DEFAULT_LOG_LEVEL
    if level not in _LEVELS:
        raise EnvironmentError(
            f"QPKIT_LOG_LEVEL must be one of {', '.join(_LEVELS)}, got '{level}'.\n"
            "Fix or remove it in your .env file (see .env.example)."
        )
    return {
        "d_max": _positive_int("QPKIT_DMAX", DEFAULT_DMAX),
        "bound": _positive_int("QPKIT_BOUND", DEFAULT_BOUND),
        "log_level": level,
    }


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Create and return the cached settings.

    Returns:
        Settings: Defaults for d_max, bound and log level.
    """
    return Settings(**_load_env_vars())
