"""
Shared configuration for gvnn-kit.

Environment-driven settings live here so that numerical modules can read them
without importing the CLI. Values are read once at import; tests that need a
different value patch the module attribute or the environment and call
`reload_settings()`.
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Settings:
    """Process-wide settings resolved from the environment."""

    log_level: str = "INFO"
    log_file: str = ""
    kron_max_dim: int = 8192
    jacobi_max_sweeps: int = 100

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            log_level=os.getenv("GVNN_LOG_LEVEL", "INFO").upper(),
            log_file=os.getenv("GVNN_LOG_FILE", ""),
            kron_max_dim=int(os.getenv("GVNN_KRON_MAX_DIM", "8192")),
            jacobi_max_sweeps=int(os.getenv("GVNN_JACOBI_MAX_SWEEPS", "100")),
        )


_settings = Settings.from_env()


def get_settings() -> Settings:
    return _settings


def reload_settings() -> Settings:
    """Re-read the environment, e.g. after a test changed it."""
    global _settings
    _settings = Settings.from_env()
    return _settings


# Protocol seeds used by the forecasting experiments
PROTOCOL_SEEDS = (124, 14, 124235)
DEFAULT_SEED = PROTOCOL_SEEDS[0]

FORMAT_TAG = "gvnn-kit v1"

__all__ = [
    "Settings",
    "get_settings",
    "reload_settings",
    "PROTOCOL_SEEDS",
    "DEFAULT_SEED",
    "FORMAT_TAG",
]
