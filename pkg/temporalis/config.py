from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv


def _get_env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _get_env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError:
        return default


def _default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


@dataclass(frozen=True)
class Settings:
    threads: int
    max_states: int
    max_candidates: int
    oracle_max_candidates: int
    witness_margin: int
    validate_witnesses: bool
    log_level: str


def load_settings() -> Settings:
    load_dotenv(override=False)

    workspace_root = Path(__file__).parent.parent
    env_path = workspace_root / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path, override=False)
    return Settings(
        threads=max(1, _get_env_int("TEMPORALIS_THREADS", _default_threads())),
        max_states=_get_env_int("TEMPORALIS_MAX_STATES", 1_000_000),
        max_candidates=_get_env_int("TEMPORALIS_MAX_CANDIDATES", 100_000),
        oracle_max_candidates=_get_env_int("TEMPORALIS_ORACLE_MAX_CANDIDATES", 2**24),
        witness_margin=_get_env_int("TEMPORALIS_WITNESS_MARGIN", 3),
        validate_witnesses=_get_env_bool("TEMPORALIS_VALIDATE_WITNESSES", True),
        log_level=os.getenv("LOG_LEVEL", "WARNING"),
    )


def default_settings() -> Settings:
    """Settings with built-in defaults, ignoring the environment."""
    return Settings(
        threads=_default_threads(),
        max_states=1_000_000,
        max_candidates=100_000,
        oracle_max_candidates=2**24,
        witness_margin=3,
        validate_witnesses=True,
        log_level="WARNING",
    )
