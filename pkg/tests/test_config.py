from __future__ import annotations

from pathlib import Path

import pytest

from temporalis.config import default_settings, load_settings

ENV_NAMES = (
    "TEMPORALIS_THREADS",
    "TEMPORALIS_MAX_STATES",
    "TEMPORALIS_MAX_CANDIDATES",
    "TEMPORALIS_ORACLE_MAX_CANDIDATES",
    "TEMPORALIS_WITNESS_MARGIN",
    "TEMPORALIS_VALIDATE_WITNESSES",
    "LOG_LEVEL",
)


@pytest.fixture
def clean_env(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> pytest.MonkeyPatch:
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return monkeypatch


def test_defaults(clean_env: pytest.MonkeyPatch) -> None:
    settings = load_settings()
    defaults = default_settings()
    assert settings.max_states == 1_000_000
    assert settings.max_candidates == 100_000
    assert settings.oracle_max_candidates == 2**24
    assert settings.witness_margin == 3
    assert settings.validate_witnesses is True
    assert settings.log_level == "WARNING"
    assert 1 <= settings.threads <= 8
    assert settings.max_states == defaults.max_states


def test_environment_overrides(clean_env: pytest.MonkeyPatch) -> None:
    clean_env.setenv("TEMPORALIS_THREADS", "2")
    clean_env.setenv("TEMPORALIS_MAX_STATES", "500")
    clean_env.setenv("TEMPORALIS_VALIDATE_WITNESSES", "off")
    clean_env.setenv("LOG_LEVEL", "DEBUG")
    settings = load_settings()
    assert settings.threads == 2
    assert settings.max_states == 500
    assert settings.validate_witnesses is False
    assert settings.log_level == "DEBUG"


def test_malformed_integer_falls_back(clean_env: pytest.MonkeyPatch) -> None:
    clean_env.setenv("TEMPORALIS_MAX_CANDIDATES", "lots")
    clean_env.setenv("TEMPORALIS_THREADS", "0")
    settings = load_settings()
    assert settings.max_candidates == 100_000
    assert settings.threads == 1

