from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from temporalis.main import cli

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture
def runner(monkeypatch: pytest.MonkeyPatch) -> CliRunner:
    monkeypatch.setenv("LOG_LEVEL", "WARNING")
    monkeypatch.setenv("TEMPORALIS_THREADS", "1")
    return CliRunner()


def test_check_json(runner: CliRunner) -> None:
    result = runner.invoke(
        cli, ["check", "--program", fixture("fix1.dmtl"), "--data", fixture("fix1.dfacts"), "--mode", "fp", "--json"]
    )
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["exists"] is True
    assert payload["mode"] == "fp"


def test_check_text(runner: CliRunner) -> None:
    result = runner.invoke(
        cli, ["check", "--program", fixture("fix1.dmtl"), "--data", fixture("fix1.dfacts"), "--mode", "oracle"]
    )
    assert result.exit_code == 0
    assert result.stdout.splitlines()[:3] == ["stable model: yes (mode oracle)", "P@[0,1] .", "R@[1,2] ."]


def test_rational_data_exits_with_input_error(runner: CliRunner) -> None:
    result = runner.invoke(
        cli, ["check", "--program", fixture("fix1.dmtl"), "--data", fixture("rational_bad.dfacts")]
    )
    assert result.exit_code == 2


def test_missing_program_exits_with_input_error(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["check", "--program", fixture("missing.dmtl")])
    assert result.exit_code == 2


def test_guard_exceeded_exits_with_three(runner: CliRunner) -> None:
    result = runner.invoke(
        cli, ["oracle", "--program", fixture("fix3.dmtl"), "--horizon", "0:0", "--max-candidates", "2"]
    )
    assert result.exit_code == 3


def test_cautious_entailment(runner: CliRunner) -> None:
    result = runner.invoke(
        cli,
        [
            "entail",
            "--program",
            fixture("fix2.dmtl"),
            "--data",
            fixture("fix2.dfacts"),
            "--fact",
            "R@0",
            "--cautious",
            "--mode",
            "oracle",
            "--json",
        ],
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["entailed"] is False


def test_eval_text(runner: CliRunner, tmp_path: Path) -> None:
    interp = tmp_path / "model.dfacts"
    interp.write_text("R@[1,2] .\n", encoding="utf-8")
    result = runner.invoke(cli, ["eval", "--data", str(interp), "--fact", "R@[1,2]"])
    assert result.exit_code == 0
    assert result.stdout.strip() == "R@[1,2]: true"


def test_unknown_mode_is_a_usage_error(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["check", "--program", fixture("fix1.dmtl"), "--mode", "sometimes"])
    assert result.exit_code == 2
