from __future__ import annotations

import json
import logging
from pathlib import Path

from temporalis.config import Settings
from temporalis.errors import INPUT_NOT_FOUND, INVALID_ARGUMENT, RATIONAL_TIMELINE
from temporalis.service import ReasonerService

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def make_settings() -> Settings:
    return Settings(
        threads=1,
        max_states=200_000,
        max_candidates=10_000,
        oracle_max_candidates=2**16,
        witness_margin=3,
        validate_witnesses=True,
        log_level="INFO",
    )


def make_logger() -> logging.Logger:
    logger = logging.getLogger("tests.service")
    if not logger.handlers:
        logger.addHandler(logging.NullHandler())
    return logger


def make_service() -> ReasonerService:
    return ReasonerService(make_settings(), make_logger())


def test_check_in_forward_mode() -> None:
    result = make_service().check(fixture("fix1.dmtl"), fixture("fix1.dfacts"), mode="fp", witness=True)
    assert result["ok"] is True
    assert result["data"]["exists"] is True
    assert result["data"]["mode"] == "fp"
    assert result["data"]["witness"]["tail_constant"] is True
    assert result["metadata"]["mode"] == "fp"
    assert result["metadata"]["request_id"]


def test_check_with_oracle_lists_the_model() -> None:
    result = make_service().check(fixture("fix1.dmtl"), fixture("fix1.dfacts"), mode="oracle")
    assert result["ok"] is True
    assert result["data"]["model"] == ["P@[0,1] .", "R@[1,2] ."]
    assert result["data"]["witness"] is None


def test_rational_data_is_an_input_error() -> None:
    result = make_service().check(fixture("fix1.dmtl"), fixture("rational_bad.dfacts"))
    assert result["ok"] is False
    assert result["error"]["code"] == RATIONAL_TIMELINE


def test_missing_file() -> None:
    result = make_service().check(fixture("missing.dmtl"))
    assert result["ok"] is False
    assert result["error"]["code"] == INPUT_NOT_FOUND


def test_invalid_arguments_are_rejected() -> None:
    service = make_service()
    result = service.check(fixture("fix1.dmtl"), mode="sometimes")
    assert result["error"]["code"] == INVALID_ARGUMENT
    result = service.check(fixture("fix1.dmtl"), max_states=0)
    assert result["error"]["code"] == INVALID_ARGUMENT
    result = service.oracle(fixture("fix3.dmtl"), horizon="zero")
    assert result["error"]["code"] == INVALID_ARGUMENT


def test_entail_cautious_and_brave() -> None:
    service = make_service()
    cautious = service.entail(fixture("fix2.dmtl"), "R@0", fixture("fix2.dfacts"), cautious=True, mode="oracle")
    assert cautious["ok"] is True
    assert cautious["data"]["entailed"] is False
    assert cautious["data"]["query_mode"] == "cautious"
    assert "R@1 ." in cautious["data"]["model"]
    brave = service.entail(fixture("fix2.dmtl"), "R@0", fixture("fix2.dfacts"), cautious=False, mode="oracle")
    assert brave["data"]["entailed"] is True


def test_normalize_writes_report(tmp_path: Path) -> None:
    report = tmp_path / "report.json"
    result = make_service().normalize(fixture("fix1.dmtl"), str(report))
    assert result["ok"] is True
    assert result["data"]["forward_propagating"] is True
    assert "TOP SINCE[1,1] P" in result["data"]["program"]
    written = json.loads(report.read_text(encoding="utf-8"))
    assert written["rules_in"] == written["rules_out"] == 1
    assert "program" not in written


def test_ground_and_eval(tmp_path: Path) -> None:
    service = make_service()
    program = tmp_path / "rules.dmtl"
    program.write_text("R(X) :- P(X) .\n", encoding="utf-8")
    data = tmp_path / "data.dfacts"
    data.write_text("P(a)@0 .\nP(b)@1 .\n", encoding="utf-8")
    grounded = service.ground(str(program), str(data))
    assert grounded["data"]["count"] == 2
    interp = tmp_path / "model.dfacts"
    interp.write_text("R@[1,2] .\n", encoding="utf-8")
    assert service.eval(str(interp), "R@[1,2]")["data"]["holds"] is True
    assert service.eval(str(interp), "R@[0,2]")["data"]["holds"] is False


def test_oracle_counts_models() -> None:
    result = make_service().oracle(fixture("fix3.dmtl"), horizon="0:0")
    assert result["ok"] is True
    assert result["data"]["count"] == 8
    assert result["data"]["box"] == [0, 0]
