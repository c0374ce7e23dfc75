from __future__ import annotations

import dataclasses
import json
import logging
import time
import uuid
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Type

from jsonschema import ValidationError as JsonSchemaValidationError
from jsonschema import validate as jsonschema_validate
from pydantic import BaseModel, ValidationError

from .config import Settings
from .entail import BRAVE, CAUTIOUS, EntailmentQuery, entails
from .errors import (
    INPUT_NOT_FOUND,
    INTERNAL_ERROR,
    INVALID_ARGUMENT,
    TemporalisError,
    temporalis_error,
)
from .normalize import check_normal_form, normalize
from .oracle import SearchBox, default_box, oracle_stable_models
from .parser import parse_dataset, parse_fact_query, parse_interpretation, parse_program
from .schemas import (
    CheckPayload,
    CommandResult,
    EntailPayload,
    ErrorInfo,
    EvalPayload,
    FreshPredicateInfo,
    GroundPayload,
    NormalizePayload,
    OraclePayload,
    RunConfig,
)
from .stablecheck import MODES, has_stable_model, stable_context, validation_horizon, witness_to_json
from .syntax import (
    Dataset,
    Interval,
    Program,
    format_fact,
    format_program,
    format_rule,
    ground,
    is_forward_propagating,
)
from .temporal import Interpretation, models_fact


def parse_horizon(text: str) -> Interval:
    """``lo:hi`` with integer bounds."""
    lo, sep, hi = text.partition(":")
    if not sep:
        raise temporalis_error(INVALID_ARGUMENT, f"horizon {text!r} must look like lo:hi")
    try:
        return Interval(int(lo), int(hi))
    except ValueError as exc:
        raise temporalis_error(INVALID_ARGUMENT, f"horizon {text!r} needs integer bounds", exc) from exc


def read_text(path: str) -> str:
    file = Path(path)
    if not file.is_file():
        raise temporalis_error(INPUT_NOT_FOUND, f"no such file: {path}")
    return file.read_text(encoding="utf-8")


def _facts(interp: Interpretation) -> List[str]:
    return [format_fact(fact) for fact in interp.to_facts()]


class ReasonerService:
    def __init__(self, settings: Settings, logger: logging.Logger) -> None:
        self._settings = settings
        self._logger = logger

    def check(
        self,
        program_path: str,
        dataset_path: Optional[str] = None,
        mode: str = "auto",
        horizon: Optional[str] = None,
        max_states: Optional[int] = None,
        max_candidates: Optional[int] = None,
        witness: bool = False,
    ) -> Dict[str, Any]:
        """Decide whether the program and dataset have a stable model."""

        def run(args: RunConfig, settings: Settings, warnings: List[str]) -> Tuple[BaseModel, str]:
            program, dataset = self._load(args)
            result = has_stable_model(program, dataset, args.mode, settings)
            window = parse_horizon(args.horizon) if args.horizon else None
            payload = CheckPayload(exists=result.exists, mode=result.mode)
            if result.witness is not None:
                if window is None:
                    window = validation_horizon(stable_context(program, dataset), settings.witness_margin)
                witness_json = witness_to_json(result.witness, window)
                payload.model = witness_json["reconstructed_facts"]
                if not witness_json["tail_constant"]:
                    warnings.append("witness loops are periodic; the model is listed up to the horizon only")
                if args.witness:
                    payload.witness = witness_json
            elif result.model is not None:
                payload.model = _facts(result.model)
            return payload, result.mode

        return self._run(
            "check",
            run,
            CheckPayload,
            program_path=program_path,
            dataset_path=dataset_path,
            mode=mode,
            horizon=horizon,
            max_states=max_states,
            max_candidates=max_candidates,
            witness=witness,
        )

    def entail(
        self,
        program_path: str,
        fact: str,
        dataset_path: Optional[str] = None,
        cautious: bool = True,
        mode: str = "auto",
        max_states: Optional[int] = None,
        max_candidates: Optional[int] = None,
    ) -> Dict[str, Any]:
        """Brave or cautious entailment of a ground fact."""

        def run(args: RunConfig, settings: Settings, warnings: List[str]) -> Tuple[BaseModel, str]:
            if not args.fact:
                raise temporalis_error(INVALID_ARGUMENT, "entail needs a fact such as R@[1,2]")
            program, dataset = self._load(args)
            atom, rho = parse_fact_query(args.fact)
            query = EntailmentQuery(atom, rho, CAUTIOUS if args.cautious else BRAVE)
            result = entails(program, dataset, query, args.mode, settings)
            model = result.model
            payload = EntailPayload(
                entailed=result.entailed,
                query=args.fact,
                query_mode=query.mode,
                mode=result.existence.mode,
                model=_facts(model) if model is not None else [],
            )
            return payload, result.existence.mode

        return self._run(
            "entail",
            run,
            EntailPayload,
            program_path=program_path,
            dataset_path=dataset_path,
            fact=fact,
            cautious=cautious,
            mode=mode,
            max_states=max_states,
            max_candidates=max_candidates,
        )

    def normalize(self, program_path: str, report_path: Optional[str] = None) -> Dict[str, Any]:
        """Rewrite a program into normal form, optionally writing the report as JSON."""

        def run(args: RunConfig, settings: Settings, warnings: List[str]) -> Tuple[BaseModel, str]:
            program, _ = self._load(args)
            report = normalize(program)
            payload = NormalizePayload(
                program=format_program(report.output),
                rules_in=len(program),
                rules_out=len(report.output),
                forward_propagating=is_forward_propagating(report.output),
                fresh_predicates=[
                    FreshPredicateInfo(name=fresh.name, step=fresh.step, sources=list(fresh.sources))
                    for fresh in report.fresh_predicates.values()
                ],
                violations=check_normal_form(report.output),
            )
            if payload.violations:
                raise temporalis_error(INTERNAL_ERROR, f"normalized program is not normal: {payload.violations[0]}")
            if args.report_path:
                Path(args.report_path).write_text(
                    json.dumps(payload.model_dump(exclude={"program"}), indent=2) + "\n", encoding="utf-8"
                )
            return payload, "normalize"

        return self._run("normalize", run, NormalizePayload, program_path=program_path, report_path=report_path)

    def ground(self, program_path: str, dataset_path: Optional[str] = None) -> Dict[str, Any]:
        """Ground instances of the program over the program and dataset constants."""

        def run(args: RunConfig, settings: Settings, warnings: List[str]) -> Tuple[BaseModel, str]:
            program, dataset = self._load(args)
            rules = [format_rule(rule) for rule in ground(program, dataset)]
            return GroundPayload(rules=rules, count=len(rules)), "ground"

        return self._run("ground", run, GroundPayload, program_path=program_path, dataset_path=dataset_path)

    def eval(self, interpretation_path: str, fact: str) -> Dict[str, Any]:
        """Whether a fact holds in an interpretation file."""

        def run(args: RunConfig, settings: Settings, warnings: List[str]) -> Tuple[BaseModel, str]:
            if not args.fact:
                raise temporalis_error(INVALID_ARGUMENT, "eval needs a fact such as R@[1,2]")
            interp = parse_interpretation(read_text(args.dataset_path or ""))
            atom, rho = parse_fact_query(args.fact)
            return EvalPayload(fact=args.fact, holds=models_fact(interp, atom, rho)), "eval"

        return self._run("eval", run, EvalPayload, dataset_path=interpretation_path, fact=fact)

    def oracle(
        self,
        program_path: str,
        dataset_path: Optional[str] = None,
        horizon: Optional[str] = None,
        max_candidates: Optional[int] = None,
    ) -> Dict[str, Any]:
        """Every tail-constant stable model found by exhaustive search over a bounded box."""

        def run(args: RunConfig, settings: Settings, warnings: List[str]) -> Tuple[BaseModel, str]:
            program, dataset = self._load(args)
            box = SearchBox(parse_horizon(args.horizon)) if args.horizon else default_box(program, dataset)
            limit = args.max_candidates or settings.oracle_max_candidates
            models = oracle_stable_models(program, dataset, box, max_candidates=limit, threads=settings.threads)
            payload = OraclePayload(
                box=[int(box.window.lo), int(box.window.hi)],
                count=len(models),
                models=[_facts(model) for model in models],
            )
            return payload, "oracle"

        return self._run(
            "oracle",
            run,
            OraclePayload,
            program_path=program_path,
            dataset_path=dataset_path,
            horizon=horizon,
            max_candidates=max_candidates,
        )

    def _load(self, args: RunConfig) -> Tuple[Program, Dataset]:
        if not args.program_path:
            raise temporalis_error(INVALID_ARGUMENT, "a program file is required")
        program = parse_program(read_text(args.program_path))
        dataset = parse_dataset(read_text(args.dataset_path)) if args.dataset_path else Dataset()
        return program, dataset

    def _settings_for(self, args: RunConfig) -> Settings:
        changes: Dict[str, Any] = {}
        if args.max_states is not None:
            changes["max_states"] = args.max_states
        if args.max_candidates is not None:
            changes["max_candidates"] = args.max_candidates
        return dataclasses.replace(self._settings, **changes)

    def _run(
        self,
        command: str,
        body: Callable[[RunConfig, Settings, List[str]], Tuple[BaseModel, str]],
        payload_model: Type[BaseModel],
        **fields: Any,
    ) -> Dict[str, Any]:
        request_id = self._new_request_id()
        warnings: List[str] = []
        started = time.perf_counter()
        self._log_info(f"{command} start", request_id, command=command)
        try:
            args = RunConfig(command=command, **fields)
            if args.mode not in MODES:
                raise temporalis_error(INVALID_ARGUMENT, f"mode must be one of {', '.join(MODES)}")
            payload, mode = body(args, self._settings_for(args), warnings)
            data = payload.model_dump()
            try:
                jsonschema_validate(data, payload_model.model_json_schema())
            except JsonSchemaValidationError as exc:
                raise temporalis_error(INTERNAL_ERROR, f"{command} payload does not match its schema: {exc.message}", exc)
            return CommandResult(
                ok=True,
                command=command,
                data=data,
                metadata={
                    "request_id": request_id,
                    "mode": mode,
                    "duration_ms": int((time.perf_counter() - started) * 1000),
                },
                warnings=warnings,
            ).model_dump()
        except ValidationError as exc:
            return self._error_result(command, request_id, exc, warnings)
        except TemporalisError as exc:
            return self._error_result(command, request_id, exc, warnings)
        except Exception as exc:
            return self._error_result(command, request_id, exc, warnings)
        finally:
            self._log_info(f"{command} end", request_id, command=command)

    def _new_request_id(self) -> str:
        return str(uuid.uuid4())

    def _log_info(self, message: str, request_id: str, **fields: Any) -> None:
        self._logger.info(message, extra={"request_id": request_id, **fields})

    def _log_error(self, message: str, request_id: str, **fields: Any) -> None:
        self._logger.error(message, extra={"request_id": request_id, **fields})

    def _error_result(
        self,
        command: str,
        request_id: str,
        exc: Exception,
        warnings: List[str],
    ) -> Dict[str, Any]:
        if isinstance(exc, ValidationError):
            error = ErrorInfo(code=INVALID_ARGUMENT, message="Invalid arguments")
            self._log_error("validation error", request_id, detail=str(exc))
        elif isinstance(exc, TemporalisError):
            error = ErrorInfo(code=exc.code, message=exc.message)
            self._log_error("reasoner error", request_id, code=exc.code, detail=str(exc))
        else:
            error = ErrorInfo(code=INTERNAL_ERROR, message="Internal error")
            self._logger.error(
                "unhandled error",
                extra={
                    "request_id": request_id,
                    "exception_type": type(exc).__name__,
                    "detail": str(exc),
                },
                exc_info=True,
            )
        return CommandResult(
            ok=False,
            command=command,
            metadata={"request_id": request_id},
            warnings=warnings,
            error=error,
        ).model_dump()
