from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

COMMANDS = ("check", "entail", "normalize", "ground", "eval", "oracle")


class ErrorInfo(BaseModel):
    code: str
    message: str


class CommandResult(BaseModel):
    ok: bool
    command: str
    data: Dict[str, Any] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)
    error: Optional[ErrorInfo] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str
    program_path: Optional[str] = None
    dataset_path: Optional[str] = None
    mode: str = "auto"
    fact: Optional[str] = None
    cautious: bool = True
    horizon: Optional[str] = None
    max_states: Optional[int] = Field(default=None, gt=0)
    max_candidates: Optional[int] = Field(default=None, gt=0)
    witness: bool = False
    report_path: Optional[str] = None
    json_output: bool = False


class CheckPayload(BaseModel):
    exists: bool
    mode: str
    model: List[str] = Field(default_factory=list)
    witness: Optional[Dict[str, Any]] = None


class EntailPayload(BaseModel):
    entailed: bool
    query: str
    query_mode: str
    mode: str
    model: List[str] = Field(default_factory=list)


class FreshPredicateInfo(BaseModel):
    name: str
    step: str
    sources: List[str] = Field(default_factory=list)


class NormalizePayload(BaseModel):
    program: str
    rules_in: int
    rules_out: int
    forward_propagating: bool
    fresh_predicates: List[FreshPredicateInfo] = Field(default_factory=list)
    violations: List[str] = Field(default_factory=list)


class GroundPayload(BaseModel):
    rules: List[str]
    count: int


class EvalPayload(BaseModel):
    fact: str
    holds: bool


class OraclePayload(BaseModel):
    box: List[int]
    count: int
    models: List[List[str]] = Field(default_factory=list)
