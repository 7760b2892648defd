"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CheckRequest(BaseModel):
    model_text: str = Field(description="model file content")
    samples: int = 50
    subset_cap: int = 4
    seed: int = 0


class StructureOut(BaseModel):
    is_bipartite: bool
    is_connected: bool
    is_tree: bool
    is_forest: bool
    components: list[list[str]]
    cycle: Optional[list[str]] = None
    edge_count: int


class CheckResponse(BaseModel):
    passed: bool
    structure: StructureOut
    positive_convergence: dict[str, dict]
    negative_convergence: dict
    monotonicity: dict


class InferRequest(BaseModel):
    model_text: str
    evidence: dict[str, float] = Field(default_factory=dict)
    query: Optional[str] = Field(
        default=None, description="unobserved root; omit when fully observed"
    )


class InferResponse(BaseModel):
    root: str
    root_pdf: Optional[float] = None
    support: Optional[list[float]] = None
    mu: Optional[list[float]] = None
    lam: Optional[list[float]] = None
    conditional_cdf: Optional[list[float]] = None
    term_counts: dict[str, int] = Field(default_factory=dict)


class Table1Row(BaseModel):
    a: list[str]
    b: list[str]
    given: list[str]
    expected_independent: bool
    independent: bool
    max_deviation: str
    witness: Optional[dict] = None
    passed: bool


class Table1Response(BaseModel):
    passed: bool
    rows: list[Table1Row]


class DspSuiteRequest(BaseModel):
    seeds: int = 100


class DspSuiteRow(BaseModel):
    seed: int
    variables: int
    functions: int
    assignments: int
    max_deviation: float
    passed: bool


class DspSuiteResponse(BaseModel):
    passed: bool
    max_deviation: float
    rows: list[DspSuiteRow]


class LogPayload(BaseModel):
    log_text: str
    format: Literal["csv", "jsonl"] = "csv"
    rank_one_best: bool = True


class RankFitRequest(LogPayload):
    sigma0: Optional[float] = None


class RankFitResponse(BaseModel):
    params: dict


class RankEvalRequest(LogPayload):
    params: Optional[dict] = None
    seed: int = 0


class RankEvalResponse(BaseModel):
    final_error: float
    random_final: float
    elo_final: Optional[float] = None
    per_game_error: list[float]
    cumulative_error: list[float]
    pairwise_inversion_final: float
    params: dict


class RankPredictRequest(BaseModel):
    history_text: str
    upcoming_text: str
    format: Literal["csv", "jsonl"] = "csv"
    rank_one_best: bool = True
    params: Optional[dict] = None


class RankPredictRow(BaseModel):
    game_id: str
    predicted_standings: list[int]
    cold_start_players: list[str]


class RankPredictResponse(BaseModel):
    predictions: list[RankPredictRow]


class ErrorResponse(BaseModel):
    error: str
    kind: str
