"""Request and response bodies for the HTTP service.

Matrices travel as nested lists (``null`` marks an unplayed game, which
only the cancelled-season endpoint accepts), rules as objects like
``{"kind": "compromise", "lambda": 0.25}``, and every allocation comes
back in one canonical shape: clubs, rule, unit, endowment, values.
"""

from __future__ import annotations

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..cancelled import PartialAudienceMatrix
from ..errors import InputError
from ..model import AggregateAudience, Allocation, AudienceMatrix, default_labels
from ..rules import RuleSpec


class MatrixPayload(BaseModel):
    """A (possibly partial) audience matrix; ``labels`` default to Club 1..n."""

    labels: list[str] | None = None
    entries: list[list[float | None]]

    def _labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return tuple(self.labels)
        return default_labels(len(self.entries))

    def to_matrix(self) -> AudienceMatrix:
        for i, row in enumerate(self.entries):
            for j, cell in enumerate(row):
                if cell is None:
                    raise InputError(
                        f"entry ({i}, {j}) is null; complete matrices have no missing "
                        "games (only the cancelled-season endpoint accepts them)"
                    )
        return AudienceMatrix(self._labels(), np.asarray(self.entries, dtype=float))

    def to_partial(self) -> PartialAudienceMatrix:
        n = len(self.entries)
        entries = np.zeros((n, max((len(r) for r in self.entries), default=0)))
        missing = np.zeros_like(entries, dtype=bool)
        for i, row in enumerate(self.entries):
            for j, cell in enumerate(row):
                if cell is None:
                    missing[i, j] = i != j  # a null diagonal is just the fixed 0
                else:
                    entries[i, j] = float(cell)
        return PartialAudienceMatrix(self._labels(), entries, missing)


class AggregatesPayload(BaseModel):
    """Per-club season totals, when the full matrix is not needed."""

    labels: list[str] | None = None
    audiences: list[float]

    def to_aggregates(self) -> AggregateAudience:
        labels = tuple(self.labels) if self.labels is not None else default_labels(len(self.audiences))
        return AggregateAudience(labels, tuple(self.audiences))


class RulePayload(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: str
    lam: float | None = Field(default=None, alias="lambda")

    def to_spec(self) -> RuleSpec:
        return RuleSpec(self.kind, self.lam)

    @classmethod
    def from_spec(cls, spec: RuleSpec) -> "RulePayload":
        return cls(kind=spec.kind.value, lam=spec.lam)


class AllocationResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    clubs: list[str]
    rule: RulePayload | None = None
    unit: str
    endowment: float
    values: list[float]
    warnings: list[str] = []

    @classmethod
    def from_allocation(
        cls, allocation: Allocation, rule: RuleSpec | None = None
    ) -> "AllocationResponse":
        warnings = []
        negative = [
            label for label, v in zip(allocation.labels, allocation.values) if v < 0.0
        ]
        if negative:
            warnings.append(
                "negative payout for: " + ", ".join(negative)
            )
        return cls(
            clubs=list(allocation.labels),
            rule=RulePayload.from_spec(rule) if rule is not None else None,
            unit=allocation.unit,
            endowment=allocation.endowment,
            values=list(allocation.values),
            warnings=warnings,
        )


class AllocateRequest(BaseModel):
    matrix: MatrixPayload | None = None
    aggregates: AggregatesPayload | None = None
    rule: RulePayload
    endowment: float | None = None

    @model_validator(mode="after")
    def _exactly_one_input(self) -> "AllocateRequest":
        if (self.matrix is None) == (self.aggregates is None):
            raise ValueError("provide exactly one of 'matrix' or 'aggregates'")
        return self


class InvarianceReport(BaseModel):
    """Reference-independence evidence for the regression allocation."""

    references_checked: int
    max_gap_between_references: float
    max_gap_to_concede_divide: float
    within: bool


class DecomposeRequest(BaseModel):
    matrix: MatrixPayload
    reference_club: str | int = 0
    check_invariance: bool = False


class DecomposeResponse(BaseModel):
    clubs: list[str]
    reference_club: str
    generic: float
    club_fans: list[float]
    joint_fans: list[list[float]]
    allocation: AllocationResponse
    invariance: InvarianceReport | None = None


class GameRequest(BaseModel):
    matrix: MatrixPayload
    op: Literal["shapley", "egalitarian", "eg-shapley", "core-check"]
    method: Literal["subset", "permutation"] = "subset"
    beta: float | None = None
    allocation_values: list[float] | None = None
    tol: float = 1e-9


class CoreCheckResponse(BaseModel):
    in_core: bool
    reason: str | None = None
    coalition: list[str] | None = None
    shortfall: float | None = None


class GameResponse(BaseModel):
    op: str
    grand_value: float
    allocation: AllocationResponse | None = None
    core: CoreCheckResponse | None = None


class VoteRequest(BaseModel):
    matrix: MatrixPayload | None = None
    aggregates: AggregatesPayload | None = None
    mode: Literal["family", "tournament", "single-crossing"] = "family"
    low: float | None = None
    high: float | None = None
    rules: list[RulePayload] | None = None

    @model_validator(mode="after")
    def _consistent(self) -> "VoteRequest":
        if (self.matrix is None) == (self.aggregates is None):
            raise ValueError("provide exactly one of 'matrix' or 'aggregates'")
        if self.mode in ("family", "single-crossing"):
            if self.low is None or self.high is None:
                raise ValueError(f"mode {self.mode!r} needs 'low' and 'high'")
        else:
            if not self.rules:
                raise ValueError("mode 'tournament' needs a non-empty 'rules' list")
        return self


class SingleCrossingResponse(BaseModel):
    ok: bool
    position: int | None
    order: list[str]
    signs: list[int]


class VoteResponse(BaseModel):
    mode: str
    kind: str | None = None
    winner_weights: list[float] | None = None
    winner_rules: list[RulePayload] | None = None
    pivotal: dict[str, int] | None = None
    pairwise_wins: list[list[int]] | None = None
    cycle: list[RulePayload] | None = None
    single_crossing: SingleCrossingResponse | None = None


class LorenzRequest(BaseModel):
    matrix: MatrixPayload | None = None
    aggregates: AggregatesPayload | None = None
    left: RulePayload
    right: RulePayload

    @model_validator(mode="after")
    def _exactly_one_input(self) -> "LorenzRequest":
        if (self.matrix is None) == (self.aggregates is None):
            raise ValueError("provide exactly one of 'matrix' or 'aggregates'")
        return self


class LorenzResponse(BaseModel):
    verdict: str
    crossing: int | None = None
    left: AllocationResponse
    right: AllocationResponse


class CancelledRequest(BaseModel):
    matrix: MatrixPayload
    endowment: float
    operator: Literal["zero", "leg"]
    rule: RulePayload


class SuiteRequest(BaseModel):
    count: int = Field(default=100, ge=1, le=100_000)
    seed: int = 0
    min_clubs: int = Field(default=3, ge=3)
    max_clubs: int = Field(default=8, ge=3, le=12)


class AxiomsRequest(BaseModel):
    rule: RulePayload
    matrix: MatrixPayload | None = None
    partner: MatrixPayload | None = None
    permutation: list[int] | None = None
    club: str | int | None = None
    suite: SuiteRequest | None = None

    @model_validator(mode="after")
    def _one_mode(self) -> "AxiomsRequest":
        if (self.matrix is None) == (self.suite is None):
            raise ValueError("provide exactly one of 'matrix' (single check) or 'suite'")
        return self


class AxiomReportPayload(BaseModel):
    axiom: str
    verdict: str
    witness: dict[str, Any] | None = None
    detail: str = ""
    instances: int | None = None
    violation_index: int | None = None


class AxiomsResponse(BaseModel):
    rule: RulePayload
    reports: list[AxiomReportPayload]
    all_hold: bool


class ReproduceRequest(BaseModel):
    table: Literal[1, 2]
    fixture_csv: str | None = None


class ColumnCheckPayload(BaseModel):
    column: str
    tolerance: float
    max_abs_delta: float
    worst_club: str
    within: bool


class ReproduceResponse(BaseModel):
    table: int
    season: str
    endowment: float
    rows: list[dict[str, Any]]
    checks: list[ColumnCheckPayload]
    within_tolerance: bool
    notes: list[str]
