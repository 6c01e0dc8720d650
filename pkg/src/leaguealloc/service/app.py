"""HTTP face of the allocation toolkit.

Stateless by design: every request carries its own data, every response
is a plain JSON document, and domain errors surface as 400s with the
raising error class named. The ``alloc`` CLI drives this app in-process
by default, so the service layer is exercised even offline.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..axioms import Verdict, run_axioms, run_random_suite
from ..errors import InputError, LeagueAllocError
from ..fans import fit_fan_model, allocate_from_decomposition
from ..games import egalitarian, egalitarian_shapley, game_from_matrix, in_core, shapley
from ..model import AudienceMatrix, aggregates
from ..rules import RuleSpec, apply_rule, apply_rule_to_totals, concede_and_divide, monetize
from ..tables import bundled_fixture, parse_season_fixture, reproduce_table1, reproduce_table2
from ..voting import (
    OutcomeKind,
    condorcet_tournament,
    majority_winner_from_totals,
    single_crossing_check,
)
from ..cancelled import extended_allocate
from .schemas import (
    AllocateRequest,
    AllocationResponse,
    AxiomReportPayload,
    AxiomsRequest,
    AxiomsResponse,
    CancelledRequest,
    ColumnCheckPayload,
    CoreCheckResponse,
    DecomposeRequest,
    DecomposeResponse,
    GameRequest,
    GameResponse,
    InvarianceReport,
    LorenzRequest,
    LorenzResponse,
    ReproduceRequest,
    ReproduceResponse,
    RulePayload,
    SingleCrossingResponse,
    VoteRequest,
    VoteResponse,
)
from ..voting import lorenz_compare

app = FastAPI(
    title="leaguealloc",
    version=__version__,
    description="Allocation rules and diagnostics for pooled broadcasting revenue.",
)


@app.exception_handler(LeagueAllocError)
async def _domain_error(request: Request, exc: LeagueAllocError) -> JSONResponse:
    return JSONResponse(
        status_code=400,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.get("/")
def health() -> dict:
    return {"service": "leaguealloc", "version": __version__}


def _maybe_monetized(allocation, endowment: float | None):
    if endowment is None:
        return allocation
    return monetize(allocation, endowment)


@app.post("/allocate", response_model=AllocationResponse)
def allocate(request: AllocateRequest) -> AllocationResponse:
    spec = request.rule.to_spec()
    if request.matrix is not None:
        allocation = apply_rule(spec, request.matrix.to_matrix())
    else:
        allocation = apply_rule_to_totals(spec, request.aggregates.to_aggregates())
    return AllocationResponse.from_allocation(
        _maybe_monetized(allocation, request.endowment), spec
    )


def _resolve_club(matrix: AudienceMatrix, club: str | int) -> int:
    if isinstance(club, bool):  # bool is an int subclass; reject it explicitly
        raise InputError("club must be a label or an index")
    if isinstance(club, int):
        if not 0 <= club < matrix.n:
            raise InputError(f"club index {club} out of range for {matrix.n} clubs")
        return club
    return matrix.index_of(club)


@app.post("/decompose", response_model=DecomposeResponse)
def decompose(request: DecomposeRequest) -> DecomposeResponse:
    matrix = request.matrix.to_matrix()
    reference = _resolve_club(matrix, request.reference_club)
    fitted = fit_fan_model(matrix, reference)
    allocation = allocate_from_decomposition(matrix, fitted)
    invariance = None
    if request.check_invariance:
        benchmark = concede_and_divide(matrix).as_array()
        payoffs = [
            allocate_from_decomposition(matrix, fit_fan_model(matrix, k)).as_array()
            for k in range(matrix.n)
        ]
        spread = max(
            float(np.max(np.abs(p - payoffs[0]))) for p in payoffs
        )
        to_benchmark = max(float(np.max(np.abs(p - benchmark))) for p in payoffs)
        invariance = InvarianceReport(
            references_checked=matrix.n,
            max_gap_between_references=spread,
            max_gap_to_concede_divide=to_benchmark,
            within=bool(to_benchmark <= 1e-6),
        )
    return DecomposeResponse(
        clubs=list(matrix.labels),
        reference_club=matrix.labels[reference],
        generic=fitted.generic,
        club_fans=[float(v) for v in fitted.club_fans],
        joint_fans=[[float(v) for v in row] for row in fitted.joint_fans],
        allocation=AllocationResponse.from_allocation(allocation),
        invariance=invariance,
    )


@app.post("/game", response_model=GameResponse)
def game(request: GameRequest) -> GameResponse:
    matrix = request.matrix.to_matrix()
    table = game_from_matrix(matrix)
    if request.op == "core-check":
        if request.allocation_values is None:
            raise InputError("core-check needs 'allocation_values'")
        check = in_core(table, request.allocation_values, tol=request.tol)
        coalition = (
            [matrix.labels[i] for i in check.coalition]
            if check.coalition is not None
            else None
        )
        return GameResponse(
            op=request.op,
            grand_value=table.grand_value,
            core=CoreCheckResponse(
                in_core=check.in_core,
                reason=check.reason,
                coalition=coalition,
                shortfall=check.shortfall,
            ),
        )
    if request.op == "shapley":
        allocation = shapley(table, method=request.method)
    elif request.op == "egalitarian":
        allocation = egalitarian(table)
    else:
        if request.beta is None:
            raise InputError("eg-shapley needs 'beta'")
        allocation = egalitarian_shapley(table, request.beta, method=request.method)
    return GameResponse(
        op=request.op,
        grand_value=table.grand_value,
        allocation=AllocationResponse.from_allocation(allocation),
    )


@app.post("/vote", response_model=VoteResponse)
def vote(request: VoteRequest) -> VoteResponse:
    if request.mode == "tournament":
        if request.matrix is None:
            raise InputError("a tournament needs the full matrix")
        matrix = request.matrix.to_matrix()
        outcome = condorcet_tournament(
            matrix, [payload.to_spec() for payload in request.rules]
        )
        rules = [payload.to_spec() for payload in request.rules]
        return VoteResponse(
            mode=request.mode,
            kind=outcome.kind.value,
            winner_rules=[RulePayload.from_spec(spec) for spec in outcome.winners],
            pairwise_wins=[list(row) for row in outcome.pairwise_wins],
            cycle=(
                [RulePayload.from_spec(rules[i]) for i in outcome.cycle]
                if outcome.cycle is not None
                else None
            ),
        )
    if request.mode == "single-crossing":
        if request.matrix is None:
            raise InputError("the single-crossing check needs the full matrix")
        matrix = request.matrix.to_matrix()
        crossing = single_crossing_check(matrix, request.low, request.high)
        return VoteResponse(
            mode=request.mode,
            single_crossing=SingleCrossingResponse(
                ok=crossing.ok,
                position=crossing.position,
                order=[matrix.labels[i] for i in crossing.order],
                signs=list(crossing.signs),
            ),
        )
    if request.matrix is not None:
        agg = aggregates(request.matrix.to_matrix())
    else:
        agg = request.aggregates.to_aggregates()
    outcome = majority_winner_from_totals(agg, request.low, request.high)
    below, at, above = outcome.pivotal
    return VoteResponse(
        mode=request.mode,
        kind=outcome.kind.value,
        winner_weights=[float(w) for w in outcome.winners],
        pivotal={"below_mean": below, "at_mean": at, "above_mean": above},
    )


@app.post("/lorenz", response_model=LorenzResponse)
def lorenz(request: LorenzRequest) -> LorenzResponse:
    left_spec = request.left.to_spec()
    right_spec = request.right.to_spec()
    if request.matrix is not None:
        matrix = request.matrix.to_matrix()
        left = apply_rule(left_spec, matrix)
        right = apply_rule(right_spec, matrix)
    else:
        agg = request.aggregates.to_aggregates()
        left = apply_rule_to_totals(left_spec, agg)
        right = apply_rule_to_totals(right_spec, agg)
    result = lorenz_compare(left, right)
    return LorenzResponse(
        verdict=result.verdict.value,
        crossing=result.crossing,
        left=AllocationResponse.from_allocation(left, left_spec),
        right=AllocationResponse.from_allocation(right, right_spec),
    )


@app.post("/cancelled", response_model=AllocationResponse)
def cancelled(request: CancelledRequest) -> AllocationResponse:
    partial = request.matrix.to_partial()
    spec = request.rule.to_spec()
    allocation = extended_allocate(partial, request.endowment, request.operator, spec)
    return AllocationResponse.from_allocation(allocation, spec)


@app.post("/axioms", response_model=AxiomsResponse)
def axioms(request: AxiomsRequest) -> AxiomsResponse:
    spec = request.rule.to_spec()
    reports: list[AxiomReportPayload] = []
    if request.suite is not None:
        results = run_random_suite(
            spec,
            count=request.suite.count,
            seed=request.suite.seed,
            min_clubs=request.suite.min_clubs,
            max_clubs=request.suite.max_clubs,
        )
        for result in results:
            first = result.first_violation
            reports.append(
                AxiomReportPayload(
                    axiom=result.axiom,
                    verdict=result.verdict.value,
                    witness=first.witness if first is not None else None,
                    detail=first.detail if first is not None else "",
                    instances=result.instances,
                    violation_index=result.violation_index,
                )
            )
    else:
        matrix = request.matrix.to_matrix()
        club = (
            _resolve_club(matrix, request.club) if request.club is not None else None
        )
        results = run_axioms(
            spec,
            matrix,
            partner=request.partner.to_matrix() if request.partner is not None else None,
            permutation=request.permutation,
            club=club,
        )
        reports.extend(
            AxiomReportPayload(
                axiom=report.axiom,
                verdict=report.verdict.value,
                witness=report.witness,
                detail=report.detail,
            )
            for report in results
        )
    all_hold = all(report.verdict != Verdict.VIOLATED.value for report in reports)
    return AxiomsResponse(rule=RulePayload.from_spec(spec), reports=reports, all_hold=all_hold)


@app.post("/reproduce", response_model=ReproduceResponse)
def reproduce(request: ReproduceRequest) -> ReproduceResponse:
    if request.fixture_csv is not None:
        fixture = parse_season_fixture(request.fixture_csv, name="request fixture")
        if fixture.table != request.table:
            raise InputError(
                f"fixture has the shape of table {fixture.table}, request says {request.table}"
            )
    else:
        fixture = bundled_fixture(request.table)
    report = reproduce_table1(fixture) if request.table == 1 else reproduce_table2(fixture)
    return ReproduceResponse(
        table=report.table,
        season=report.season,
        endowment=report.endowment,
        rows=[dict(row) for row in report.rows],
        checks=[
            ColumnCheckPayload(
                column=check.column,
                tolerance=check.tolerance,
                max_abs_delta=check.max_abs_delta,
                worst_club=check.worst_club,
                within=check.within,
            )
            for check in report.checks
        ],
        within_tolerance=report.within_tolerance,
        notes=list(report.notes),
    )
