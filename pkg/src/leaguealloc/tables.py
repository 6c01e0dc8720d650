"""Reproducing published season tables from their raw columns.

Two bundled fixtures transcribe La Liga seasons: 2016/17 carries club
audiences next to the money actually paid and the two benchmark-rule
columns, 2017/18 carries per-club payouts and benchmark columns plus
the mixing weight that explains each payout. The reproduction routines
recompute everything recomputable and report per-cell deltas against
the published figures.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import CsvFormatError, InputError
from .io import csv_rows_from_text
from .model import AggregateAudience
from .rules import (
    FitKind,
    concede_and_divide_from_totals,
    equal_split_from_totals,
    monetize,
    rationalize_lambda,
)

# Published money cells must be matched this closely (same currency unit
# as the table, millions).
MONEY_TOL = 0.2
# Published percentage cells, in percentage points.
PCT_TOL = 0.01
# A concede-and-divide column re-derived from the equal-split column.
CD_RECOMPUTE_TOL = 0.1
# Published mixing weights are printed with two decimals.
LAMBDA_TOL = 0.01

_BUNDLED = {
    1: "laliga_2016_17_table1.csv",
    2: "laliga_2017_18_table2.csv",
}

_TABLE1_HEADER = ["club", "audience", "actual", "es", "cd", "pct_actual", "pct_es", "pct_cd"]
_TABLE2_HEADER = ["club", "actual", "es", "cd", "lambda"]


@dataclass(frozen=True)
class FixtureRow:
    club: str
    actual: float
    audience: float | None = None
    es: float | None = None
    cd: float | None = None
    pct_actual: float | None = None
    pct_es: float | None = None
    pct_cd: float | None = None
    verdict: str | None = None  # a two-decimal weight, "Below", or "Above"


@dataclass(frozen=True)
class SeasonFixture:
    season: str
    table: int
    rows: tuple[FixtureRow, ...]
    notes: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def endowment(self) -> float:
        return float(sum(row.actual for row in self.rows))


def _season_comment(text: str) -> str | None:
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.lower().startswith("# season:"):
            return stripped.split(":", 1)[1].strip()
    return None


def load_season_fixture(path: str | Path) -> SeasonFixture:
    """Read a season table CSV; the header decides which table it is."""
    path = Path(path)
    return parse_season_fixture(path.read_text(encoding="utf-8"), name=path.stem)


def parse_season_fixture(text: str, name: str = "fixture") -> SeasonFixture:
    """Parse season-table CSV content; the header decides which table it is."""
    path = name
    rows = csv_rows_from_text(text)
    if not rows:
        raise CsvFormatError(f"{path}: empty fixture")
    header = [cell.strip().lower() for cell in rows[0]]
    if header == _TABLE1_HEADER:
        table = 1
    elif header == _TABLE2_HEADER:
        table = 2
    else:
        raise CsvFormatError(
            f"{path}: unrecognised fixture header {rows[0]!r}; expected "
            f"{','.join(_TABLE1_HEADER)} or {','.join(_TABLE2_HEADER)}"
        )
    parsed = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvFormatError(f"{path}: row {k} has {len(row)} cells, expected {len(header)}")
        values = dict(zip(header, (cell.strip() for cell in row)))
        try:
            if table == 1:
                parsed.append(
                    FixtureRow(
                        club=values["club"],
                        audience=float(values["audience"]),
                        actual=float(values["actual"]),
                        es=float(values["es"]),
                        cd=float(values["cd"]),
                        pct_actual=float(values["pct_actual"]),
                        pct_es=float(values["pct_es"]),
                        pct_cd=float(values["pct_cd"]),
                    )
                )
            else:
                parsed.append(
                    FixtureRow(
                        club=values["club"],
                        actual=float(values["actual"]),
                        es=float(values["es"]),
                        cd=float(values["cd"]),
                        verdict=values["lambda"],
                    )
                )
        except ValueError as exc:
            raise CsvFormatError(f"{path}: row {k}: {exc}") from None
    season = _season_comment(text) or name
    fixture = SeasonFixture(season, table, tuple(parsed), _fixture_notes(parsed))
    _check_fixture_sums(fixture, str(path))
    return fixture


def _fixture_notes(rows: list[FixtureRow]) -> tuple[str, ...]:
    notes = []
    seen: dict[tuple[float, float], str] = {}
    for row in rows:
        if row.es is None or row.cd is None:
            continue
        key = (row.es, row.cd)
        if key in seen:
            notes.append(
                f"{seen[key]} and {row.club} publish identical benchmark cells "
                f"(es={row.es}, cd={row.cd}); possible source duplication, kept verbatim"
            )
        else:
            seen[key] = row.club
    return tuple(notes)


def _check_fixture_sums(fixture: SeasonFixture, where: str) -> None:
    endowment = fixture.endowment
    for column in ("es", "cd"):
        cells = [getattr(row, column) for row in fixture.rows]
        if any(cell is None for cell in cells):
            continue
        total = float(sum(cells))
        if abs(total - endowment) > 0.5:
            raise CsvFormatError(
                f"{where}: published {column} column sums to {total}, but the "
                f"payouts sum to {endowment}; columns must agree within 0.5"
            )


def bundled_fixture(table: int) -> SeasonFixture:
    """One of the two La Liga fixtures shipped with the package."""
    if table not in _BUNDLED:
        raise InputError(f"no bundled fixture for table {table}; valid: {sorted(_BUNDLED)}")
    with resources.as_file(resources.files("leaguealloc") / "data" / _BUNDLED[table]) as path:
        return load_season_fixture(path)


def bundled_data_path(name: str) -> Path:
    """Filesystem path of a bundled data file (for CLI examples)."""
    with resources.as_file(resources.files("leaguealloc") / "data" / name) as path:
        return Path(path)


def fixture_aggregates(fixture: SeasonFixture) -> AggregateAudience:
    """Per-club totals from a fixture's audience column."""
    audiences = [row.audience for row in fixture.rows]
    if any(a is None for a in audiences):
        raise InputError(f"fixture {fixture.season!r} has no audience column")
    return AggregateAudience(tuple(row.club for row in fixture.rows), tuple(audiences))


@dataclass(frozen=True)
class ColumnCheck:
    column: str
    tolerance: float
    max_abs_delta: float
    worst_club: str
    within: bool


@dataclass(frozen=True)
class TableReport:
    table: int
    season: str
    endowment: float
    rows: tuple[dict, ...]
    checks: tuple[ColumnCheck, ...]
    within_tolerance: bool
    notes: tuple[str, ...] = ()


def _column_check(column: str, tolerance: float, deltas: list[float], clubs: list[str]) -> ColumnCheck:
    worst = int(np.argmax(np.abs(deltas)))
    max_delta = abs(deltas[worst])
    return ColumnCheck(column, tolerance, float(max_delta), clubs[worst], bool(max_delta <= tolerance))


def reproduce_table1(
    fixture: SeasonFixture,
    money_tol: float = MONEY_TOL,
    pct_tol: float = PCT_TOL,
) -> TableReport:
    """Recompute the 2016/17-style table from its audience column.

    The two benchmark rules run on the per-club totals, are scaled to
    the published payout total, and every money and percentage cell is
    compared against print.
    """
    if fixture.table != 1:
        raise InputError(f"fixture {fixture.season!r} is not an audience table")
    agg = fixture_aggregates(fixture)
    endowment = fixture.endowment
    es_money = monetize(equal_split_from_totals(agg), endowment).values
    cd_money = monetize(concede_and_divide_from_totals(agg), endowment).values
    clubs = [row.club for row in fixture.rows]
    rows = []
    deltas: dict[str, list[float]] = {key: [] for key in ("es", "cd", "pct_actual", "pct_es", "pct_cd")}
    for i, row in enumerate(fixture.rows):
        computed = {
            "es": float(es_money[i]),
            "cd": float(cd_money[i]),
            "pct_actual": 100.0 * row.actual / endowment,
            "pct_es": 100.0 * es_money[i] / endowment,
            "pct_cd": 100.0 * cd_money[i] / endowment,
        }
        published = {
            "es": row.es,
            "cd": row.cd,
            "pct_actual": row.pct_actual,
            "pct_es": row.pct_es,
            "pct_cd": row.pct_cd,
        }
        entry = {"club": row.club, "audience": row.audience, "actual": row.actual}
        for key in deltas:
            delta = computed[key] - published[key]
            deltas[key].append(delta)
            entry[f"{key}_published"] = published[key]
            entry[f"{key}_computed"] = round(computed[key], 6)
            entry[f"{key}_delta"] = round(delta, 6)
        rows.append(entry)
    checks = tuple(
        _column_check(column, money_tol if column in ("es", "cd") else pct_tol, deltas[column], clubs)
        for column in deltas
    )
    return TableReport(
        table=1,
        season=fixture.season,
        endowment=endowment,
        rows=tuple(rows),
        checks=checks,
        within_tolerance=all(check.within for check in checks),
        notes=fixture.notes,
    )


def _format_verdict(fit) -> str:
    if fit.kind is FitKind.WITHIN:
        return f"{fit.value:.2f}"
    return {FitKind.BELOW: "Below", FitKind.ABOVE: "Above", FitKind.ANY: "Any"}[fit.kind]


def _verdicts_match(published: str, fit, tol: float = LAMBDA_TOL) -> bool:
    label = published.strip().lower()
    if label == "below":
        return fit.kind is FitKind.BELOW
    if label == "above":
        return fit.kind is FitKind.ABOVE
    if label == "any":
        return fit.kind is FitKind.ANY
    try:
        target = float(published)
    except ValueError:
        raise CsvFormatError(f"unreadable published weight {published!r}") from None
    if fit.kind is not FitKind.WITHIN:
        return False
    return abs(round(fit.value, 2) - target) <= tol + 1e-12


def reproduce_table2(
    fixture: SeasonFixture,
    cd_tol: float = CD_RECOMPUTE_TOL,
    lambda_tol: float = LAMBDA_TOL,
) -> TableReport:
    """Check a 2017/18-style table for internal consistency.

    Each payout is rationalised as a mix of the two published benchmark
    columns and the resulting weight (or Below/Above verdict) compared
    with print. The concede-and-divide column is also re-derived from
    the equal-split column alone: when both columns monetise the same
    endowment the audience scale cancels, leaving
    ``cd_i = (2 (n - 1) es_i - T) / (n - 2)`` with ``T`` the equal-split
    column total.
    """
    if fixture.table != 2:
        raise InputError(f"fixture {fixture.season!r} is not a payout table")
    n = fixture.n
    clubs = [row.club for row in fixture.rows]
    es_total = float(sum(row.es for row in fixture.rows))
    rows = []
    cd_deltas = []
    mismatches = []
    for row in fixture.rows:
        cd_recomputed = (2.0 * (n - 1) * row.es - es_total) / (n - 2)
        cd_delta = cd_recomputed - row.cd
        cd_deltas.append(cd_delta)
        fit = rationalize_lambda(row.es, row.cd, row.actual)
        match = _verdicts_match(row.verdict, fit, lambda_tol)
        if not match:
            mismatches.append(row.club)
        rows.append(
            {
                "club": row.club,
                "actual": row.actual,
                "es": row.es,
                "cd_published": row.cd,
                "cd_recomputed": round(cd_recomputed, 6),
                "cd_delta": round(cd_delta, 6),
                "verdict_published": row.verdict,
                "verdict_computed": _format_verdict(fit),
                "verdict_match": match,
            }
        )
    checks = (_column_check("cd_recomputed", cd_tol, cd_deltas, clubs),)
    notes = fixture.notes
    if mismatches:
        notes = notes + (f"published weight disagrees for: {', '.join(mismatches)}",)
    return TableReport(
        table=2,
        season=fixture.season,
        endowment=fixture.endowment,
        rows=tuple(rows),
        checks=checks,
        within_tolerance=bool(checks[0].within and not mismatches),
        notes=notes,
    )


def reproduce_table(table: int, fixture: SeasonFixture | None = None) -> TableReport:
    """Reproduce a bundled table, or a caller-supplied fixture of that shape."""
    fixture = fixture if fixture is not None else bundled_fixture(table)
    if table == 1:
        return reproduce_table1(fixture)
    if table == 2:
        return reproduce_table2(fixture)
    raise InputError(f"unknown table {table}; valid: 1, 2")
