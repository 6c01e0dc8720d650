"""Recomputing the bundled season tables from their own audience figures."""

import pytest

from leaguealloc import (
    CsvFormatError,
    InputError,
    bundled_data_path,
    bundled_fixture,
    fixture_aggregates,
    parse_season_fixture,
    reproduce_table,
    reproduce_table1,
    reproduce_table2,
)


def test_bundled_fixtures_load():
    benchmark = bundled_fixture(1)
    assert benchmark.n == 20
    assert benchmark.season == "La Liga 2016/17"
    assert benchmark.endowment == pytest.approx(1246.90, abs=1e-9)
    payouts = bundled_fixture(2)
    assert payouts.n == 20
    assert payouts.season == "La Liga 2017/18"
    assert payouts.endowment == pytest.approx(1325.60, abs=1e-9)


def test_fixture_aggregates_totals():
    agg = fixture_aggregates(bundled_fixture(1))
    assert agg.n == 20
    # audience column carries per-club viewer counts; a broadcast is watched
    # once per side, so the league-wide count is half the column sum
    assert sum(agg.per_club) == pytest.approx(356.98, abs=1e-6)
    assert agg.total == pytest.approx(356.98 / 2, abs=1e-6)


def test_benchmark_table_reproduces():
    report = reproduce_table1(bundled_fixture(1))
    assert report.within_tolerance
    assert report.endowment == pytest.approx(1246.90)
    assert len(report.rows) == 20
    by_column = {c.column: c for c in report.checks}
    assert set(by_column) == {"es", "cd", "pct_actual", "pct_es", "pct_cd"}
    assert by_column["es"].max_abs_delta < 0.2
    assert by_column["cd"].max_abs_delta < 0.2
    for column in ("pct_actual", "pct_es", "pct_cd"):
        assert by_column[column].max_abs_delta < 0.01
    # the published duplicate row pair is flagged, not silently kept
    assert any("identical benchmark cells" in note for note in report.notes)


def test_payout_table_reproduces():
    report = reproduce_table2(bundled_fixture(2))
    assert report.within_tolerance
    assert len(report.rows) == 20
    assert {c.column for c in report.checks} == {"cd_recomputed"}
    assert report.checks[0].max_abs_delta <= 0.1
    verdicts = [row["verdict_computed"] for row in report.rows]
    assert len(verdicts) == 20
    # a payout is either explained by a mixing weight in [0, 1] or sits
    # outside the bracket entirely
    for v in verdicts:
        if v in {"Below", "Above"}:
            continue
        assert 0.0 <= float(v) <= 1.0
    # season has examples of both outcomes
    assert any(v in {"Below", "Above"} for v in verdicts)
    assert any(v not in {"Below", "Above"} for v in verdicts)
    assert all(row["verdict_match"] for row in report.rows)


def test_reproduce_dispatch_and_validation():
    assert reproduce_table(1).table == 1
    assert reproduce_table(2).table == 2
    with pytest.raises(InputError):
        reproduce_table(3)
    with pytest.raises(InputError):
        reproduce_table(2, bundled_fixture(1))


def test_tampered_benchmark_is_caught():
    text = bundled_data_path("laliga_2016_17_table1.csv").read_text(encoding="utf-8")
    # nudge one published money cell past the 0.2 tolerance
    tampered = text.replace("Barcelona,40.040,146.20,139.85", "Barcelona,40.040,146.20,140.15")
    assert tampered != text
    fixture = parse_season_fixture(tampered, "tampered")
    report = reproduce_table1(fixture)
    assert not report.within_tolerance
    failed = {c.column: c for c in report.checks}["es"]
    assert not failed.within
    assert failed.worst_club == "Barcelona"


def test_wrecked_fixture_fails_the_sum_sanity_check():
    text = bundled_data_path("laliga_2016_17_table1.csv").read_text(encoding="utf-8")
    tampered = text.replace("Barcelona,40.040,146.20,139.85", "Barcelona,40.040,146.20,141.85")
    with pytest.raises(CsvFormatError):
        parse_season_fixture(tampered, "wrecked")


def test_fixture_header_must_match_a_known_table():
    with pytest.raises(CsvFormatError):
        parse_season_fixture("club,foo,bar\nA,1,2\n", "mystery")
