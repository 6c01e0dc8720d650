"""Sharing money for a season that stopped before every game was played."""

import numpy as np
import pytest

from leaguealloc import (
    ExtensionOperator,
    InputError,
    NegativeEntryError,
    PartialAudienceMatrix,
    RuleSpec,
    extend_leg,
    extend_zero,
    extended_allocate,
)

LABELS = ("A", "B", "C", "D")


def half_played() -> PartialAudienceMatrix:
    # first legs all played; two return games never happened
    entries = np.array(
        [
            [0.0, 0.0, 10.0, 10.0],
            [10.0, 0.0, 1.0, 1.0],
            [10.0, 1.0, 0.0, 0.0],
            [10.0, 1.0, 1.0, 0.0],
        ]
    )
    missing = np.zeros((4, 4), dtype=bool)
    missing[0, 1] = True
    missing[2, 3] = True
    return PartialAudienceMatrix(LABELS, entries, missing)


def one_round_only() -> PartialAudienceMatrix:
    # only the games hosted by or visiting club A took place
    entries = np.array(
        [
            [0.0, 8.0, 10.0, 9.0],
            [10.0, 0.0, 0.0, 0.0],
            [12.0, 0.0, 0.0, 0.0],
            [11.0, 0.0, 0.0, 0.0],
        ]
    )
    missing = np.zeros((4, 4), dtype=bool)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            missing[i, j] = i != j
    return PartialAudienceMatrix(LABELS, entries, missing)


def test_partial_matrix_invariants():
    partial = half_played()
    assert partial.n == 4
    assert partial.missing_count == 2
    # missing slots are stored as zero no matter what was passed in
    entries = np.array(partial.entries)
    entries[0, 1] = 5.0
    again = PartialAudienceMatrix(LABELS, entries, partial.missing)
    assert again.entries[0, 1] == 0.0


def test_partial_matrix_validation():
    entries = np.zeros((4, 4))
    missing = np.zeros((4, 4), dtype=bool)
    missing[1, 1] = True
    with pytest.raises(InputError):
        PartialAudienceMatrix(LABELS, entries, missing)  # diagonal never missing
    bad = np.zeros((4, 4))
    bad[0, 1] = -1.0
    with pytest.raises(NegativeEntryError):
        PartialAudienceMatrix(LABELS, bad, np.zeros((4, 4), dtype=bool))


def test_extend_zero_keeps_what_happened():
    extended = extend_zero(half_played())
    assert extended.entries[0, 1] == 0.0
    assert extended.entries[2, 3] == 0.0
    assert extended.entries[1, 0] == 10.0


def test_extend_leg_mirrors_the_reverse_fixture():
    extended = extend_leg(half_played())
    assert extended.entries[0, 1] == 10.0  # copied from the played return game
    assert extended.entries[2, 3] == 1.0
    # when both directions are missing there is nothing to mirror
    both_gone = extend_leg(one_round_only())
    assert both_gone.entries[1, 2] == 0.0
    assert np.array_equal(both_gone.entries, extend_zero(one_round_only()).entries)


ES = RuleSpec.parse("equal-split")
CD = RuleSpec.parse("concede-divide")


def test_half_played_season_payouts():
    money_zero = extended_allocate(half_played(), 100.0, ExtensionOperator.ZERO, ES)
    assert money_zero.unit == "money"
    assert money_zero.values == pytest.approx(
        (45.4545454545, 12.7272727273, 20.9090909091, 20.9090909091), abs=1e-6
    )
    money_leg = extended_allocate(half_played(), 100.0, ExtensionOperator.LEG, ES)
    assert money_leg.values == pytest.approx(
        (45.4545454545, 18.1818181818, 18.1818181818, 18.1818181818), abs=1e-6
    )


def test_one_round_season_payouts():
    money = extended_allocate(one_round_only(), 100.0, ExtensionOperator.ZERO, ES)
    assert money.values == pytest.approx((50.0, 15.0, 18.3333333333, 16.6666666667), abs=1e-6)
    # concede-and-divide happily sends a club below zero here
    harsh = extended_allocate(one_round_only(), 100.0, ExtensionOperator.ZERO, CD)
    assert harsh.values == pytest.approx((100.0, -5.0, 5.0, 0.0), abs=1e-9)
    assert sum(harsh.values) == pytest.approx(100.0)


def test_nobody_watched_anything_splits_equally():
    entries = np.zeros((4, 4))
    missing = ~np.eye(4, dtype=bool)
    partial = PartialAudienceMatrix(LABELS, entries, missing)
    money = extended_allocate(partial, 100.0, ExtensionOperator.LEG, ES)
    assert money.values == pytest.approx((25.0, 25.0, 25.0, 25.0))
    assert money.unit == "money"


def test_operator_accepts_plain_strings():
    money = extended_allocate(half_played(), 100.0, "leg", ES)
    assert money.values[1] == pytest.approx(18.1818181818, abs=1e-6)
