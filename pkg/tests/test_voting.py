import numpy as np
import pytest

from leaguealloc import (
    AggregateAudience,
    DimensionMismatchError,
    InputError,
    InvalidRangeError,
    LorenzVerdict,
    OutcomeKind,
    RuleSpec,
    UnequalSumsError,
    apply_rule,
    compromise,
    condorcet_tournament,
    equal_split,
    lorenz_compare,
    majority_winner_compromise,
    majority_winner_from_totals,
    single_crossing_check,
    uniform,
    validate_matrix,
)
from conftest import random_matrix


def test_small_clubs_vote_down_the_weight(worked):
    outcome = majority_winner_compromise(worked, 0.0, 1.0)
    assert outcome.kind is OutcomeKind.UNIQUE_WINNER
    assert outcome.winners == (0.0,)
    assert outcome.pivotal == (2, 0, 1)  # below / at / above the mean total


def test_big_clubs_vote_up_the_weight():
    agg = AggregateAudience(("A", "B", "C", "D"), (0.0, 10.0, 10.0, 10.0))
    outcome = majority_winner_from_totals(agg, 0.2, 0.9)
    assert outcome.kind is OutcomeKind.UNIQUE_WINNER
    assert outcome.winners == (0.9,)
    assert outcome.pivotal == (1, 0, 3)


def test_even_league_is_indifferent():
    matrix = validate_matrix(np.ones((4, 4)) - np.eye(4))
    outcome = majority_winner_compromise(matrix, 0.0, 1.0)
    assert outcome.kind is OutcomeKind.ALL_WINNERS
    assert outcome.winners == (0.0, 1.0)
    assert outcome.pivotal == (0, 4, 0)


def test_vote_range_must_be_ordered(worked):
    with pytest.raises(InvalidRangeError):
        majority_winner_compromise(worked, 1.0, 0.0)
    # a single-point range is fine
    outcome = majority_winner_compromise(worked, 0.5, 0.5)
    assert outcome.winners == (0.5,)


def test_tournament_unique_winner(worked):
    rules = [RuleSpec.parse(t) for t in ("uniform", "equal-split", "concede-divide")]
    outcome = condorcet_tournament(worked, rules)
    assert outcome.kind is OutcomeKind.UNIQUE_WINNER
    assert outcome.winners == (rules[0],)
    assert outcome.pairwise_wins == ((0, 2, 2), (1, 0, 2), (1, 1, 0))


def test_tournament_single_rule_wins_by_default(worked):
    only = RuleSpec.parse("equal-split")
    outcome = condorcet_tournament(worked, [only])
    assert outcome.kind is OutcomeKind.UNIQUE_WINNER
    assert outcome.winners == (only,)
    with pytest.raises(InputError):
        condorcet_tournament(worked, [])


def test_tournament_ties_return_every_unbeaten_rule(worked):
    # a rule against itself in two flavours: nobody strictly gains
    twins = [RuleSpec.parse("equal-split"), RuleSpec.parse("split:0.5")]
    outcome = condorcet_tournament(worked, twins)
    assert outcome.kind is OutcomeKind.ALL_WINNERS
    assert set(outcome.winners) == set(twins)


def test_tournament_cycle_has_a_witness():
    # home-heavy, away-heavy and flat payouts chase each other in a circle
    matrix = validate_matrix([[0, 1, 2], [0, 0, 9], [16, 2, 0]])
    rules = [RuleSpec.parse(t) for t in ("split:0", "split:1", "uniform")]
    outcome = condorcet_tournament(matrix, rules)
    assert outcome.kind is OutcomeKind.CYCLE
    assert outcome.winners == ()
    chain = outcome.cycle
    assert chain is not None and len(chain) == 3
    payoffs = [apply_rule(rule, matrix).as_array() for rule in rules]
    n = matrix.n
    for here, there in zip(chain, chain[1:] + chain[:1]):
        beats = int(np.sum(payoffs[here] > payoffs[there] + 1e-9))
        assert beats * 2 > n  # each link really is a majority win


def test_single_crossing_worked(worked):
    result = single_crossing_check(worked, 0.0, 1.0)
    assert result.ok
    assert result.order == (2, 1, 0)
    assert result.signs == (-1, -1, 1)
    assert result.position == 2


def test_single_crossing_requires_a_real_move(worked):
    with pytest.raises(InvalidRangeError):
        single_crossing_check(worked, 0.5, 0.5)


def test_single_crossing_everywhere():
    rng = np.random.default_rng(23)
    for _ in range(30):
        matrix = random_matrix(rng, int(rng.integers(3, 9)))
        low = float(rng.uniform(0, 0.5))
        high = float(rng.uniform(low + 1e-3, 1.0))
        assert single_crossing_check(matrix, low, high).ok


def test_lorenz_orders_the_standard_rules(worked):
    flat = uniform(worked)
    assert lorenz_compare(flat, equal_split(worked)).verdict is LorenzVerdict.LEFT_DOMINATES
    assert lorenz_compare(equal_split(worked), flat).verdict is LorenzVerdict.RIGHT_DOMINATES
    assert lorenz_compare(flat, flat).verdict is LorenzVerdict.EQUAL


def test_lorenz_incomparable_pair_reports_the_crossing():
    result = lorenz_compare([0.0, 5.0, 5.0, 10.0], [1.0, 2.0, 8.0, 9.0])
    assert result.verdict is LorenzVerdict.INCOMPARABLE
    assert result.crossing == 2


def test_lorenz_input_checks():
    with pytest.raises(DimensionMismatchError):
        lorenz_compare([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(UnequalSumsError):
        lorenz_compare([1.0, 2.0, 3.0], [1.0, 2.0, 4.0])


def test_less_compromise_means_less_spread(worked):
    lower = compromise(worked, 0.2)
    higher = compromise(worked, 0.8)
    assert lorenz_compare(lower, higher).verdict is LorenzVerdict.LEFT_DOMINATES
