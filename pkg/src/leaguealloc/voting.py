"""Choosing a rule by vote, and comparing rules by inequality.

Clubs are assumed to rank rules purely by what the rules pay them. Along
the compromise family the payoff of club ``i`` is affine in the weight
with slope proportional to ``alpha_i`` minus the league mean, so every
club either always wants the weight as small as possible, always as
large as possible, or does not care. That makes majority voting on a
weight interval a matter of counting clubs on each side of the mean.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InputError, InvalidRangeError, UnequalSumsError
from .model import AggregateAudience, Allocation, AudienceMatrix, aggregates
from .rules import RuleSpec, apply_rule, compromise_from_totals

# Clubs whose season total sits within this relative band of the league
# mean are treated as indifferent between compromise weights.
MEAN_TIE_RTOL = 1e-12


class OutcomeKind(str, enum.Enum):
    UNIQUE_WINNER = "unique-winner"
    ALL_WINNERS = "all-winners"
    CYCLE = "cycle"


@dataclass(frozen=True)
class VotingOutcome:
    """Result of a vote.

    ``winners`` holds compromise weights for interval votes and
    :class:`RuleSpec` entries for tournaments; for an ``all-winners``
    interval vote it holds the two endpoints of the winning range.
    ``pivotal`` counts clubs (below, at, above) the league-mean total in
    interval votes; ``pairwise_wins[r][s]`` counts clubs strictly better
    off under rule ``r`` than under rule ``s`` in tournaments. A cycle
    comes with a witness chain in which each rule beats the next and the
    last beats the first.
    """

    kind: OutcomeKind
    winners: tuple
    pivotal: tuple[int, int, int] | None = None
    pairwise_wins: tuple[tuple[int, ...], ...] | None = None
    cycle: tuple[int, ...] | None = None


def majority_winner_from_totals(
    agg: AggregateAudience, low: float, high: float
) -> VotingOutcome:
    """Majority-preferred compromise weight(s) inside ``[low, high]``."""
    low, high = float(low), float(high)
    if low > high:
        raise InvalidRangeError(f"weight range is empty: [{low}, {high}]")
    alpha = agg.as_array()
    n = agg.n
    mean = float(alpha.mean())
    tie = MEAN_TIE_RTOL * max(1.0, abs(mean))
    below = int(np.sum(alpha < mean - tie))
    above = int(np.sum(alpha > mean + tie))
    at = n - below - above
    pivotal = (below, at, above)
    if below * 2 > n:
        return VotingOutcome(OutcomeKind.UNIQUE_WINNER, (low,), pivotal=pivotal)
    if above * 2 > n:
        return VotingOutcome(OutcomeKind.UNIQUE_WINNER, (high,), pivotal=pivotal)
    return VotingOutcome(OutcomeKind.ALL_WINNERS, (low, high), pivotal=pivotal)


def majority_winner_compromise(
    matrix: AudienceMatrix, low: float, high: float
) -> VotingOutcome:
    return majority_winner_from_totals(aggregates(matrix), low, high)


def _strictly_better(mine: np.ndarray, other: np.ndarray) -> int:
    margin = 1e-9 * np.maximum(1.0, np.abs(other))
    return int(np.sum(mine > other + margin))


def condorcet_tournament(
    matrix: AudienceMatrix, rules: Sequence[RuleSpec]
) -> VotingOutcome:
    """Round-robin vote among rules: r beats s iff a strict majority of
    clubs is strictly better off under r. Winners are the unbeaten rules;
    if every rule is beaten the outcome is a cycle with a witness."""
    rules = tuple(rules)
    if not rules:
        raise InputError("a tournament needs at least one rule")
    payoffs = [apply_rule(rule, matrix).as_array() for rule in rules]
    n = matrix.n
    k = len(rules)
    wins = [[0] * k for _ in range(k)]
    for r in range(k):
        for s in range(k):
            if r != s:
                wins[r][s] = _strictly_better(payoffs[r], payoffs[s])
    beats = [[wins[r][s] * 2 > n for s in range(k)] for r in range(k)]
    unbeaten = [s for s in range(k) if not any(beats[r][s] for r in range(k))]
    pairwise = tuple(tuple(row) for row in wins)
    if len(unbeaten) == 1:
        return VotingOutcome(
            OutcomeKind.UNIQUE_WINNER, (rules[unbeaten[0]],), pairwise_wins=pairwise
        )
    if unbeaten:
        return VotingOutcome(
            OutcomeKind.ALL_WINNERS,
            tuple(rules[s] for s in unbeaten),
            pairwise_wins=pairwise,
        )
    # Every rule loses to someone: walking "lowest-index beater" links from
    # rule 0 must revisit a rule, closing a cycle.
    beater = [min(r for r in range(k) if beats[r][s]) for s in range(k)]
    seen: dict[int, int] = {}
    walk = [0]
    while walk[-1] not in seen:
        seen[walk[-1]] = len(walk) - 1
        walk.append(beater[walk[-1]])
    loop = walk[seen[walk[-1]]: -1]
    cycle = tuple(reversed(loop))  # reversed so each entry beats the next
    return VotingOutcome(
        OutcomeKind.CYCLE, (), pairwise_wins=pairwise, cycle=cycle
    )


@dataclass(frozen=True)
class SingleCrossing:
    """Sign pattern of payoff changes along the compromise family.

    ``order`` lists club indices sorted by season total (ties by index);
    ``signs`` holds -1/0/+1 per club in that order for the move from the
    lower to the higher weight. The pattern is single-crossing when no
    gainer precedes a loser; ``position`` is the first gainer's rank.
    """

    ok: bool
    position: int | None
    order: tuple[int, ...]
    signs: tuple[int, ...]


def single_crossing_check(
    matrix: AudienceMatrix, low: float, high: float
) -> SingleCrossing:
    """Check that raising the compromise weight from ``low`` to ``high``
    hurts a prefix of the total-audience order and helps a suffix."""
    low, high = float(low), float(high)
    if not low < high:
        raise InvalidRangeError(f"need low < high, got [{low}, {high}]")
    agg = aggregates(matrix)
    alpha = agg.as_array()
    before = compromise_from_totals(agg, low).as_array()
    after = compromise_from_totals(agg, high).as_array()
    diff = after - before
    order = tuple(sorted(range(agg.n), key=lambda i: (alpha[i], i)))
    tol = 1e-12 * max(1.0, float(np.max(np.abs(diff))) if diff.size else 1.0)
    signs = tuple(
        0 if abs(diff[i]) <= tol else (1 if diff[i] > 0 else -1) for i in order
    )
    last_loser = max((p for p, s in enumerate(signs) if s < 0), default=-1)
    first_gainer = next((p for p, s in enumerate(signs) if s > 0), None)
    ok = first_gainer is None or first_gainer > last_loser
    return SingleCrossing(ok, first_gainer, order, signs)


class LorenzVerdict(str, enum.Enum):
    LEFT_DOMINATES = "left-dominates"
    RIGHT_DOMINATES = "right-dominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class LorenzResult:
    """``crossing`` is the first prefix length whose comparison conflicts
    with the direction set earlier (only for incomparable pairs)."""

    verdict: LorenzVerdict
    crossing: int | None = None


def lorenz_compare(
    left: Allocation | Sequence[float], right: Allocation | Sequence[float]
) -> LorenzResult:
    """Compare two equal-sum vectors by ascending prefix sums.

    The left vector dominates when every prefix of its sorted values is
    at least as large, with at least one strictly larger; crossing
    prefixes make the pair incomparable.
    """
    x = left.as_array() if isinstance(left, Allocation) else np.asarray(list(left), dtype=float)
    y = right.as_array() if isinstance(right, Allocation) else np.asarray(list(right), dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"vector lengths differ: {x.shape[0]} vs {y.shape[0]}")
    total = float(x.sum())
    tol = 1e-9 * max(1.0, abs(total))
    if abs(total - float(y.sum())) > tol:
        raise UnequalSumsError(
            f"cannot Lorenz-compare totals {total!r} and {float(y.sum())!r}"
        )
    px = np.cumsum(np.sort(x))[:-1]  # proper prefixes only
    py = np.cumsum(np.sort(y))[:-1]
    gaps = px - py
    higher = gaps > tol
    lower = gaps < -tol
    if not higher.any() and not lower.any():
        return LorenzResult(LorenzVerdict.EQUAL)
    if not lower.any():
        return LorenzResult(LorenzVerdict.LEFT_DOMINATES)
    if not higher.any():
        return LorenzResult(LorenzVerdict.RIGHT_DOMINATES)
    first_high = int(np.argmax(higher))
    first_low = int(np.argmax(lower))
    crossing = max(first_high, first_low) + 1  # 1-based prefix length
    return LorenzResult(LorenzVerdict.INCOMPARABLE, crossing)
