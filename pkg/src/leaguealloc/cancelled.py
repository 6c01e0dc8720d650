"""Sharing revenue for a season that was cut short.

When games were never played the audience matrix has holes. The
approach here: fill the holes with an explicit extension operator,
run any ordinary rule on the completed matrix, and scale the result to
the money actually at stake. Two operators are provided: ``zero``
(unplayed games drew nobody) and ``leg`` (an unplayed game would have
drawn the same audience as the played reverse fixture, if any).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NegativeEntryError, NonSquareError, TooFewClubsError
from .model import MIN_CLUBS, MONEY, Allocation, AudienceMatrix, _check_labels, aggregates
from .rules import RuleSpec, apply_rule, monetize


@dataclass(frozen=True, eq=False)
class PartialAudienceMatrix:
    """Audience matrix with possibly-missing ordered games.

    ``missing[i, j]`` marks a game that never happened; its entry is
    pinned to 0 and ignored. Diagonal cells are never missing.
    """

    labels: tuple[str, ...]
    entries: np.ndarray
    missing: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        missing = np.asarray(self.missing, dtype=bool)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise NonSquareError(f"matrix must be square, got shape {entries.shape}")
        n = entries.shape[0]
        if n < MIN_CLUBS:
            raise TooFewClubsError(f"need at least {MIN_CLUBS} clubs, got {n}")
        if missing.shape != entries.shape:
            raise InputError("missing-game mask must match the matrix shape")
        if np.any(np.diagonal(missing)):
            raise InputError("diagonal cells cannot be missing; they are fixed at 0")
        if np.any(np.diagonal(entries) != 0.0):
            raise InputError("diagonal entries must be 0")
        present = ~missing
        if not np.all(np.isfinite(entries[present])):
            raise InputError("played-game audiences must be finite")
        if np.any(entries[present] < 0.0):
            raise NegativeEntryError("played-game audiences must be nonnegative")
        cleaned = np.where(missing, 0.0, entries)
        cleaned.setflags(write=False)
        frozen_missing = np.array(missing)
        frozen_missing.setflags(write=False)
        object.__setattr__(self, "entries", cleaned)
        object.__setattr__(self, "missing", frozen_missing)
        object.__setattr__(self, "labels", _check_labels(self.labels, n))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def missing_count(self) -> int:
        return int(self.missing.sum())


class ExtensionOperator(str, enum.Enum):
    ZERO = "zero"
    LEG = "leg"


def extend_zero(partial: PartialAudienceMatrix) -> AudienceMatrix:
    """Treat every unplayed game as having drawn no viewers."""
    return AudienceMatrix(partial.labels, np.array(partial.entries))


def extend_leg(partial: PartialAudienceMatrix) -> AudienceMatrix:
    """Copy the reverse fixture's audience into each unplayed game.

    Falls back to 0 when both legs of a pairing are missing.
    """
    reverse_known = partial.missing & ~partial.missing.T
    filled = np.where(reverse_known, partial.entries.T, partial.entries)
    return AudienceMatrix(partial.labels, filled)


_OPERATORS = {
    ExtensionOperator.ZERO: extend_zero,
    ExtensionOperator.LEG: extend_leg,
}


def extended_allocate(
    partial: PartialAudienceMatrix,
    endowment: float,
    operator: ExtensionOperator | str,
    rule: RuleSpec,
) -> Allocation:
    """Complete the season with ``operator``, apply ``rule``, pay ``endowment``.

    If the completed season has no audience at all there is nothing to
    apportion by, so the money is divided equally.
    """
    operator = ExtensionOperator(operator)
    endowment = float(endowment)
    extended = _OPERATORS[operator](partial)
    if aggregates(extended).total == 0.0:
        n = extended.n
        return Allocation(extended.labels, (endowment / n,) * n, endowment, MONEY)
    return monetize(apply_rule(rule, extended), endowment)
