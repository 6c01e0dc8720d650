"""Core data types: audience matrices, per-club totals, allocations.

An audience matrix records, for a double round-robin season, how many
viewers watched each ordered pairing: ``entries[i, j]`` is the audience
of the game hosted by club ``i`` against club ``j``. Everything else in
the package consumes either this matrix or the per-club totals derived
from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InputError,
    NegativeEntryError,
    NonSquareError,
    NonZeroDiagonalError,
    TooFewClubsError,
)

# Several rules divide by n - 2, so two-club leagues are rejected outright.
MIN_CLUBS = 3

AUDIENCE = "audience"
MONEY = "money"


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"Club {i + 1}" for i in range(n))


def _read_only(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


def _check_labels(labels: Sequence[str], n: int) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(labels) != n:
        raise InputError(f"expected {n} club labels, got {len(labels)}")
    if any(not x.strip() for x in labels):
        raise InputError("club labels must be non-empty")
    if len(set(labels)) != n:
        raise InputError("club labels must be unique")
    return labels


@dataclass(frozen=True, eq=False)
class AudienceMatrix:
    """Validated square matrix of ordered-game audiences.

    Invariants enforced at construction: square shape, at least
    :data:`MIN_CLUBS` clubs, zero diagonal, no negative entries, and
    unique non-empty labels. The entry array is frozen so instances can
    be shared freely.
    """

    labels: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise NonSquareError(f"audience matrix must be square, got shape {entries.shape}")
        n = entries.shape[0]
        if n < MIN_CLUBS:
            raise TooFewClubsError(f"need at least {MIN_CLUBS} clubs, got {n}")
        if not np.all(np.isfinite(entries)):
            raise InputError("audience entries must be finite numbers")
        diag = np.diagonal(entries)
        if np.any(diag != 0.0):
            bad = int(np.flatnonzero(diag != 0.0)[0])
            raise NonZeroDiagonalError(f"diagonal entry for club index {bad} must be 0")
        if np.any(entries < 0.0):
            i, j = np.argwhere(entries < 0.0)[0]
            raise NegativeEntryError(f"negative audience at ({int(i)}, {int(j)})")
        object.__setattr__(self, "entries", _read_only(entries))
        object.__setattr__(self, "labels", _check_labels(self.labels, n))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown club label {label!r}") from None

    def __add__(self, other: "AudienceMatrix") -> "AudienceMatrix":
        if not isinstance(other, AudienceMatrix):
            return NotImplemented
        if other.n != self.n:
            raise NonSquareError(f"cannot add a {self.n}-club and a {other.n}-club matrix")
        return AudienceMatrix(self.labels, self.entries + other.entries)

    def scaled(self, factor: float) -> "AudienceMatrix":
        """Matrix with every audience multiplied by ``factor`` (>= 0)."""
        return AudienceMatrix(self.labels, self.entries * float(factor))

    def permuted(self, permutation: Sequence[int]) -> "AudienceMatrix":
        """Relabel clubs: club ``i`` moves to position ``permutation[i]``.

        Entry-wise, the result ``B`` satisfies ``B[p[i], p[j]] == A[i, j]``
        and carries the labels along with the clubs.
        """
        perm = _check_permutation(permutation, self.n)
        out = np.empty_like(self.entries)
        out[np.ix_(perm, perm)] = self.entries
        new_labels = [""] * self.n
        for i, target in enumerate(perm):
            new_labels[target] = self.labels[i]
        return AudienceMatrix(tuple(new_labels), out)


def _check_permutation(permutation: Sequence[int], n: int) -> np.ndarray:
    from .errors import InvalidPermutationError

    perm = np.asarray(list(permutation))
    if perm.shape != (n,) or sorted(int(p) for p in perm) != list(range(n)):
        raise InvalidPermutationError(f"not a permutation of 0..{n - 1}: {list(permutation)!r}")
    return perm.astype(int)


def validate_matrix(rows: Sequence[Sequence[float]], labels: Sequence[str] | None = None) -> AudienceMatrix:
    """Build an :class:`AudienceMatrix` from nested sequences.

    ``labels`` defaults to ``Club 1``..``Club n``.
    """
    entries = np.asarray(rows, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise NonSquareError(f"audience matrix must be square, got shape {entries.shape}")
    if labels is None:
        labels = default_labels(entries.shape[0])
    return AudienceMatrix(tuple(labels), entries)


@dataclass(frozen=True)
class AggregateAudience:
    """Per-club season totals and the league-wide audience.

    ``per_club[i]`` counts every viewer of every game club ``i`` played,
    home or away. The league total is half the per-club sum because each
    game is counted once by each of its two clubs; defining it that way
    makes ``sum(per_club) == 2 * total`` hold exactly in floating point.
    """

    labels: tuple[str, ...]
    per_club: tuple[float, ...]

    def __post_init__(self) -> None:
        per_club = tuple(float(v) for v in self.per_club)
        n = len(per_club)
        if n < MIN_CLUBS:
            raise TooFewClubsError(f"need at least {MIN_CLUBS} clubs, got {n}")
        if any(not np.isfinite(v) for v in per_club):
            raise InputError("per-club totals must be finite")
        if any(v < 0.0 for v in per_club):
            raise NegativeEntryError("per-club totals must be nonnegative")
        object.__setattr__(self, "per_club", per_club)
        object.__setattr__(self, "labels", _check_labels(self.labels, n))

    @property
    def n(self) -> int:
        return len(self.per_club)

    @property
    def total(self) -> float:
        """League-wide audience; exactly half of ``sum(per_club)``."""
        return float(np.sum(np.asarray(self.per_club))) / 2.0

    def as_array(self) -> np.ndarray:
        return np.asarray(self.per_club, dtype=float)


def aggregates(matrix: AudienceMatrix) -> AggregateAudience:
    """Per-club totals of ``matrix``: row sum plus column sum for each club."""
    per_club = matrix.entries.sum(axis=1) + matrix.entries.sum(axis=0)
    return AggregateAudience(matrix.labels, tuple(float(v) for v in per_club))


@dataclass(frozen=True)
class Allocation:
    """A division of some total among the clubs.

    ``unit`` distinguishes raw audience units from money after scaling to
    an endowment. Values may be negative (concede-and-divide can punish a
    club); the only hard invariant is that they sum to the endowment.
    """

    labels: tuple[str, ...]
    values: tuple[float, ...]
    endowment: float
    unit: str = AUDIENCE

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", _check_labels(self.labels, len(values)))
        object.__setattr__(self, "endowment", float(self.endowment))
        if self.unit not in (AUDIENCE, MONEY):
            raise InputError(f"unknown allocation unit {self.unit!r}")
        total = float(np.sum(np.asarray(values)))
        tol = 1e-9 * max(1.0, abs(self.endowment))
        if abs(total - self.endowment) > tol:
            raise InputError(
                f"allocation values sum to {total!r}, not the endowment {self.endowment!r}"
            )

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def allocation_from_values(
    labels: Iterable[str],
    values: Iterable[float],
    unit: str = AUDIENCE,
) -> Allocation:
    """Allocation whose endowment is simply the sum of ``values``."""
    values = tuple(float(v) for v in values)
    return Allocation(tuple(labels), values, float(np.sum(np.asarray(values))), unit)
