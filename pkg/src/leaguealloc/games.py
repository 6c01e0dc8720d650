"""Coalitional view of a season: worth, Shapley value, core membership.

A coalition of clubs is worth the audience of the games played entirely
inside it. Coalitions are encoded as bitmasks over club indices (bit
``i`` set means club ``i`` is in), and enumeration is always in numeric
mask order so witnesses are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BetaOutOfRangeError, InputError, TooManyPlayersError
from .model import AUDIENCE, Allocation, AudienceMatrix, default_labels

# 2^22 doubles is ~34 MB; beyond that the dense table stops being sensible.
MAX_PLAYERS = 22
# 10! permutations is the most the brute-force method should ever chew.
MAX_PERMUTATION_PLAYERS = 10


def characteristic_value(matrix: AudienceMatrix, members: Iterable[int]) -> float:
    """Worth of one coalition, summed directly from the matrix."""
    idx = sorted(set(int(m) for m in members))
    for m in idx:
        if not 0 <= m < matrix.n:
            raise InputError(f"club index {m} out of range")
    if len(idx) < 2:
        return 0.0
    sub = matrix.entries[np.ix_(idx, idx)]
    return float(sub.sum())


@dataclass(frozen=True, eq=False)
class CoalitionalGame:
    """Dense table of coalition worths, indexed by bitmask."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n > MAX_PLAYERS:
            raise TooManyPlayersError(f"at most {MAX_PLAYERS} players, got {n}")
        values = np.asarray(self.values, dtype=float)
        if values.shape != (1 << n,):
            raise InputError(f"need {1 << n} coalition values, got shape {values.shape}")
        if values[0] != 0.0:
            raise InputError("the empty coalition must be worth 0")
        out = np.array(values)
        out.setflags(write=False)
        object.__setattr__(self, "values", out)

    @property
    def n(self) -> int:
        return len(self.labels)

    def value_of(self, mask: int) -> float:
        return float(self.values[mask])

    def worth(self, members: Iterable[int]) -> float:
        mask = 0
        for m in members:
            mask |= 1 << int(m)
        return self.value_of(mask)

    @property
    def grand_value(self) -> float:
        return float(self.values[-1])


def game_from_matrix(matrix: AudienceMatrix) -> CoalitionalGame:
    """Build the full coalition table for an audience matrix.

    Incremental construction: adding club ``i`` to a coalition adds the
    audience of its games against every member, so the table over clubs
    ``0..i`` is the table over ``0..i-1`` stacked with itself plus the
    pairwise-link subset sums. Runs in O(2^n) time and memory.
    """
    n = matrix.n
    if n > MAX_PLAYERS:
        raise TooManyPlayersError(f"at most {MAX_PLAYERS} clubs, got {n}")
    symmetric = matrix.entries + matrix.entries.T
    values = np.zeros(1)
    for i in range(n):
        link = np.zeros(1)
        for j in range(i):
            link = np.concatenate([link, link + symmetric[i, j]])
        values = np.concatenate([values, values + link])
    return CoalitionalGame(matrix.labels, values)


def game_from_function(
    worth: Callable[[tuple[int, ...]], float],
    n: int,
    labels: Sequence[str] | None = None,
) -> CoalitionalGame:
    """Tabulate an arbitrary coalition-worth function (small n only)."""
    if n > MAX_PLAYERS:
        raise TooManyPlayersError(f"at most {MAX_PLAYERS} players, got {n}")
    values = np.zeros(1 << n)
    for mask in range(1 << n):
        members = tuple(i for i in range(n) if mask >> i & 1)
        values[mask] = worth(members)
    return CoalitionalGame(tuple(labels) if labels else default_labels(n), values)


def _allocation(game: CoalitionalGame, values: np.ndarray) -> Allocation:
    return Allocation(game.labels, tuple(float(v) for v in values), game.grand_value, AUDIENCE)


def shapley(game: CoalitionalGame, method: str = "subset") -> Allocation:
    """Average marginal contribution of each player.

    ``subset`` weights each coalition by the usual factorial ratio and
    scales to any tabulated game; ``permutation`` literally averages
    over all n! arrival orders and is kept for cross-checking.
    """
    if method == "subset":
        return _shapley_subset(game)
    if method == "permutation":
        return _shapley_permutation(game)
    raise InputError(f"unknown shapley method {method!r}")


def _shapley_subset(game: CoalitionalGame) -> Allocation:
    n = game.n
    masks = np.arange(1 << n, dtype=np.uint32)
    sizes = np.bitwise_count(masks).astype(np.int64)
    # weight of a coalition S not containing i: |S|! (n-|S|-1)! / n!
    weight_by_size = np.array(
        [1.0 / (n * math.comb(n - 1, s)) for s in range(n)], dtype=float
    )
    out = np.zeros(n)
    for i in range(n):
        bit = np.uint32(1 << i)
        without = masks[(masks & bit) == 0]
        gains = game.values[without | bit] - game.values[without]
        out[i] = float(np.sum(weight_by_size[sizes[without]] * gains))
    return _allocation(game, out)


def _shapley_permutation(game: CoalitionalGame) -> Allocation:
    n = game.n
    if n > MAX_PERMUTATION_PLAYERS:
        raise TooManyPlayersError(
            f"permutation method enumerates n! orders; capped at {MAX_PERMUTATION_PLAYERS} players"
        )
    totals = np.zeros(n)
    values = game.values
    for order in itertools.permutations(range(n)):
        mask = 0
        before = 0.0
        for player in order:
            mask |= 1 << player
            after = values[mask]
            totals[player] += after - before
            before = after
    return _allocation(game, totals / math.factorial(n))


def egalitarian(game: CoalitionalGame) -> Allocation:
    """Grand-coalition worth divided equally."""
    n = game.n
    return _allocation(game, np.full(n, game.grand_value / n))


def egalitarian_shapley(game: CoalitionalGame, beta: float, method: str = "subset") -> Allocation:
    """Convex mix: ``beta`` on Shapley, ``1 - beta`` on the equal division."""
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise BetaOutOfRangeError(f"beta must be in [0, 1], got {beta}")
    merit = shapley(game, method=method).as_array()
    flat = egalitarian(game).as_array()
    return _allocation(game, beta * merit + (1.0 - beta) * flat)


@dataclass(frozen=True)
class CoreCheck:
    """Outcome of a core-membership test.

    On failure, ``coalition`` names the first blocking coalition in
    numeric mask order and ``shortfall`` how much it is owed beyond what
    the allocation grants it; an ``efficiency`` failure means the values
    do not even sum to the grand worth.
    """

    in_core: bool
    reason: str | None = None
    coalition: tuple[int, ...] | None = None
    shortfall: float | None = None


def in_core(
    game: CoalitionalGame,
    allocation: Allocation | Sequence[float],
    tol: float = 1e-9,
) -> CoreCheck:
    """Does any coalition prefer to walk away from this allocation?"""
    values = allocation.as_array() if isinstance(allocation, Allocation) else np.asarray(
        list(allocation), dtype=float
    )
    n = game.n
    if values.shape != (n,):
        raise InputError(f"allocation covers {values.shape[0]} clubs, game has {n}")
    total = float(values.sum())
    if abs(total - game.grand_value) > tol:
        return CoreCheck(False, "efficiency", None, abs(total - game.grand_value))
    coalition_sums = np.zeros(1)
    for i in range(n):
        coalition_sums = np.concatenate([coalition_sums, coalition_sums + values[i]])
    deficits = game.values - coalition_sums
    blocking = deficits > tol
    blocking[-1] = False  # the grand coalition was vetted by the efficiency check
    if not bool(blocking.any()):
        return CoreCheck(True)
    mask = int(np.argmax(blocking))
    members = tuple(i for i in range(n) if mask >> i & 1)
    return CoreCheck(False, "coalition", members, float(deficits[mask]))
