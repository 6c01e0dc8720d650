"""Allocation rules for a season's pooled broadcasting revenue.

Every rule divides the league-wide audience among the clubs; the result
is expressed in audience units and can be scaled to money afterwards
with :func:`monetize`. With ``alpha_i`` the total audience of club ``i``
(home and away) and ``T`` the league total:

* uniform: ``T / n`` each, performance ignored.
* equal split: ``alpha_i / 2``; each game's audience is halved between
  its two clubs.
* concede and divide: ``((n - 1) * alpha_i - T) / (n - 2)``; each club
  keeps the audience only it can explain and the rest is shared. Can go
  negative for weakly followed clubs.
* compromise(lam): ``(1 - lam) * uniform + lam * concede-and-divide``.
  ``lam`` may be any real; 0 and 1 recover the endpoints and
  ``(n - 2) / (2 (n - 1))`` recovers equal split exactly.
* split(lam): club ``i`` keeps ``(1 - lam)`` of its home audiences and
  ``lam`` of its away audiences. ``0.5`` recovers equal split.
* es_cd_convex(lam): ``lam * equal-split + (1 - lam) * concede-and-divide``
  with ``lam`` restricted to [0, 1]; the mix used when asking which
  blend of the two benchmark rules explains an observed payout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateRationalizationError,
    InputError,
    LambdaOutOfRangeError,
    MatrixRequiredError,
    ZeroTotalAudienceError,
)
from .model import (
    AUDIENCE,
    MONEY,
    AggregateAudience,
    Allocation,
    AudienceMatrix,
    aggregates,
)


def equal_split_weight(n: int) -> float:
    """Compromise weight at which the family passes through equal split."""
    return (n - 2) / (2.0 * (n - 1))


def _audience_allocation(agg: AggregateAudience, values: np.ndarray) -> Allocation:
    return Allocation(agg.labels, tuple(float(v) for v in values), agg.total, AUDIENCE)


def uniform_from_totals(agg: AggregateAudience) -> Allocation:
    n = agg.n
    return _audience_allocation(agg, np.full(n, agg.total / n))


def equal_split_from_totals(agg: AggregateAudience) -> Allocation:
    return _audience_allocation(agg, agg.as_array() / 2.0)


def concede_and_divide_from_totals(agg: AggregateAudience) -> Allocation:
    n = agg.n
    values = ((n - 1) * agg.as_array() - agg.total) / (n - 2)
    return _audience_allocation(agg, values)


def compromise_from_totals(agg: AggregateAudience, lam: float) -> Allocation:
    lam = float(lam)
    base = uniform_from_totals(agg).as_array()
    tough = concede_and_divide_from_totals(agg).as_array()
    return _audience_allocation(agg, (1.0 - lam) * base + lam * tough)


def es_cd_convex_from_totals(agg: AggregateAudience, lam: float) -> Allocation:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise LambdaOutOfRangeError(f"mixing weight must be in [0, 1], got {lam}")
    soft = equal_split_from_totals(agg).as_array()
    tough = concede_and_divide_from_totals(agg).as_array()
    return _audience_allocation(agg, lam * soft + (1.0 - lam) * tough)


def uniform(matrix: AudienceMatrix) -> Allocation:
    """Equal share of the league audience for every club."""
    return uniform_from_totals(aggregates(matrix))


def equal_split(matrix: AudienceMatrix) -> Allocation:
    """Half of each game's audience to each of the two clubs involved."""
    return equal_split_from_totals(aggregates(matrix))


def concede_and_divide(matrix: AudienceMatrix) -> Allocation:
    """Credit each club with the viewers no other club can explain."""
    return concede_and_divide_from_totals(aggregates(matrix))


def compromise(matrix: AudienceMatrix, lam: float) -> Allocation:
    """Affine path between uniform (lam 0) and concede-and-divide (lam 1)."""
    return compromise_from_totals(aggregates(matrix), lam)


def split(matrix: AudienceMatrix, lam: float) -> Allocation:
    """Home audiences weighted ``1 - lam``, away audiences weighted ``lam``."""
    lam = float(lam)
    home = matrix.entries.sum(axis=1)
    away = matrix.entries.sum(axis=0)
    values = (1.0 - lam) * home + lam * away
    agg = aggregates(matrix)
    return _audience_allocation(agg, values)


def es_cd_convex(matrix: AudienceMatrix, lam: float) -> Allocation:
    """Convex blend: ``lam`` on equal split, ``1 - lam`` on concede-and-divide."""
    return es_cd_convex_from_totals(aggregates(matrix), lam)


def monetize(allocation: Allocation, endowment: float) -> Allocation:
    """Scale an allocation so it distributes ``endowment`` units of money."""
    endowment = float(endowment)
    if allocation.endowment == 0.0:
        raise ZeroTotalAudienceError("cannot scale an allocation that sums to zero")
    factor = endowment / allocation.endowment
    values = tuple(v * factor for v in allocation.values)
    return Allocation(allocation.labels, values, endowment, MONEY)


class RuleKind(str, enum.Enum):
    UNIFORM = "uniform"
    EQUAL_SPLIT = "equal-split"
    CONCEDE_DIVIDE = "concede-divide"
    COMPROMISE = "compromise"
    SPLIT = "split"
    ESCD = "escd"


_PARAMETRIC = {RuleKind.COMPROMISE, RuleKind.SPLIT, RuleKind.ESCD}


@dataclass(frozen=True)
class RuleSpec:
    """A rule choice as it appears on the command line or in a request.

    Parametric kinds (compromise, split, escd) require ``lam``; the
    others reject it. escd additionally bounds ``lam`` to [0, 1].
    """

    kind: RuleKind
    lam: float | None = None

    def __post_init__(self) -> None:
        kind = RuleKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in _PARAMETRIC:
            if self.lam is None:
                raise InputError(f"rule {kind.value!r} needs a lambda parameter")
            lam = float(self.lam)
            if kind is RuleKind.ESCD and not 0.0 <= lam <= 1.0:
                raise LambdaOutOfRangeError(f"escd lambda must be in [0, 1], got {lam}")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise InputError(f"rule {kind.value!r} takes no lambda parameter")

    @classmethod
    def parse(cls, token: str) -> "RuleSpec":
        """Parse ``kind`` or ``kind:lambda`` tokens, e.g. ``compromise:0.25``."""
        token = token.strip()
        lam: float | None = None
        if ":" in token:
            head, _, tail = token.partition(":")
            token = head.strip()
            try:
                lam = float(tail)
            except ValueError:
                raise InputError(f"bad lambda in rule token {tail!r}") from None
        try:
            kind = RuleKind(token)
        except ValueError:
            valid = ", ".join(k.value for k in RuleKind)
            raise InputError(f"unknown rule {token!r} (valid: {valid})") from None
        return cls(kind, lam)

    def describe(self) -> str:
        if self.lam is None:
            return self.kind.value
        return f"{self.kind.value}:{self.lam:g}"


def apply_rule(rule: RuleSpec, matrix: AudienceMatrix) -> Allocation:
    """Evaluate any rule on a full audience matrix."""
    if rule.kind is RuleKind.SPLIT:
        return split(matrix, rule.lam)
    return apply_rule_to_totals(rule, aggregates(matrix))


def apply_rule_to_totals(rule: RuleSpec, agg: AggregateAudience) -> Allocation:
    """Evaluate a rule that only needs per-club totals.

    The split family distinguishes home from away viewers, which totals
    cannot express, so it is rejected here.
    """
    if rule.kind is RuleKind.UNIFORM:
        return uniform_from_totals(agg)
    if rule.kind is RuleKind.EQUAL_SPLIT:
        return equal_split_from_totals(agg)
    if rule.kind is RuleKind.CONCEDE_DIVIDE:
        return concede_and_divide_from_totals(agg)
    if rule.kind is RuleKind.COMPROMISE:
        return compromise_from_totals(agg, rule.lam)
    if rule.kind is RuleKind.ESCD:
        return es_cd_convex_from_totals(agg, rule.lam)
    raise MatrixRequiredError("the split rule needs the full matrix, not per-club totals")


class FitKind(str, enum.Enum):
    WITHIN = "within"
    BELOW = "below"
    ABOVE = "above"
    ANY = "any"


@dataclass(frozen=True)
class LambdaFit:
    """Outcome of asking which equal-split share explains a payout.

    ``kind`` is ``within`` when some weight in [0, 1] works (then
    ``value`` holds it), ``below``/``above`` when the payout falls
    outside the band spanned by the two benchmark rules, and ``any``
    when the benchmarks coincide with the payout so every weight works.
    """

    kind: FitKind
    value: float | None = None


def rationalize_lambda(es: float, cd: float, actual: float) -> LambdaFit:
    """Solve ``actual == lam * es + (1 - lam) * cd`` for ``lam`` in [0, 1].

    Raises :class:`DegenerateRationalizationError` when the two
    benchmarks coincide but the payout differs, since no weight can
    reproduce it.
    """
    es, cd, actual = float(es), float(cd), float(actual)
    scale = max(1.0, abs(es), abs(cd))
    if abs(es - cd) <= 1e-12 * scale:
        if abs(actual - es) <= 1e-9 * max(1.0, abs(es)):
            return LambdaFit(FitKind.ANY)
        raise DegenerateRationalizationError(
            f"benchmarks coincide at {es!r} but the payout is {actual!r}"
        )
    lam = (actual - cd) / (es - cd)
    if 0.0 <= lam <= 1.0:
        return LambdaFit(FitKind.WITHIN, lam)
    if actual < min(es, cd):
        return LambdaFit(FitKind.BELOW)
    return LambdaFit(FitKind.ABOVE)
