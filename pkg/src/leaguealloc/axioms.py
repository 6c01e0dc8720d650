"""Finite-instance checks of the classic fairness properties.

Each check evaluates one rule on concrete data and reports Holds,
Violated (with a witness precise enough to re-verify by hand), or
NotApplicable when the instance does not meet the property's
precondition. These are falsification tools, not proofs: Holds means
"no counterexample on this input".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError
from .model import AudienceMatrix, aggregates, validate_matrix
from .rules import RuleSpec, apply_rule

# Allocations are compared at this absolute tolerance throughout.
VALUE_TOL = 1e-8
# Entries this relatively close are treated as equal when hunting for
# clubs with identical schedules.
ENTRY_RTOL = 1e-12


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    verdict: Verdict
    witness: dict | None = None
    detail: str = ""


def _entries_close(a: float, b: float) -> bool:
    return abs(a - b) <= ENTRY_RTOL * max(1.0, abs(a), abs(b))


def check_additivity(rule: RuleSpec, first: AudienceMatrix, second: AudienceMatrix) -> AxiomReport:
    """Allocating two seasons jointly must equal allocating them apart."""
    if first.n != second.n:
        raise DimensionMismatchError(f"matrices cover {first.n} and {second.n} clubs")
    joint = apply_rule(rule, first + second).as_array()
    apart = apply_rule(rule, first).as_array() + apply_rule(rule, second).as_array()
    gaps = np.abs(joint - apart)
    worst = int(np.argmax(gaps))
    if gaps[worst] > VALUE_TOL:
        return AxiomReport(
            "additivity",
            Verdict.VIOLATED,
            witness={
                "club": first.labels[worst],
                "joint": float(joint[worst]),
                "sum_of_parts": float(apart[worst]),
            },
        )
    return AxiomReport("additivity", Verdict.HOLDS, detail=f"max gap {float(gaps[worst]):.2e}")


def _twin_pairs(matrix: AudienceMatrix) -> list[tuple[int, int]]:
    """Pairs of clubs with identical audiences against every third club."""
    n = matrix.n
    a = matrix.entries
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            others = [k for k in range(n) if k not in (i, j)]
            if all(
                _entries_close(a[i, k], a[j, k]) and _entries_close(a[k, i], a[k, j])
                for k in others
            ):
                pairs.append((i, j))
    return pairs


def check_equal_treatment(rule: RuleSpec, matrix: AudienceMatrix) -> AxiomReport:
    """Clubs with identical schedules against the rest must be paid alike."""
    pairs = _twin_pairs(matrix)
    payoff = apply_rule(rule, matrix).values
    for i, j in pairs:
        if abs(payoff[i] - payoff[j]) > VALUE_TOL:
            return AxiomReport(
                "equal-treatment",
                Verdict.VIOLATED,
                witness={
                    "pair": [matrix.labels[i], matrix.labels[j]],
                    "amounts": [payoff[i], payoff[j]],
                },
            )
    return AxiomReport(
        "equal-treatment", Verdict.HOLDS, detail=f"{len(pairs)} twin pair(s) checked"
    )


def check_anonymity(
    rule: RuleSpec, matrix: AudienceMatrix, permutation: Sequence[int]
) -> AxiomReport:
    """Relabelling clubs must relabel the payoffs and change nothing else."""
    relabelled = matrix.permuted(permutation)
    base = apply_rule(rule, matrix).values
    moved = apply_rule(rule, relabelled).values
    perm = list(int(p) for p in permutation)
    for i in range(matrix.n):
        if abs(moved[perm[i]] - base[i]) > VALUE_TOL:
            return AxiomReport(
                "anonymity",
                Verdict.VIOLATED,
                witness={
                    "club": matrix.labels[i],
                    "permutation": perm,
                    "original": base[i],
                    "after_relabel": moved[perm[i]],
                },
            )
    return AxiomReport("anonymity", Verdict.HOLDS)


def check_null_team(rule: RuleSpec, matrix: AudienceMatrix) -> AxiomReport:
    """A club nobody watched, home or away, must receive exactly nothing."""
    alpha = aggregates(matrix).per_club
    payoff = apply_rule(rule, matrix).values
    nulls = [i for i, v in enumerate(alpha) if v == 0.0]
    for i in nulls:
        if abs(payoff[i]) > VALUE_TOL:
            return AxiomReport(
                "null-team",
                Verdict.VIOLATED,
                witness={"club": matrix.labels[i], "amount": payoff[i]},
            )
    return AxiomReport(
        "null-team", Verdict.HOLDS, detail=f"{len(nulls)} null club(s) on this input"
    )


def check_essential_team(rule: RuleSpec, matrix: AudienceMatrix, club: int) -> AxiomReport:
    """A club involved in every watched game must collect the whole pool.

    Applicable only when all audience sits in games featuring ``club``
    and at least one of those games was actually watched.
    """
    n = matrix.n
    a = matrix.entries
    others_watched = any(
        a[i, j] > 0.0 for i in range(n) for j in range(n) if i != j and club not in (i, j)
    )
    alpha = aggregates(matrix).per_club
    if others_watched or alpha[club] == 0.0:
        return AxiomReport(
            "essential-team",
            Verdict.NOT_APPLICABLE,
            detail=f"{matrix.labels[club]} is not essential on this input",
        )
    payoff = apply_rule(rule, matrix).values
    expected = alpha[club]
    if abs(payoff[club] - expected) > VALUE_TOL:
        return AxiomReport(
            "essential-team",
            Verdict.VIOLATED,
            witness={
                "club": matrix.labels[club],
                "amount": payoff[club],
                "entitled_to": expected,
            },
        )
    return AxiomReport("essential-team", Verdict.HOLDS)


def check_maximum_aspirations(rule: RuleSpec, matrix: AudienceMatrix) -> AxiomReport:
    """No club may be paid more than the audience it took part in."""
    alpha = aggregates(matrix).per_club
    payoff = apply_rule(rule, matrix).values
    for i in range(matrix.n):
        if payoff[i] > alpha[i] + VALUE_TOL:
            return AxiomReport(
                "maximum-aspirations",
                Verdict.VIOLATED,
                witness={
                    "club": matrix.labels[i],
                    "amount": payoff[i],
                    "ceiling": alpha[i],
                },
            )
    return AxiomReport("maximum-aspirations", Verdict.HOLDS)


def run_axioms(
    rule: RuleSpec,
    matrix: AudienceMatrix,
    partner: AudienceMatrix | None = None,
    permutation: Sequence[int] | None = None,
    club: int | None = None,
) -> list[AxiomReport]:
    """Every check on one instance.

    ``partner`` (for additivity) defaults to the matrix itself and
    ``permutation`` (for anonymity) to reversing the club order. The
    essential-team check targets ``club`` when given, otherwise the
    first club the instance makes essential, if any.
    """
    n = matrix.n
    if permutation is None:
        permutation = list(reversed(range(n)))
    reports = [
        check_additivity(rule, matrix, partner if partner is not None else matrix),
        check_equal_treatment(rule, matrix),
        check_anonymity(rule, matrix, permutation),
        check_null_team(rule, matrix),
        check_maximum_aspirations(rule, matrix),
    ]
    if club is not None:
        reports.append(check_essential_team(rule, matrix, club))
    else:
        candidates = [check_essential_team(rule, matrix, i) for i in range(n)]
        applicable = [r for r in candidates if r.verdict is not Verdict.NOT_APPLICABLE]
        reports.append(applicable[0] if applicable else candidates[0])
    return reports


# ---------------------------------------------------------------------------
# Randomised falsification suite


@dataclass(frozen=True)
class SuiteResult:
    axiom: str
    verdict: Verdict
    instances: int
    first_violation: AxiomReport | None = None
    violation_index: int | None = None


def _random_matrix(rng: np.random.Generator, n: int) -> AudienceMatrix:
    entries = rng.uniform(0.0, 10.0, size=(n, n))
    np.fill_diagonal(entries, 0.0)
    return validate_matrix(entries)


def _with_twins(matrix: AudienceMatrix) -> AudienceMatrix:
    """Make clubs 0 and 1 twins against everyone else (mutual games stay)."""
    entries = np.array(matrix.entries)
    entries[1, 2:] = entries[0, 2:]
    entries[2:, 1] = entries[2:, 0]
    return AudienceMatrix(matrix.labels, entries)


def _with_null_club(matrix: AudienceMatrix) -> AudienceMatrix:
    entries = np.array(matrix.entries)
    entries[-1, :] = 0.0
    entries[:, -1] = 0.0
    return AudienceMatrix(matrix.labels, entries)


def _star_matrix(rng: np.random.Generator, n: int) -> AudienceMatrix:
    """Only games involving club 0 were watched."""
    entries = np.zeros((n, n))
    entries[0, 1:] = rng.uniform(0.1, 10.0, size=n - 1)
    entries[1:, 0] = rng.uniform(0.1, 10.0, size=n - 1)
    return validate_matrix(entries)


def run_random_suite(
    rule: RuleSpec,
    count: int,
    seed: int,
    min_clubs: int = 3,
    max_clubs: int = 8,
) -> list[SuiteResult]:
    """Hunt for counterexamples over ``count`` seeded random instances.

    Instances are engineered per axiom so the premises actually bite:
    equal treatment sees twin clubs, null-team sees a club without
    viewers, essential-team sees a single-club star season.
    """
    rng = np.random.default_rng(seed)
    axioms = [
        "additivity",
        "equal-treatment",
        "anonymity",
        "null-team",
        "essential-team",
        "maximum-aspirations",
    ]
    first: dict[str, tuple[AxiomReport, int]] = {}
    for index in range(count):
        n = int(rng.integers(min_clubs, max_clubs + 1))
        base = _random_matrix(rng, n)
        perm = [int(p) for p in rng.permutation(n)]
        reports = [
            check_additivity(rule, base, _random_matrix(rng, n)),
            check_equal_treatment(rule, _with_twins(base)),
            check_anonymity(rule, base, perm),
            check_null_team(rule, _with_null_club(base)),
            check_essential_team(rule, _star_matrix(rng, n), 0),
            # the zero-audience club carries the tightest payout ceiling
            check_maximum_aspirations(rule, _with_null_club(base)),
        ]
        for report in reports:
            if report.verdict is Verdict.VIOLATED and report.axiom not in first:
                first[report.axiom] = (report, index)
    results = []
    for axiom in axioms:
        if axiom in first:
            report, index = first[axiom]
            results.append(SuiteResult(axiom, Verdict.VIOLATED, count, report, index))
        else:
            results.append(SuiteResult(axiom, Verdict.HOLDS, count))
    return results
