"""Decomposing audiences into league, club and game effects.

The working model is that the audience of the game hosted by ``i``
against ``j`` splits into a league-wide base ``b0`` every fixture draws,
the followings ``b_i`` and ``b_j`` of the two clubs, and a residual
``e_ij`` specific to that pairing::

    a_ij = b0 + b_i + b_j + e_ij

The followings are only identified up to a shift, so a reference club is
pinned to zero and the remaining effects are fitted by least squares
over all ordered pairs. Money then follows the viewers: the base is
shared by the whole league, each club keeps its own following, and each
residual is halved between the two clubs that produced it. Summed over a
double round robin this lands every club on

    (n - 1) * b0 + 2 * (n - 1) * b_i + sum_j (e_ij + e_ji) / 2

which coincides, for every choice of reference club, with what
concede-and-divide pays on the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentDecompositionError, InputError, SingularSystemError
from .model import AUDIENCE, Allocation, AudienceMatrix, aggregates


def _read_only(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class FanAssignment:
    """Explicit effect values for every term of the decomposition.

    ``club_fans`` has one entry per club and ``joint_fans`` one per
    ordered pairing (zero diagonal). No fitting is implied; any numbers
    are accepted here and only checked against a matrix when allocating.
    """

    generic: float
    club_fans: np.ndarray
    joint_fans: np.ndarray

    def __post_init__(self) -> None:
        club = np.asarray(self.club_fans, dtype=float)
        joint = np.asarray(self.joint_fans, dtype=float)
        if club.ndim != 1:
            raise InputError("club_fans must be a flat vector")
        n = club.shape[0]
        if joint.shape != (n, n):
            raise InputError(f"joint_fans must be {n}x{n}, got {joint.shape}")
        if np.any(np.diagonal(joint) != 0.0):
            raise InputError("joint_fans diagonal must be zero")
        object.__setattr__(self, "generic", float(self.generic))
        object.__setattr__(self, "club_fans", _read_only(club))
        object.__setattr__(self, "joint_fans", _read_only(joint))

    @property
    def n(self) -> int:
        return self.club_fans.shape[0]


@dataclass(frozen=True, eq=False)
class FanDecomposition(FanAssignment):
    """A fitted assignment, normalised so the reference club's fans are 0."""

    reference: int = 0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not 0 <= self.reference < self.n:
            raise InputError(f"reference club index {self.reference} out of range")
        if self.club_fans[self.reference] != 0.0:
            raise InputError("the reference club's fan effect must be exactly 0")


def _design(n: int, reference: int) -> np.ndarray:
    """Design matrix over ordered pairs; columns: base, clubs except reference.

    Depends only on (n, reference), never on the audiences, and has full
    column rank for n >= 3, so the least-squares problem below always has
    a unique solution.
    """
    columns = {}
    c = 1
    for m in range(n):
        if m != reference:
            columns[m] = c
            c += 1
    rows = n * (n - 1)
    design = np.zeros((rows, n))
    r = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            design[r, 0] = 1.0
            if i != reference:
                design[r, columns[i]] += 1.0
            if j != reference:
                design[r, columns[j]] += 1.0
            r += 1
    return design


def fit_fan_model(matrix: AudienceMatrix, reference: int) -> FanDecomposition:
    """Least-squares fit of base and club effects, residuals as joint effects.

    ``reference`` is the club whose following is pinned to zero. The
    normal equations are solved directly; a solve failure (which the
    full-rank design makes purely numerical) raises
    :class:`SingularSystemError`.
    """
    n = matrix.n
    if not 0 <= reference < n:
        raise InputError(f"reference club index {reference} out of range for {n} clubs")
    design = _design(n, reference)
    off_diag = ~np.eye(n, dtype=bool)
    targets = matrix.entries[off_diag]  # row-major ordered pairs, i != j
    gram = design.T @ design
    rhs = design.T @ targets
    try:
        solution = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"normal equations could not be solved: {exc}") from exc
    generic = float(solution[0])
    club = np.zeros(n)
    c = 1
    for m in range(n):
        if m != reference:
            club[m] = solution[c]
            c += 1
    joint = matrix.entries - (generic + club[:, None] + club[None, :])
    np.fill_diagonal(joint, 0.0)
    return FanDecomposition(generic, club, joint, reference)


def assignment_from_club_fans(
    matrix: AudienceMatrix, generic: float, club_fans: np.ndarray
) -> FanAssignment:
    """Assignment with the joint effects implied by the matrix.

    Given a base and per-club followings, the residual of each ordered
    pairing is whatever is left of its audience.
    """
    club = np.asarray(club_fans, dtype=float)
    if club.shape != (matrix.n,):
        raise InputError(f"expected {matrix.n} club fan values, got shape {club.shape}")
    joint = matrix.entries - (float(generic) + club[:, None] + club[None, :])
    np.fill_diagonal(joint, 0.0)
    return FanAssignment(generic, club, joint)


def allocate_from_decomposition(
    matrix: AudienceMatrix, assignment: FanAssignment
) -> Allocation:
    """Pay each club for its own following, plus equal shares of the rest.

    Over the whole double round robin: the base audience of each of the
    ``n (n - 1)`` games is divided among all ``n`` clubs, each club's
    following is credited in full for each of its ``2 (n - 1)`` games,
    and every joint effect is halved between the two clubs involved.
    The assignment must reconstruct the matrix entry-by-entry.
    """
    n = matrix.n
    if assignment.n != n:
        raise InputError(f"assignment covers {assignment.n} clubs, matrix has {n}")
    generic = assignment.generic
    club = assignment.club_fans
    joint = assignment.joint_fans
    rebuilt = generic + club[:, None] + club[None, :] + joint
    np.fill_diagonal(rebuilt, 0.0)
    gaps = np.abs(rebuilt - matrix.entries)
    tol = 1e-9 * np.maximum(1.0, np.abs(matrix.entries))
    if np.any(gaps > tol):
        i, j = np.argwhere(gaps > tol)[0]
        raise InconsistentDecompositionError(
            f"effects rebuild entry ({int(i)}, {int(j)}) as {rebuilt[i, j]!r} "
            f"but the matrix holds {matrix.entries[i, j]!r}"
        )
    values = (
        (n - 1) * generic
        + 2 * (n - 1) * club
        + (joint.sum(axis=1) + joint.sum(axis=0)) / 2.0
    )
    agg = aggregates(matrix)
    return Allocation(matrix.labels, tuple(float(v) for v in values), agg.total, AUDIENCE)


def regression_allocation(matrix: AudienceMatrix, reference: int) -> Allocation:
    """Fit the fan model against ``reference`` and allocate from the fit.

    The outcome does not depend on the reference club: it always equals
    the concede-and-divide allocation.
    """
    return allocate_from_decomposition(matrix, fit_fan_model(matrix, reference))
