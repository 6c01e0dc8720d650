"""Fan-model estimation: every ordered pairing's audience is explained as
a base draw, each club's own following, and a game-specific residual."""

import numpy as np
import pytest

from leaguealloc import (
    FanAssignment,
    InconsistentDecompositionError,
    InputError,
    allocate_from_decomposition,
    assignment_from_club_fans,
    concede_and_divide,
    fit_fan_model,
    regression_allocation,
    validate_matrix,
)
from conftest import random_matrix


def test_exact_fit_has_zero_residuals():
    # audiences chosen so the additive model reproduces them exactly
    matrix = validate_matrix([[0, 10, 10], [10, 0, 1], [10, 1, 0]])
    fit = fit_fan_model(matrix, reference=0)
    assert fit.generic == pytest.approx(19.0, abs=1e-9)
    assert fit.club_fans == pytest.approx((0.0, -9.0, -9.0), abs=1e-9)
    assert np.abs(fit.joint_fans).max() < 1e-9


def test_fit_agrees_with_a_numeric_minimizer(worked):
    # cross-check the normal equations against a black-box optimizer
    from scipy.optimize import minimize

    entries = worked.entries
    off = ~np.eye(3, dtype=bool)

    def loss(params):
        b0, b1, b2 = params
        club = np.array([0.0, b1, b2])  # reference club pinned at zero
        model = b0 + club[:, None] + club[None, :]
        return float(((entries - model)[off] ** 2).sum())

    best = minimize(loss, x0=np.zeros(3), method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    fit = fit_fan_model(worked, reference=0)
    assert best.x[0] == pytest.approx(fit.generic, abs=1e-5)
    assert best.x[1] == pytest.approx(fit.club_fans[1], abs=1e-5)
    assert best.x[2] == pytest.approx(fit.club_fans[2], abs=1e-5)
    assert loss(best.x) >= loss([fit.generic, fit.club_fans[1], fit.club_fans[2]]) - 1e-9


@pytest.mark.parametrize(
    "reference, generic, fans",
    [
        (0, 2.0, (0.0, -0.8, -0.97)),
        (1, 0.4, (0.8, 0.0, -0.17)),
        (2, 0.06, (0.97, 0.17, 0.0)),
    ],
)
def test_worked_example_fits_per_reference(worked, reference, generic, fans):
    fit = fit_fan_model(worked, reference)
    assert fit.reference == reference
    assert fit.club_fans[reference] == 0.0
    assert fit.generic == pytest.approx(generic, abs=1e-9)
    assert fit.club_fans == pytest.approx(fans, abs=1e-9)


def test_fit_rejects_out_of_range_reference(worked):
    with pytest.raises(InputError):
        fit_fan_model(worked, 3)
    with pytest.raises(InputError):
        fit_fan_model(worked, -1)


def test_allocation_is_reference_free_and_matches_concede(worked):
    target = concede_and_divide(worked).as_array()
    for reference in range(worked.n):
        values = regression_allocation(worked, reference).as_array()
        assert values == pytest.approx(target, abs=1e-9)


def test_reference_freedom_on_random_seasons():
    rng = np.random.default_rng(99)
    for _ in range(20):
        matrix = random_matrix(rng, int(rng.integers(3, 9)))
        target = concede_and_divide(matrix).as_array()
        for reference in range(matrix.n):
            values = regression_allocation(matrix, reference).as_array()
            assert np.abs(values - target).max() < 1e-6


def test_handpicked_fan_story(worked):
    # someone claims the followings are known; the payout honours them
    assignment = assignment_from_club_fans(worked, 0.09, np.array([0.8, 0.1, 0.03]))
    allocation = allocate_from_decomposition(worked, assignment)
    assert allocation.values == pytest.approx((3.7, 0.8, 0.42), abs=1e-9)
    assert allocation.endowment == pytest.approx(4.92)


def test_decomposition_must_rebuild_the_matrix(worked):
    club = np.array([0.0, -0.8, -0.97])
    joint = np.zeros((3, 3))
    # with the base effect off by one the entries no longer add up
    assignment = FanAssignment(1.0, club, joint)
    with pytest.raises(InconsistentDecompositionError):
        allocate_from_decomposition(worked, assignment)


def test_assignment_shape_checks(worked):
    with pytest.raises(InputError):
        assignment_from_club_fans(worked, 0.0, np.zeros(4))
    other = validate_matrix(np.zeros((4, 4)))
    assignment = assignment_from_club_fans(other, 0.0, np.zeros(4))
    with pytest.raises(InputError):
        allocate_from_decomposition(worked, assignment)


def test_all_zero_season_still_fits():
    silent = validate_matrix(np.zeros((4, 4)))
    fit = fit_fan_model(silent, 0)
    assert fit.generic == pytest.approx(0.0)
    assert np.abs(fit.club_fans).max() == pytest.approx(0.0)
    values = allocate_from_decomposition(silent, fit).values
    assert values == pytest.approx((0.0, 0.0, 0.0, 0.0))
