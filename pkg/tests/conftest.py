import numpy as np
import pytest

from leaguealloc import AudienceMatrix, validate_matrix

# Three-club season used throughout: audiences in millions, symmetric
# pairings, club 1 clearly the draw.
WORKED_ROWS = [
    [0.0, 1.2, 1.03],
    [1.2, 0.0, 0.23],
    [1.03, 0.23, 0.0],
]


def random_matrix(rng: np.random.Generator, n: int, scale: float = 10.0) -> AudienceMatrix:
    entries = rng.uniform(0.0, scale, size=(n, n))
    np.fill_diagonal(entries, 0.0)
    return validate_matrix(entries)


@pytest.fixture
def worked() -> AudienceMatrix:
    return validate_matrix(WORKED_ROWS)
