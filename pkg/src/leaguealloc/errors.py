"""Exception hierarchy shared across the package.

Everything raised on bad caller input derives from :class:`InputError`
so the CLI and the HTTP layer can map the whole family to one exit code
(2) and one status code (400) respectively.
"""

from __future__ import annotations


class LeagueAllocError(Exception):
    """Base class for every error this package raises deliberately."""


class InputError(LeagueAllocError):
    """The caller supplied data or parameters the operation rejects."""


class NonSquareError(InputError):
    """Audience matrix rows and columns do not line up."""


class NonZeroDiagonalError(InputError):
    """A club cannot broadcast a game against itself."""


class NegativeEntryError(InputError):
    """Audience counts must be nonnegative."""


class TooFewClubsError(InputError):
    """At least three clubs are required (several rules divide by n - 2)."""


class LambdaOutOfRangeError(InputError):
    """The convex-mix parameter must lie in [0, 1]."""


class BetaOutOfRangeError(InputError):
    """The egalitarian-Shapley weight must lie in [0, 1]."""


class ZeroTotalAudienceError(InputError):
    """Cannot scale an allocation whose values sum to zero."""


class DegenerateRationalizationError(InputError):
    """No mixing weight can reproduce the observed allocation."""


class SingularSystemError(LeagueAllocError):
    """The least-squares normal equations could not be solved."""


class InconsistentDecompositionError(InputError):
    """Supplied fan effects do not reconstruct the audience matrix."""


class TooManyPlayersError(InputError):
    """Coalition enumeration is capped to keep memory and time bounded."""


class InvalidRangeError(InputError):
    """An interval was given with its lower end above its upper end."""


class UnequalSumsError(InputError):
    """Lorenz comparison needs both vectors to distribute the same total."""


class DimensionMismatchError(InputError):
    """Two inputs that must share a size do not."""


class InvalidPermutationError(InputError):
    """A permutation must map {0..n-1} onto itself exactly once each."""


class MatrixRequiredError(InputError):
    """The requested rule needs the full matrix, not per-club totals."""


class CsvFormatError(InputError):
    """A CSV file does not follow the documented layout."""
