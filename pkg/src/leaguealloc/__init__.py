"""Allocation toolkit for collectively sold league broadcasting revenue.

The core objects are an audience matrix (who watched each ordered
pairing of a double round robin) and allocation rules that divide the
season's pooled revenue according to it. On top of that sit a fan-model
decomposition, a coalitional view with Shapley and core diagnostics,
rule-selection by voting, Lorenz inequality comparisons, extensions for
cancelled seasons, axiom checkers, and reproductions of two published
season tables. A FastAPI service exposes everything over HTTP and the
``alloc`` CLI is a thin client of it.
"""

from .axioms import (
    AxiomReport,
    SuiteResult,
    Verdict,
    check_additivity,
    check_anonymity,
    check_equal_treatment,
    check_essential_team,
    check_maximum_aspirations,
    check_null_team,
    run_axioms,
    run_random_suite,
)
from .cancelled import (
    ExtensionOperator,
    PartialAudienceMatrix,
    extend_leg,
    extend_zero,
    extended_allocate,
)
from .errors import (
    BetaOutOfRangeError,
    CsvFormatError,
    DegenerateRationalizationError,
    DimensionMismatchError,
    InconsistentDecompositionError,
    InputError,
    InvalidPermutationError,
    InvalidRangeError,
    LambdaOutOfRangeError,
    LeagueAllocError,
    MatrixRequiredError,
    NegativeEntryError,
    NonSquareError,
    NonZeroDiagonalError,
    SingularSystemError,
    TooFewClubsError,
    TooManyPlayersError,
    UnequalSumsError,
    ZeroTotalAudienceError,
)
from .io import (
    csv_rows_from_text,
    format_allocation_csv,
    read_aggregates,
    read_allocation,
    read_csv_rows,
    read_matrix,
    read_partial_matrix,
    write_aggregates,
    write_matrix,
)
from .fans import (
    FanAssignment,
    FanDecomposition,
    allocate_from_decomposition,
    assignment_from_club_fans,
    fit_fan_model,
    regression_allocation,
)
from .games import (
    CoalitionalGame,
    CoreCheck,
    characteristic_value,
    egalitarian,
    egalitarian_shapley,
    game_from_function,
    game_from_matrix,
    in_core,
    shapley,
)
from .model import (
    AggregateAudience,
    Allocation,
    AudienceMatrix,
    aggregates,
    allocation_from_values,
    default_labels,
    validate_matrix,
)
from .rules import (
    FitKind,
    LambdaFit,
    RuleKind,
    RuleSpec,
    apply_rule,
    apply_rule_to_totals,
    compromise,
    concede_and_divide,
    equal_split,
    equal_split_weight,
    es_cd_convex,
    monetize,
    rationalize_lambda,
    split,
    uniform,
)
from .tables import (
    ColumnCheck,
    FixtureRow,
    SeasonFixture,
    TableReport,
    bundled_data_path,
    bundled_fixture,
    fixture_aggregates,
    load_season_fixture,
    parse_season_fixture,
    reproduce_table,
    reproduce_table1,
    reproduce_table2,
)
from .voting import (
    LorenzResult,
    LorenzVerdict,
    OutcomeKind,
    SingleCrossing,
    VotingOutcome,
    condorcet_tournament,
    lorenz_compare,
    majority_winner_compromise,
    majority_winner_from_totals,
    single_crossing_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
