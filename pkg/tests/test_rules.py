import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leaguealloc import (
    InputError,
    LambdaOutOfRangeError,
    RuleKind,
    RuleSpec,
    ZeroTotalAudienceError,
    aggregates,
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
    validate_matrix,
    FitKind,
    MatrixRequiredError,
)
from conftest import random_matrix


def test_worked_example_golden_values(worked):
    assert uniform(worked).values == pytest.approx((1.64, 1.64, 1.64), abs=1e-9)
    assert equal_split(worked).values == pytest.approx((2.23, 1.43, 1.26), abs=1e-9)
    assert concede_and_divide(worked).values == pytest.approx((4.0, 0.8, 0.12), abs=1e-9)


def test_concede_and_divide_can_go_negative():
    # two clubs share all the audience, the third is punished
    matrix = validate_matrix([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    assert concede_and_divide(matrix).values == pytest.approx((2.0, 2.0, -2.0))


def test_compromise_interpolates_between_uniform_and_concede(worked):
    assert compromise(worked, 0.0).values == uniform(worked).values
    assert compromise(worked, 1.0).values == pytest.approx(
        concede_and_divide(worked).values, abs=1e-12
    )
    weight = equal_split_weight(worked.n)
    assert compromise(worked, weight).values == pytest.approx(
        equal_split(worked).values, abs=1e-12
    )


def test_compromise_weight_is_unbounded(worked):
    # values outside [0, 1] are legitimate (more extreme than either end)
    lo = compromise(worked, -1.0)
    hi = compromise(worked, 2.0)
    assert lo.endowment == pytest.approx(hi.endowment)
    assert lo.values[0] < uniform(worked).values[0] < hi.values[0]


def test_split_half_is_equal_split(worked):
    assert split(worked, 0.5).values == pytest.approx(equal_split(worked).values, abs=1e-12)
    # split:0 pays home audiences, split:1 away audiences
    assert split(worked, 0.0).values == pytest.approx(tuple(worked.entries.sum(axis=1)))
    assert split(worked, 1.0).values == pytest.approx(tuple(worked.entries.sum(axis=0)))


def test_escd_matches_a_compromise_weight():
    rng = np.random.default_rng(13)
    for _ in range(20):
        matrix = random_matrix(rng, int(rng.integers(3, 8)))
        lam = float(rng.uniform(0, 1))
        n = matrix.n
        equivalent = 1.0 - lam * n / (2.0 * (n - 1))
        assert es_cd_convex(matrix, lam).values == pytest.approx(
            compromise(matrix, equivalent).values, abs=1e-9
        )


def test_escd_rejects_weights_outside_unit_interval(worked):
    with pytest.raises(LambdaOutOfRangeError):
        es_cd_convex(worked, -0.01)
    with pytest.raises(LambdaOutOfRangeError):
        es_cd_convex(worked, 1.01)


def test_monetize(worked):
    money = monetize(equal_split(worked), 1000.0)
    assert money.unit == "money"
    assert money.endowment == 1000.0
    assert money.values == pytest.approx((453.2520325, 290.6504065, 256.097561), abs=1e-6)


def test_monetize_needs_someone_watching():
    silent = validate_matrix(np.zeros((3, 3)))
    with pytest.raises(ZeroTotalAudienceError):
        monetize(equal_split(silent), 100.0)


# --- the parsed rule layer -------------------------------------------------


def test_rule_spec_parse_and_describe():
    assert RuleSpec.parse("uniform") == RuleSpec(RuleKind.UNIFORM)
    spec = RuleSpec.parse("compromise:0.25")
    assert spec.kind is RuleKind.COMPROMISE and spec.lam == 0.25
    assert "0.25" in spec.describe()


@pytest.mark.parametrize(
    "token",
    ["bogus", "uniform:0.5", "compromise", "escd", "compromise:abc", "escd:1.5"],
)
def test_rule_spec_rejects_malformed_tokens(token):
    with pytest.raises(InputError):
        RuleSpec.parse(token)


def test_apply_rule_dispatch(worked):
    for token, direct in [
        ("uniform", uniform(worked)),
        ("equal-split", equal_split(worked)),
        ("concede-divide", concede_and_divide(worked)),
        ("compromise:0.3", compromise(worked, 0.3)),
        ("split:0.2", split(worked, 0.2)),
        ("escd:0.6", es_cd_convex(worked, 0.6)),
    ]:
        assert apply_rule(RuleSpec.parse(token), worked).values == direct.values


def test_totals_are_enough_except_for_split(worked):
    agg = aggregates(worked)
    assert apply_rule_to_totals(RuleSpec.parse("concede-divide"), agg).values == (
        concede_and_divide(worked).values
    )
    with pytest.raises(MatrixRequiredError):
        apply_rule_to_totals(RuleSpec.parse("split:0.5"), agg)


# --- reading a weight back out of published numbers ------------------------


def test_rationalize_lambda_inside_and_outside():
    # the recovered weight sits on the equal-split side of the mix
    fit = rationalize_lambda(es=10.0, cd=20.0, actual=17.5)
    assert fit.kind is FitKind.WITHIN and fit.value == pytest.approx(0.25)
    fit = rationalize_lambda(es=10.0, cd=20.0, actual=12.5)
    assert fit.kind is FitKind.WITHIN and fit.value == pytest.approx(0.75)
    assert rationalize_lambda(10.0, 20.0, 9.0).kind is FitKind.BELOW
    assert rationalize_lambda(10.0, 20.0, 21.0).kind is FitKind.ABOVE
    # order of the anchors must not matter for the side labels
    assert rationalize_lambda(20.0, 10.0, 9.0).kind is FitKind.BELOW


def test_rationalize_lambda_degenerate_anchors():
    assert rationalize_lambda(10.0, 10.0, 10.0).kind is FitKind.ANY
    from leaguealloc import DegenerateRationalizationError

    with pytest.raises(DegenerateRationalizationError):
        rationalize_lambda(10.0, 10.0, 11.0)


# --- structural properties on random seasons -------------------------------

finite_audiences = st.floats(0.0, 100.0, allow_nan=False, allow_infinity=False)


@st.composite
def season_matrices(draw, max_n: int = 6):
    n = draw(st.integers(3, max_n))
    cells = draw(
        st.lists(finite_audiences, min_size=n * (n - 1), max_size=n * (n - 1))
    )
    entries = np.zeros((n, n))
    entries[~np.eye(n, dtype=bool)] = cells
    return validate_matrix(entries)


# compromise weights far outside [0, 1] magnify rounding in the efficiency
# sum roughly in proportion, so the property caps them at +/-50
all_rules = st.one_of(
    st.sampled_from(["uniform", "equal-split", "concede-divide"]).map(RuleSpec.parse),
    st.floats(-50.0, 50.0, allow_nan=False).map(lambda l: RuleSpec(RuleKind.COMPROMISE, l)),
    st.floats(-50.0, 50.0, allow_nan=False).map(lambda l: RuleSpec(RuleKind.SPLIT, l)),
    st.floats(0.0, 1.0, allow_nan=False).map(lambda l: RuleSpec(RuleKind.ESCD, l)),
)


@settings(max_examples=120, deadline=None)
@given(matrix=season_matrices(), rule=all_rules)
def test_every_rule_distributes_the_whole_pot(matrix, rule):
    allocation = apply_rule(rule, matrix)
    total = aggregates(matrix).total
    scale = max(1.0, abs(total)) * max(1.0, abs(rule.lam or 0.0))
    assert abs(sum(allocation.values) - total) <= 1e-9 * scale


@settings(max_examples=60, deadline=None)
@given(matrix=season_matrices(max_n=5), rule=all_rules)
def test_rules_are_additive_across_seasons(matrix, rule):
    rng = np.random.default_rng(7)
    other = random_matrix(rng, matrix.n)
    merged = apply_rule(rule, matrix + other).as_array()
    parts = apply_rule(rule, matrix).as_array() + apply_rule(rule, other).as_array()
    assert merged == pytest.approx(parts, abs=1e-7 * max(1.0, abs(rule.lam or 0.0)))


@settings(max_examples=60, deadline=None)
@given(matrix=season_matrices(max_n=5), rule=all_rules, factor=st.floats(0.0, 10.0))
def test_rules_scale_with_the_audience(matrix, rule, factor):
    scaled = apply_rule(rule, matrix.scaled(factor)).as_array()
    base = apply_rule(rule, matrix).as_array() * factor
    assert scaled == pytest.approx(base, abs=1e-6 * max(1.0, abs(rule.lam or 0.0)))
