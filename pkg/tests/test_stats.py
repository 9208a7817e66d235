import math

import numpy as np
import pytest

from lexsent.stats import RunMatrix, chi2_sf, friedman_test, holm_bonferroni, \
    normal_sf, normal_two_sided_p, posthoc_pairwise, regularized_gamma_q

# Upper-tail values frozen from an independent high-precision evaluation
# of the regularized incomplete gamma function.
GAMMA_Q_CASES = [
    (0.5, 0.01, 0.88753708398171511),
    (0.5, 1.0, 0.15729920705028513),
    (0.5, 4.0, 0.0046777349810472658),
    (0.5, 20.0, 2.539628589470865e-10),
    (1.0, 0.5, 0.60653065971263342),
    (1.0, 3.0, 0.049787068367863943),
    (1.0, 30.0, 9.3576229688401746e-14),
    (1.5, 0.2, 0.94024249483936074),
    (1.5, 2.0, 0.26146412994911062),
    (1.5, 12.0, 2.4979977724652008e-5),
    (2.0, 1.0, 0.73575888234288464),
    (2.0, 8.0, 0.0030191636511226065),
    (2.0, 40.0, 1.7418252446695515e-16),
    (2.5, 6.0, 0.03478778050624185),
    (3.0, 0.5, 0.98561232203302931),
    (3.0, 15.0, 3.9308448184484614e-5),
    (5.0, 2.0, 0.94734698265628884),
    (5.0, 25.0, 2.6690834249044956e-7),
    (10.0, 4.0, 0.99186775720306614),
    (10.0, 35.0, 1.8213700395721062e-7),
    (0.5, 35.0, 5.9304458500824868e-17),
    (4.0, 60.0, 3.3153025398645296e-22),
]

CHI2_SF_CASES = [
    (0.0, 1, 1.0),
    (1.0, 1, 0.3173105078629141),
    (3.841458820694124, 1, 0.050000000000000057),
    (4.605170185988091, 2, 0.10000000000000002),
    (6.0, 2, 0.049787068367863943),
    (27.631021115928547, 2, 1.0000000000000005e-6),
    (6.251388631170325, 3, 0.099999999999999909),
    (7.779440339734858, 4, 0.099999999999999998),
    (11.070497693516351, 5, 0.050000000000000052),
    (16.811893829770927, 6, 0.010000000000000016),
    (2.0, 6, 0.9196986029286058),
    (33.0, 6, 1.0485833186894444e-5),
    (50.0, 10, 2.6690834249044956e-7),
]

NORMAL_SF_CASES = [
    (0.0, 0.5),
    (0.5, 0.3085375387259869),
    (1.0, 0.15865525393145705),
    (1.959963984540054, 0.025000000000000011),
    (2.0, 0.022750131948179207),
    (3.0, 0.0013498980316300945),
    (4.0, 3.1671241833119921e-5),
    (4.753424308822899, 1.0000000000000013e-6),
    (5.0, 2.8665157187919391e-7),
    (-1.0, 0.84134474606854295),
]

TWO_SIDED_CASES = [
    (0.0, 1.0),
    (1.0, 0.3173105078629141),
    (-2.0, 0.045500263896358414),
    (2.449489742783178, 0.014305878435429648),
    (4.891638475699412, 9.9999999999582582e-7),
]


@pytest.mark.parametrize("a,x,expected", GAMMA_Q_CASES)
def test_regularized_gamma_q_against_frozen_values(a, x, expected):
    assert regularized_gamma_q(a, x) == pytest.approx(expected, rel=1e-9)


def test_regularized_gamma_q_matches_recurrence_oracle():
    """Independent closed-form check: Q(1/2, x) = erfc(sqrt(x)) and
    Q(a+1, x) = Q(a, x) + x^a e^-x / Gamma(a+1)."""
    for x in (0.05, 0.7, 2.0, 5.0, 13.0, 29.0):
        q = math.erfc(math.sqrt(x))
        a = 0.5
        for _ in range(8):
            assert regularized_gamma_q(a, x) == pytest.approx(q, rel=1e-10)
            q += math.exp(a * math.log(x) - x - math.lgamma(a + 1.0))
            a += 1.0


def test_regularized_gamma_q_domain_and_limits():
    assert regularized_gamma_q(1.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        regularized_gamma_q(0.0, 1.0)
    with pytest.raises(ValueError):
        regularized_gamma_q(1.0, -0.5)


def test_regularized_gamma_q_monotone_in_x():
    xs = [0.0, 0.3, 1.0, 2.5, 7.0, 20.0, 50.0]
    for a in (0.5, 1.0, 3.0, 10.0):
        values = [regularized_gamma_q(a, x) for x in xs]
        assert values == sorted(values, reverse=True)


@pytest.mark.parametrize("x,df,expected", CHI2_SF_CASES)
def test_chi2_sf_against_frozen_values(x, df, expected):
    assert chi2_sf(x, df) == pytest.approx(expected, rel=1e-9)


def test_chi2_sf_df_two_closed_form():
    for x in (0.5, 3.0, 11.0, 27.6310211159):
        assert chi2_sf(x, 2) == pytest.approx(math.exp(-x / 2.0), rel=1e-12)


@pytest.mark.parametrize("z,expected", NORMAL_SF_CASES)
def test_normal_sf_against_frozen_values(z, expected):
    assert normal_sf(z) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("z,expected", TWO_SIDED_CASES)
def test_normal_two_sided_against_frozen_values(z, expected):
    assert normal_two_sided_p(z) == pytest.approx(expected, rel=1e-9)


def _matrix(rows, methods=("A", "B", "C")):
    queries = tuple(f"q{i}" for i in range(len(rows)))
    return RunMatrix(methods=tuple(methods), queries=queries,
                     values=np.asarray(rows, dtype=float))


def test_run_matrix_validation():
    with pytest.raises(ValueError, match="at least 2"):
        _matrix([[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError, match="unique"):
        _matrix([[1, 2], [3, 4]], methods=("A", "A"))
    with pytest.raises(ValueError, match="shape"):
        RunMatrix(methods=("A", "B"), queries=("q01", "q02"),
                  values=np.zeros((2, 3)))
    with pytest.raises(ValueError, match="non-finite"):
        _matrix([[1.0, 2.0, float("nan")], [1.0, 2.0, 3.0]])


def test_friedman_textbook_fixture():
    """Three methods in the same strict order on every query: the statistic
    is exactly 6.0 and p = exp(-3) (about 0.0498)."""
    m = _matrix([[0.9, 0.5, 0.1],
                 [0.8, 0.6, 0.2],
                 [0.7, 0.5, 0.3]])
    result = friedman_test(m)
    assert result.statistic == pytest.approx(6.0, abs=1e-12)
    assert result.p_value == pytest.approx(0.0498, abs=1e-3)
    assert result.p_value == pytest.approx(math.exp(-3.0), rel=1e-12)
    assert result.average_ranks == pytest.approx((1.0, 2.0, 3.0))
    assert result.iman_davenport == math.inf


def test_friedman_iman_davenport_finite_case():
    m = _matrix([[0.9, 0.5, 0.1],
                 [0.8, 0.6, 0.2],
                 [0.3, 0.5, 0.4]])
    result = friedman_test(m)
    n, k = 3, 3
    # per-row ranks: (1,2,3), (1,2,3), (3,1,2) -> averages 5/3, 5/3, 8/3
    assert result.average_ranks == pytest.approx((5 / 3, 5 / 3, 8 / 3))
    expected_chi2 = 12.0 * n / (k * (k + 1)) * (
        (5 / 3) ** 2 + (5 / 3) ** 2 + (8 / 3) ** 2 - k * (k + 1) ** 2 / 4.0)
    assert result.statistic == pytest.approx(expected_chi2, rel=1e-12)
    assert result.statistic == pytest.approx(2.0, abs=1e-12)
    denominator = n * (k - 1) - result.statistic
    assert result.iman_davenport == pytest.approx(
        (n - 1) * result.statistic / denominator, rel=1e-12)


def test_friedman_constant_rows_give_zero_statistic():
    m = _matrix([[0.5, 0.5, 0.5], [0.2, 0.2, 0.2]])
    result = friedman_test(m)
    assert result.statistic == 0.0
    assert result.p_value == 1.0
    assert result.average_ranks == pytest.approx((2.0, 2.0, 2.0))


def test_friedman_ties_get_average_ranks():
    m = _matrix([[0.9, 0.9, 0.1], [0.9, 0.9, 0.1]])
    result = friedman_test(m)
    assert result.average_ranks == pytest.approx((1.5, 1.5, 3.0))


def test_holm_fixture_first_failure_stops():
    # thresholds 0.05/3, 0.05/2, 0.05: 0.01 passes, 0.03 fails at 0.025,
    # everything after the first failure is accepted wholesale
    assert holm_bonferroni([0.01, 0.04, 0.03], alpha=0.05) == \
        [True, False, False]


def test_holm_fixture_cascade():
    # sorted thresholds 0.0125, 0.0166.., 0.025, 0.05: the third p (0.03)
    # exceeds 0.025 and stops the cascade, so 0.031 is accepted even
    # though it is below its own threshold of 0.05
    assert holm_bonferroni([0.001, 0.011, 0.03, 0.031], alpha=0.05) == \
        [True, True, False, False]
    assert holm_bonferroni([0.001, 0.011, 0.02, 0.03], alpha=0.05) == \
        [True, True, True, True]


def test_holm_all_reject_and_all_accept():
    assert holm_bonferroni([0.001, 0.002], alpha=0.05) == [True, True]
    assert holm_bonferroni([0.9, 0.8], alpha=0.05) == [False, False]


def test_holm_decisions_follow_input_order():
    # 0.06 fails the loosest threshold (0.05) and comes first in the
    # input, so the decision list must be [False, True], not sorted order
    assert holm_bonferroni([0.06, 0.001], alpha=0.05) == [False, True]


def test_holm_validates_inputs():
    with pytest.raises(ValueError, match="alpha"):
        holm_bonferroni([0.01], alpha=0.0)
    with pytest.raises(ValueError, match="outside"):
        holm_bonferroni([1.5], alpha=0.05)


def test_posthoc_control_mode_fixture():
    """Perfect-order matrix: z against the control is (1-2)/sqrt(2/3) and
    (1-3)/sqrt(2/3) = -sqrt(6); its two-sided p is erfc(sqrt(3))."""
    m = _matrix([[0.9, 0.5, 0.1],
                 [0.8, 0.6, 0.2],
                 [0.7, 0.5, 0.3]])
    report = posthoc_pairwise(m, control="A", alpha=0.05)
    assert [c.pair for c in report.pairwise] == [("A", "B"), ("A", "C")]
    se = math.sqrt(3 * 4 / (6.0 * 3))
    assert report.pairwise[0].z == pytest.approx(-1.0 / se, rel=1e-12)
    assert report.pairwise[1].z == pytest.approx(-math.sqrt(6.0), rel=1e-12)
    assert report.pairwise[1].raw_p == pytest.approx(
        math.erfc(math.sqrt(3.0)), rel=1e-12)
    assert report.pairwise[1].reject is True
    assert report.pairwise[0].reject is False
    assert report.friedman_statistic == pytest.approx(6.0)


def test_posthoc_all_pairs_mode():
    m = _matrix([[0.9, 0.5, 0.1],
                 [0.8, 0.6, 0.2],
                 [0.7, 0.5, 0.3]])
    report = posthoc_pairwise(m, control="A", alpha=0.05, all_pairs=True)
    assert [c.pair for c in report.pairwise] == \
        [("A", "B"), ("A", "C"), ("B", "C")]


def test_posthoc_self_comparison_is_never_rejected():
    m = RunMatrix(methods=("A", "A2"), queries=("q0", "q1"),
                  values=np.asarray([[0.4, 0.4], [0.7, 0.7]]))
    report = posthoc_pairwise(m, control="A", alpha=0.05)
    assert report.friedman_p == 1.0
    assert report.pairwise[0].z == 0.0
    assert report.pairwise[0].raw_p == 1.0
    assert report.pairwise[0].reject is False


def test_posthoc_unknown_control_rejected():
    m = _matrix([[1, 2, 3], [1, 2, 3]])
    with pytest.raises(ValueError, match="control"):
        posthoc_pairwise(m, control="missing")
