"""Student t p-values and the paired test built on them."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphbpe.stats import (
    paired_t_test,
    regularized_incomplete_beta,
    student_t_two_sided_p,
)

# Expected p-values computed with mpmath at 50 decimal digits:
#   p = betainc(df/2, 1/2, x2=df/(df+t*t), regularized=True)
# and cross-checked against scipy.stats.t.sf.
FROZEN_TWO_SIDED = [
    (0.5, 1, 0.70483276469913345),
    (1.0, 10, 0.34089313230205987),
    (2.228, 10, 0.050011771817111365),
    (-3.5, 7, 0.0099930408818855473),
    (1.96, 1000, 0.050273184955748718),
]


class TestStudentT:
    @pytest.mark.parametrize("t, df, expected", FROZEN_TWO_SIDED)
    def test_frozen_reference_values(self, t, df, expected):
        assert student_t_two_sided_p(t, df) == pytest.approx(expected, abs=1e-6)

    def test_symmetry_in_t(self):
        assert student_t_two_sided_p(1.7, 9) == pytest.approx(
            student_t_two_sided_p(-1.7, 9), abs=1e-15
        )

    def test_zero_statistic(self):
        assert student_t_two_sided_p(0.0, 5) == 1.0

    def test_infinite_statistic(self):
        assert student_t_two_sided_p(math.inf, 5) == 0.0
        assert student_t_two_sided_p(-math.inf, 5) == 0.0

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            student_t_two_sided_p(math.nan, 5)

    def test_bad_df_rejected(self):
        with pytest.raises(ValueError):
            student_t_two_sided_p(1.0, 0)

    @given(
        t=st.floats(-50, 50, allow_nan=False),
        df=st.integers(min_value=1, max_value=2000),
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_scipy(self, t, df):
        scipy_stats = pytest.importorskip("scipy.stats")
        ours = student_t_two_sided_p(t, df)
        reference = 2.0 * scipy_stats.t.sf(abs(t), df)
        assert ours == pytest.approx(reference, abs=5e-9)

    @given(
        t=st.floats(0, 50, allow_nan=False),
        df=st.integers(min_value=1, max_value=500),
    )
    @settings(max_examples=200, deadline=None)
    def test_p_decreases_as_t_grows(self, t, df):
        assert student_t_two_sided_p(t + 0.5, df) <= student_t_two_sided_p(t, df)


class TestIncompleteBeta:
    def test_endpoints(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_symmetric_identity(self):
        # I_x(a, b) + I_{1-x}(b, a) = 1
        for a, b, x in [(2.0, 5.0, 0.3), (0.5, 0.5, 0.7), (10.0, 1.5, 0.05)]:
            total = regularized_incomplete_beta(
                a, b, x
            ) + regularized_incomplete_beta(b, a, 1.0 - x)
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_uniform_case_is_identity(self):
        # a = b = 1 makes the distribution uniform on [0, 1]
        for x in (0.1, 0.25, 0.9):
            assert regularized_incomplete_beta(1.0, 1.0, x) == pytest.approx(
                x, abs=1e-12
            )

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, -1.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 1.0, 1.5)

    @given(
        a=st.floats(0.1, 50, allow_nan=False),
        b=st.floats(0.1, 50, allow_nan=False),
        x=st.floats(0.0, 1.0, allow_nan=False),
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_scipy_betainc(self, a, b, x):
        scipy_special = pytest.importorskip("scipy.special")
        ours = regularized_incomplete_beta(a, b, x)
        assert ours == pytest.approx(scipy_special.betainc(a, b, x), abs=1e-9)


class TestPairedTTest:
    def test_worked_example(self):
        res = paired_t_test([1, 2, 3, 4, 5], [0, 1, 2, 3, 5])
        assert res.t == pytest.approx(4.0)
        assert res.df == 4
        assert res.mean_diff == pytest.approx(0.8)
        assert res.p_value == pytest.approx(0.016130089900092024, abs=1e-9)

    def test_identical_samples_give_p_one(self):
        res = paired_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.p_value == 1.0
        assert res.t == 0.0

    def test_constant_nonzero_difference_gives_p_zero(self):
        res = paired_t_test([2.0, 3.0, 4.0], [1.0, 2.0, 3.0])
        assert res.p_value == 0.0
        assert math.isinf(res.t)
        assert res.t > 0

    def test_constant_negative_difference(self):
        res = paired_t_test([1.0, 2.0], [2.0, 3.0])
        assert res.p_value == 0.0
        assert res.t < 0

    def test_requires_two_pairs(self):
        with pytest.raises(ValueError):
            paired_t_test([1.0], [2.0])

    def test_requires_equal_lengths(self):
        with pytest.raises(ValueError):
            paired_t_test([1.0, 2.0], [1.0])

    @given(
        st.lists(
            st.tuples(
                st.floats(-100, 100, allow_nan=False),
                st.floats(-100, 100, allow_nan=False),
            ),
            min_size=2,
            max_size=40,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_scipy_ttest_rel(self, pairs):
        scipy_stats = pytest.importorskip("scipy.stats")
        a = [p[0] for p in pairs]
        b = [p[1] for p in pairs]
        diffs = [x - y for x, y in pairs]
        ours = paired_t_test(a, b)
        if all(d == diffs[0] for d in diffs):
            # degenerate case scipy reports as nan; we define it
            expected = 1.0 if diffs[0] == 0 else 0.0
            assert ours.p_value == expected
            return
        ref = scipy_stats.ttest_rel(a, b)
        assert ours.t == pytest.approx(ref.statistic, rel=1e-9, abs=1e-9)
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-7, abs=1e-9)
