import math

import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from mathsearch.stats import InsufficientSamples, mean_ci, student_t_cdf, student_t_ppf


class TestStudentT:
    def test_published_values(self):
        # standard two-sided 99% quantiles for df = 1 and df = 40
        assert student_t_ppf(0.995, 1) == pytest.approx(63.657, abs=1e-3)
        assert student_t_ppf(0.995, 40) == pytest.approx(2.7045, abs=1e-4)

    def test_matches_scipy_quantiles(self):
        """Independent oracle with a separate quantile implementation."""
        for df in (1, 2, 3, 5, 10, 40, 120, 500):
            for p in (0.55, 0.75, 0.9, 0.975, 0.995, 0.9999):
                ref = scipy.stats.t.ppf(p, df)
                assert student_t_ppf(p, df) == pytest.approx(ref, rel=1e-9)

    def test_symmetry(self):
        assert student_t_ppf(0.25, 7) == -student_t_ppf(0.75, 7)
        assert student_t_ppf(0.5, 7) == 0.0

    def test_cdf_ppf_roundtrip(self):
        for p in (0.6, 0.95, 0.999):
            assert student_t_cdf(student_t_ppf(p, 11), 11) == pytest.approx(p, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            student_t_ppf(0.0, 5)
        with pytest.raises(ValueError):
            student_t_ppf(0.5, 0)

    @given(st.floats(0.001, 0.999), st.integers(1, 200))
    def test_quantile_against_scipy_everywhere(self, p, df):
        ref = scipy.stats.t.ppf(p, df)
        if abs(ref) < 1e-12:
            assert abs(student_t_ppf(p, df)) < 1e-9
        else:
            assert student_t_ppf(p, df) == pytest.approx(ref, rel=1e-9)


class TestMeanCI:
    def test_one_to_fortyone(self):
        mean, hw = mean_ci(list(range(1, 42)), 0.99)
        assert mean == 21.0
        # s = sqrt(5740/40), t(0.995, 40): half-width ~ 5.0596
        expected = 2.7044592674331502 * math.sqrt(5740 / 40) / math.sqrt(41)
        assert hw == pytest.approx(expected, rel=1e-3)
        assert hw == pytest.approx(5.0596, abs=1e-3)

    def test_zero_variance(self):
        mean, hw = mean_ci([120.0] * 41, 0.99)
        assert (mean, hw) == (120.0, 0.0)

    def test_two_samples_df1(self):
        mean, hw = mean_ci([0.0, 2.0], 0.99)
        assert mean == 1.0
        assert hw == pytest.approx(63.657, abs=1e-3)  # s = sqrt(2), hw = t * 1

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples):
            mean_ci([1.0], 0.99)

    def test_bad_confidence(self):
        with pytest.raises(ValueError):
            mean_ci([1.0, 2.0], 1.0)

    @given(
        st.lists(st.floats(0, 1e6, allow_nan=False), min_size=2, max_size=60),
        st.sampled_from([0.9, 0.95, 0.99]),
    )
    def test_against_scipy_oracle(self, samples, confidence):
        mean, hw = mean_ci(samples, confidence)
        ref_mean = sum(samples) / len(samples)
        assert mean == pytest.approx(ref_mean, rel=1e-9, abs=1e-9)
        assert hw >= 0.0
        s = math.sqrt(
            sum((x - ref_mean) ** 2 for x in samples) / (len(samples) - 1)
        )
        if s > 0:
            ref_hw = scipy.stats.t.ppf((1 + confidence) / 2, len(samples) - 1) * s / math.sqrt(len(samples))
            assert hw == pytest.approx(ref_hw, rel=1e-3)
