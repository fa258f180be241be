import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from messing.distributions import DegenerateSampleError, DomainError, RngState, sample_student_t
from messing.normality import (
    STATISTICS,
    analytic_snoop_size,
    gamma_from_moments,
    gamma_statistics,
    moment_stats,
    normality_tests,
    rejections,
    selected_moment,
)

# Symmetric, kurtosis exactly 3: 8 (1 + c^4) = 6 (1 + c^2)^2 at c = 1 + sqrt 2.
C = 1 + math.sqrt(2)
NULL_PERFECT = [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, C, -C]

samples = arrays(
    np.float64,
    st.integers(4, 60),
    elements=st.floats(-1e3, 1e3, allow_nan=False),
).filter(lambda x: np.ptp(x) > 1e-3 * max(1.0, np.abs(x).max()))


class TestMomentStats:
    def test_three_points(self):
        ms = moment_stats([-1.0, 0.0, 1.0])
        assert ms.mean == 0.0
        assert ms.d == pytest.approx(math.sqrt(2 / 3), abs=1e-15)
        assert ms.skew == pytest.approx(0.0, abs=1e-15)
        assert ms.kurt == pytest.approx(1.5, abs=1e-14)

    def test_constant(self):
        with pytest.raises(DegenerateSampleError):
            moment_stats([2.0] * 10)

    def test_too_short(self):
        with pytest.raises(DomainError):
            moment_stats([1.0, 2.0])

    def test_gaussian(self):
        ms = moment_stats(RngState(21).generator().standard_normal(1_000_000))
        assert ms.skew == pytest.approx(0.0, abs=0.01)
        assert ms.kurt == pytest.approx(3.0, abs=0.02)

    @given(samples, st.floats(0.01, 100), st.floats(-100, 100))
    def test_affine_invariance(self, x, a, b):
        m0, m1 = moment_stats(x), moment_stats(a * x + b)
        assert m1.skew == pytest.approx(m0.skew, abs=1e-10)
        assert m1.kurt == pytest.approx(m0.kurt, abs=1e-10 * max(1.0, m0.kurt))

    @given(samples)
    def test_moment_inequality(self, x):
        ms = moment_stats(x)
        assert ms.d > 0
        assert ms.kurt >= 1 + ms.skew**2 - 1e-9


class TestNormalityTests:
    def test_perfect_null_sample(self):
        r = normality_tests(NULL_PERFECT)
        for name in STATISTICS:
            assert getattr(r, name) == pytest.approx(0.0, abs=1e-12)
        assert r.p_values["jb"] == pytest.approx(1.0, abs=1e-12)

    def test_tie_goes_to_skew(self):
        assert selected_moment(0.0, 0.0) == "skew"
        assert selected_moment(2.5, 2.5) == "skew"
        assert selected_moment(1.0, 2.0) == "kurt"

    def test_plug_in(self):
        g1, g2 = gamma_from_moments(1000, 0.2, 3.0)
        assert g1 == pytest.approx(1000 * 0.04 / 6)
        assert g1 == pytest.approx(6.667, abs=1e-3)
        assert g2 == 0.0
        assert g1 + g2 == pytest.approx(6.667, abs=1e-3)

    def test_matches_moment_formulas(self):
        x = RngState(22).generator().exponential(size=500)
        ms = moment_stats(x)
        r = normality_tests(x, 0.05)
        assert r.gamma1_sq == pytest.approx(500 * ms.skew**2 / 6, rel=1e-12)
        assert r.gamma2_sq == pytest.approx(500 * (ms.kurt - 3) ** 2 / 24, rel=1e-12)
        assert r.selected == ("skew" if r.gamma1_sq >= r.gamma2_sq else "kurt")
        assert r.rejected["jb"]

    @given(samples, st.floats(0.001, 0.5))
    def test_invariants(self, x, alpha):
        r = normality_tests(x, alpha)
        assert r.jb == r.gamma1_sq + r.gamma2_sq
        assert r.gamma_max_sq == max(r.gamma1_sq, r.gamma2_sq)
        assert r.gamma_min_sq == min(r.gamma1_sq, r.gamma2_sq)
        assert r.gamma_min_sq <= r.jb / 2 <= r.gamma_max_sq
        assert all(0.0 <= p <= 1.0 for p in r.p_values.values())
        # naive chi2(1) p-values for the selected statistics
        assert r.p_values["gamma_max_sq"] == min(r.p_values["gamma1_sq"], r.p_values["gamma2_sq"])

    @given(samples, st.floats(0.01, 100).flatmap(lambda a: st.sampled_from([a, -a])), st.floats(-100, 100))
    def test_affine_invariance_of_statistics(self, x, a, b):
        r0, r1 = normality_tests(x), normality_tests(a * x + b)
        for name in STATISTICS:
            assert getattr(r1, name) == pytest.approx(getattr(r0, name), rel=1e-9, abs=1e-9)

    def test_needs_four(self):
        with pytest.raises(DomainError):
            normality_tests([1.0, 2.0, 4.0])

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5])
    def test_alpha_domain(self, alpha):
        with pytest.raises(DomainError):
            normality_tests(NULL_PERFECT, alpha)

    def test_t10_kurtosis_dominates(self):
        wins = 0
        seeds = range(50)
        for s in seeds:
            r = normality_tests(sample_student_t(10, RngState(s), 1_000_000))
            wins += r.gamma2_sq > r.gamma1_sq
        assert wins / len(seeds) > 0.99


class TestVectorised:
    def test_rows_match_scalar(self):
        x = RngState(23).generator().standard_t(5, size=(20, 300))
        g1, g2 = gamma_statistics(x)
        for row, a, b in zip(x, g1, g2):
            r = normality_tests(row)
            assert a == pytest.approx(r.gamma1_sq, rel=1e-10)
            assert b == pytest.approx(r.gamma2_sq, rel=1e-10)

    def test_rejection_dominance(self):
        x = RngState(24).generator().standard_normal((2000, 50))
        rej = rejections(*gamma_statistics(x), 0.05)
        assert np.all(rej["gamma_min_sq"] <= rej["gamma1_sq"])
        assert np.all(rej["gamma1_sq"] <= rej["gamma_max_sq"])
        assert np.all(rej["gamma_min_sq"] <= rej["gamma2_sq"])
        assert np.all(rej["gamma2_sq"] <= rej["gamma_max_sq"])


class TestAnalyticSizes:
    def test_five_percent(self):
        s = analytic_snoop_size(0.05)
        assert s.size_max == pytest.approx(0.0975, abs=1e-15)
        assert s.size_min == pytest.approx(0.0025, abs=1e-15)

    def test_boundary(self):
        s = analytic_snoop_size(0.0)
        assert (s.size_max, s.size_min) == (0.0, 0.0)

    def test_ten_percent(self):
        s = analytic_snoop_size(0.10)
        assert s.size_max == pytest.approx(0.19)
        assert s.size_min == pytest.approx(0.01)

    @pytest.mark.parametrize("alpha", [-0.1, 1.1, math.nan])
    def test_domain(self, alpha):
        with pytest.raises(DomainError):
            analytic_snoop_size(alpha)

    @given(st.floats(0, 1))
    def test_union_intersection(self, alpha):
        s = analytic_snoop_size(alpha)
        # P(A or B) + P(A and B) = P(A) + P(B) for independent level-alpha events
        assert s.size_max + s.size_min == pytest.approx(2 * alpha)
        assert s.size_min <= alpha <= s.size_max + 1e-15
