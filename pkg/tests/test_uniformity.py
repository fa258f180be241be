import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from messing.distributions import DomainError, RngState, chi_squared_quantile, std_normal_quantile
from messing.lottery import CountVector, LotteryConfig, simulate_history
from messing.uniformity import (
    NullModel,
    PValueInterval,
    pearson_test,
    sample_chain_report,
    z_test_number,
)


def counts_with_statistic(n, target, pool_size=49, seed=0, tol=0.002):
    """Integer counts summing to n whose iid Pearson statistic is within tol
    of target, by moving single balls between numbers."""
    rng = np.random.default_rng(seed)
    c = np.full(pool_size, n // pool_size)
    c[: n - c.sum()] += 1

    def stat(x):
        return float(((pool_size * x - n) ** 2).sum() / (pool_size * n))

    while abs(stat(c) - target) > tol:
        i, j = rng.choice(pool_size, 2, replace=False)
        trial = c.copy()
        trial[i] += 1
        trial[j] -= 1
        if abs(stat(trial) - target) < abs(stat(c) - target):
            c = trial
    return CountVector(c)


class TestZTest:
    def test_unlucky_13(self):
        r = z_test_number(471, NullModel(49, 6, 26022), "left")
        assert r.statistic_corrected == pytest.approx(-2.7822, abs=1e-3)
        assert r.p_value == pytest.approx(0.00270, abs=5e-5)
        assert r.expected == pytest.approx(531.06, abs=0.005)

    def test_zero_deviation(self):
        r = z_test_number(100, NullModel(49, 6, 4900), "left")
        assert r.statistic_corrected == 0.0 and r.statistic_iid == 0.0
        assert r.p_value == 0.5

    def test_k1_is_iid(self):
        # -2.7822 * sqrt(43/48)
        r = z_test_number(471, NullModel(49, 1, 26022), "left")
        assert r.statistic_corrected == pytest.approx(-2.6334, abs=1e-3)
        assert r.statistic_corrected == r.statistic_iid

    def test_sides(self):
        model = NullModel(49, 6, 26022)
        left = z_test_number(471, model, "left").p_value
        right = z_test_number(471, model, "right").p_value
        two = z_test_number(471, model, "two-sided").p_value
        assert left + right == pytest.approx(1.0, abs=1e-12)
        assert two == pytest.approx(2 * left)
        assert two == pytest.approx(0.0054, abs=1e-4)

    @pytest.mark.parametrize("count, model", [(26023, NullModel(49, 6, 26022)), (-1, NullModel(49, 6, 10))])
    def test_count_domain(self, count, model):
        with pytest.raises(DomainError):
            z_test_number(count, model)

    def test_k_at_least_v(self):
        with pytest.raises(DomainError):
            NullModel(49, 49, 100)

    def test_bad_side(self):
        with pytest.raises(DomainError):
            z_test_number(3, NullModel(49, 6, 10), "up")

    @given(st.integers(3, 100), st.data())
    def test_scaling_identity(self, v, data):
        k = data.draw(st.integers(1, v - 1))
        n = data.draw(st.integers(1, 10**6))
        s = data.draw(st.integers(0, n))
        r = z_test_number(s, NullModel(v, k, n), "left")
        assert r.statistic_corrected == pytest.approx(math.sqrt((v - 1) / (v - k)) * r.statistic_iid, rel=1e-12, abs=1e-12)
        assert r.sigma_k**2 == pytest.approx((v - k) / (v - 1) * r.sigma_iid**2, rel=1e-12)
        assert 0.0 <= r.p_value <= 1.0


class TestPearson:
    def test_uniform_counts(self):
        r = pearson_test(CountVector(np.full(49, 100)), NullModel(49, 6, 4900))
        assert r.statistic_iid == 0.0 and r.statistic_corrected == 0.0
        assert r.p_value == 1.0 and r.df == 48

    def test_sample_one_published(self):
        counts = counts_with_statistic(26022, 55.10)
        r = pearson_test(counts, NullModel(49, 6, 26022))
        assert r.statistic_iid == pytest.approx(55.10, abs=0.005)
        assert r.statistic_corrected == pytest.approx(61.51, abs=0.02)
        assert r.p_value == pytest.approx(0.0911, abs=5e-4)

    def test_sample_three_published(self):
        counts = counts_with_statistic(3615, 48.64, seed=1)
        r = pearson_test(counts, NullModel(49, 1, 3615))
        assert r.statistic_corrected == r.statistic_iid
        assert r.statistic_iid == pytest.approx(48.64, abs=0.005)
        assert r.p_value == pytest.approx(0.447, abs=5e-4)

    def test_total_mismatch(self):
        with pytest.raises(DomainError):
            pearson_test(CountVector(np.full(49, 100)), NullModel(49, 6, 4901))

    def test_pool_mismatch(self):
        with pytest.raises(DomainError):
            pearson_test(CountVector(np.full(48, 100)), NullModel(49, 6, 4800))

    @settings(max_examples=50)
    @given(st.lists(st.integers(0, 2000), min_size=49, max_size=49).filter(lambda c: sum(c) > 0), st.integers(1, 48), st.randoms())
    def test_scaling_and_permutation(self, counts, k, rnd):
        model = NullModel(49, k, sum(counts))
        r = pearson_test(CountVector(np.array(counts)), model)
        assert r.statistic_iid >= 0
        assert r.statistic_corrected == pytest.approx(48 / (49 - k) * r.statistic_iid, rel=1e-10)
        shuffled = list(counts)
        rnd.shuffle(shuffled)
        r2 = pearson_test(CountVector(np.array(shuffled)), model)
        assert r2.statistic_iid == r.statistic_iid and r2.p_value == r.p_value


class TestNullCalibration:
    ALPHA = 0.05

    def test_z_corrected_vs_uncorrected(self, calibration_counts):
        n = 6000
        model = NullModel(49, 6, n)
        z_crit = std_normal_quantile(self.ALPHA)
        results = [z_test_number(int(s), model, "left") for s in calibration_counts[:, 0]]
        corrected = np.mean([r.p_value < self.ALPHA for r in results])
        uncorrected = np.mean([r.statistic_iid < z_crit for r in results])
        assert corrected == pytest.approx(self.ALPHA, abs=0.007)
        assert uncorrected < self.ALPHA - 0.007

    def test_pearson_corrected_vs_uncorrected(self, calibration_counts):
        model = NullModel(49, 6, 6000)
        crit = chi_squared_quantile(1 - self.ALPHA, 48)
        results = [pearson_test(CountVector(row), model) for row in calibration_counts]
        corrected = np.mean([r.p_value < self.ALPHA for r in results])
        uncorrected = np.mean([r.statistic_iid > crit for r in results])
        assert corrected == pytest.approx(self.ALPHA, abs=0.007)
        assert uncorrected < 0.02


class TestChainReport:
    def test_three_rows(self):
        h = simulate_history(LotteryConfig(49, 6, 4337), 3615 / 4337, RngState(13))
        rep = sample_chain_report(h)
        assert [r.sample for r in rep.rows] == ["I", "II", "III"]
        one, two, three = rep.rows
        assert one.n == 26022 and two.n == 29637 and three.n == 3615
        assert one.results[0].draw_size == 6
        assert three.results[0].draw_size == 1
        k7, k6 = two.results
        assert (k7.draw_size, k6.draw_size) == (7, 6)
        assert isinstance(two.p_value, PValueInterval)
        assert two.p_value.low == k7.p_value <= two.p_value.high == k6.p_value
        assert "mixed K" in two.p_value.note
        table = rep.to_table()
        assert "chi2_(7)" in table and "chi2_iid" in table
        assert rep.to_csv().count("\n") == 5

    def test_no_additional(self):
        h = simulate_history(LotteryConfig(49, 6, 100), 0.0, RngState(14))
        rep = sample_chain_report(h)
        assert [r.sample for r in rep.rows] == ["I"]
        assert rep.notices

    def test_null_not_extreme(self):
        cfg = LotteryConfig(49, 6, 10_000)
        calm = 0
        seeds = range(200)
        for s in seeds:
            rep = sample_chain_report(simulate_history(cfg, 0.8335, RngState(s)))
            ps = [rep.rows[0].p_value, rep.rows[1].p_value.low, rep.rows[2].p_value]
            calm += all(p > 0.001 for p in ps)
        assert calm >= 0.99 * len(seeds)
