import numpy as np
import pytest

from roughlab import (
    DEFAULT_H_GRID,
    DegenerateBlockError,
    InvalidArgumentError,
    SampledPath,
    normalized_pvar_statistic,
    pvar_sum,
    simulate_fbm,
    statistic_curve,
)


def brownian(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    inc = rng.standard_normal(n) * np.sqrt(1.0 / n) * scale
    values = np.concatenate(([0.0], np.cumsum(inc)))
    return SampledPath.from_values(values)


class TestSampledPath:
    def test_from_values_grid(self):
        p = SampledPath.from_values([0.0, 1.0, 4.0])
        np.testing.assert_allclose(p.times, [0.0, 0.5, 1.0])
        assert p.n_intervals == 2
        assert p.horizon == 1.0

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            SampledPath(np.array([0.0, 0.5, 0.4]), np.zeros(3))
        with pytest.raises(InvalidArgumentError):
            SampledPath(np.array([0.0, 1.0]), np.array([0.0, np.nan]))
        with pytest.raises(InvalidArgumentError):
            SampledPath(np.array([0.0]), np.array([1.0]))


class TestPvarSum:
    def test_hand_computed(self):
        # increments 1, -0.5, 1 with p=2: 1 + 0.25 + 1
        p = SampledPath.from_values([0.0, 1.0, 0.5, 1.5])
        assert pvar_sum(p, range(3), 2.0) == pytest.approx(2.25, abs=1e-15)

    def test_constant_path(self):
        p = SampledPath.from_values(np.full(11, 3.7))
        assert pvar_sum(p, range(10), 2.0) == 0.0
        assert pvar_sum(p, range(10), 0.5) == 0.0

    def test_single_interval_p1(self):
        p = SampledPath.from_values([0.0, -2.5])
        assert pvar_sum(p, range(1), 1.0) == pytest.approx(2.5)

    def test_subrange(self):
        p = SampledPath.from_values([0.0, 1.0, 0.5, 1.5])
        assert pvar_sum(p, range(1, 3), 2.0) == pytest.approx(1.25)
        assert pvar_sum(p, (0, 1), 2.0) == pytest.approx(1.0)


class TestNormalizedStatistic:
    def test_block_identity_k_equals_l(self):
        # one fine interval per block collapses each ratio to 1 exactly
        for seed in range(3):
            rng = np.random.default_rng(seed)
            n = 500
            p = SampledPath.from_values(np.cumsum(rng.standard_normal(n + 1)))
            w = normalized_pvar_statistic(p, K=n, p=2.0)
            assert abs(w - 1.0) <= 1e-12 * n

    def test_scale_invariance_exact(self):
        p = brownian(9000, seed=4)
        scaled = SampledPath(p.times, p.values * 137.5)
        w1 = normalized_pvar_statistic(p, K=90, p=2.5)
        w2 = normalized_pvar_statistic(scaled, K=90, p=2.5)
        assert w1 == pytest.approx(w2, rel=1e-12)

    def test_brownian_near_t(self):
        # p=2 on Brownian paths: statistic concentrates at t (mean checked over seeds)
        ws = [
            normalized_pvar_statistic(brownian(90000, seed=s), K=300, p=2.0)
            for s in range(20)
        ]
        assert np.mean(ws) == pytest.approx(1.0, abs=0.05)

    def test_fbm_h03_q2_small(self):
        # q=2 is below 1/H for H=0.3, so the statistic decays toward zero
        path = simulate_fbm(0.3, 90000, seed=0)
        w = normalized_pvar_statistic(path, K=300, p=2.0)
        assert w < 0.2

    def test_t_restriction(self):
        p = brownian(1000, seed=1)
        w_half = normalized_pvar_statistic(p, K=100, p=2.0, t=0.5)
        w_full = normalized_pvar_statistic(p, K=100, p=2.0)
        assert 0.0 < w_half < w_full

    def test_t_before_first_block(self):
        p = brownian(1000, seed=1)
        assert normalized_pvar_statistic(p, K=100, p=2.0, t=0.001) == 0.0

    def test_k_must_divide(self):
        p = brownian(1000, seed=0)
        with pytest.raises(InvalidArgumentError):
            normalized_pvar_statistic(p, K=7, p=2.0)

    def test_degenerate_block(self):
        values = np.zeros(101)
        values[50:] = np.linspace(0.0, 1.0, 51)  # first block has zero variation
        p = SampledPath.from_values(values)
        with pytest.raises(DegenerateBlockError) as exc_info:
            normalized_pvar_statistic(p, K=2, p=2.0)
        assert exc_info.value.block_index == 0

    def test_degenerate_block_guard(self):
        values = np.zeros(101)
        values[50:] = np.linspace(0.0, 1.0, 51)
        p = SampledPath.from_values(values)
        w = normalized_pvar_statistic(p, K=2, p=2.0, zero_denominator_guard=True)
        assert np.isfinite(w)
        assert w > 0.0


class TestStatisticCurve:
    def test_single_point_matches_scalar(self):
        p = brownian(900, seed=2)
        h = 0.5
        curve = statistic_curve(p, K=30, h_grid=[h])
        scalar = normalized_pvar_statistic(p, K=30, p=1.0 / h)
        assert curve.w_values[0] == pytest.approx(scalar, rel=1e-12)
        assert curve.h_grid.size == 1

    def test_default_grid(self):
        p = brownian(900, seed=2)
        curve = statistic_curve(p, K=30)
        np.testing.assert_allclose(curve.h_grid, DEFAULT_H_GRID)
        assert curve.h_grid.size == 491
        assert curve.block_count == 30
        assert curve.sample_count == 900  # interval count L

    def test_log_w_decreasing_in_h(self):
        # smaller h means larger p; on a Brownian path the curve falls with h
        p = brownian(90000, seed=3)
        curve = statistic_curve(p, K=300, h_grid=np.arange(0.1, 0.95, 0.05))
        finite = curve.log_w_values[curve.finite_mask]
        assert np.all(np.diff(finite) < 0.0)

    def test_grid_validation(self):
        p = brownian(900, seed=2)
        with pytest.raises(InvalidArgumentError):
            statistic_curve(p, K=30, h_grid=[0.5, 0.4])
        with pytest.raises(InvalidArgumentError):
            statistic_curve(p, K=30, h_grid=[0.0, 0.5])
        with pytest.raises(InvalidArgumentError):
            statistic_curve(p, K=30, h_grid=[0.5, 1.1])
        # h = 1 (p = 1) is the closed upper edge and stays legal
        assert statistic_curve(p, K=30, h_grid=[1.0]).w_values.size == 1
