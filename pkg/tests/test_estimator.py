import numpy as np
import pytest

from roughlab import (
    InsufficientDataError,
    InvalidArgumentError,
    NoCrossingError,
    NoValidKError,
    SampledPath,
    default_block_count,
    estimate_roughness,
    log_regression_estimate,
    mq_delta,
    simulate_fbm,
)


class TestDefaultBlockCount:
    def test_reference_sizes(self):
        assert default_block_count(16) == 4
        assert default_block_count(90000) == 300
        assert default_block_count(4000000) == 2000

    def test_nearest_divisor(self):
        # sqrt(90001) is not a divisor; 90001 = 7 * 13 * 23 * 43
        assert default_block_count(90000) == 300
        assert default_block_count(2500) == 50

    def test_no_valid_k(self):
        with pytest.raises(NoValidKError):
            default_block_count(9998)  # 2 * 4999, no divisor near sqrt


@pytest.fixture(scope="module")
def fbm03():
    return simulate_fbm(0.3, 90000, seed=7)


class TestEstimateRoughness:

    def test_fbm_h03_single_t(self, fbm03):
        est = estimate_roughness(fbm03, K=300)
        assert est.h_hat == pytest.approx(0.3, abs=0.05)
        assert est.p_hat == pytest.approx(1.0 / est.h_hat)
        assert est.method == "single_t"
        assert est.K == 300
        assert est.L == 90000
        assert est.residual >= 0.0

    def test_cross_method_agreement(self, fbm03):
        st = estimate_roughness(fbm03, K=300)
        ls = estimate_roughness(fbm03, K=300, method="least_squares")
        assert abs(st.h_hat - ls.h_hat) <= 0.02
        assert ls.method == "least_squares"

    def test_brownian_crossing_near_half(self):
        path = simulate_fbm(0.5, 90000, seed=0)
        est = estimate_roughness(path, K=300)
        assert est.h_hat == pytest.approx(0.5, abs=0.1)

    def test_auto_k(self, fbm03):
        est = estimate_roughness(fbm03)
        assert est.K == 300

    def test_scale_and_shift_invariance(self, fbm03):
        base = estimate_roughness(fbm03, K=300).h_hat
        shifted = SampledPath(fbm03.times, 3.0 + 42.0 * fbm03.values)
        assert estimate_roughness(shifted, K=300).h_hat == pytest.approx(base, abs=1e-9)

    def test_ramp_has_no_crossing(self):
        ramp = SampledPath.from_values(np.linspace(0.0, 1.0, 1001))
        with pytest.raises(NoCrossingError) as exc_info:
            estimate_roughness(ramp, K=100)
        assert "log W" in str(exc_info.value)

    def test_k_equals_l_flat_curve(self):
        path = simulate_fbm(0.5, 500, seed=1)
        with pytest.raises(NoCrossingError):
            estimate_roughness(path, K=500)

    def test_ramp_least_squares_boundary(self):
        ramp = SampledPath.from_values(np.linspace(0.0, 1.0, 1001))
        est = estimate_roughness(ramp, K=100, method="least_squares")
        assert est.at_boundary
        assert est.h_hat == pytest.approx(0.99)

    def test_t_restriction(self, fbm03):
        est = estimate_roughness(fbm03, K=300, t=0.5)
        assert est.h_hat == pytest.approx(0.3, abs=0.07)

    def test_t_too_small(self, fbm03):
        with pytest.raises(InvalidArgumentError):
            estimate_roughness(fbm03, K=300, t=1e-6)

    def test_bad_method(self, fbm03):
        with pytest.raises(InvalidArgumentError):
            estimate_roughness(fbm03, K=300, method="bisect")

    def test_custom_h_grid(self, fbm03):
        est = estimate_roughness(fbm03, K=300, h_grid=np.arange(0.05, 0.96, 0.01))
        assert est.h_hat == pytest.approx(0.3, abs=0.05)


class TestMqDelta:
    def test_hand_computed(self):
        assert mq_delta([0.0, 1.0, 0.0, 1.0], 1.0, 1) == pytest.approx(1.0)

    def test_constant_series(self):
        assert mq_delta(np.full(10, 2.0), 2.0, 3) == 0.0

    def test_homogeneity(self):
        rng = np.random.default_rng(0)
        s = rng.standard_normal(200)
        lam, q = 3.5, 1.5
        assert mq_delta(lam * s, q, 2) == pytest.approx(lam**q * mq_delta(s, q, 2), rel=1e-12)

    def test_delta_bounds(self):
        with pytest.raises(InvalidArgumentError):
            mq_delta([0.0, 1.0], 1.0, 2)
        with pytest.raises(InvalidArgumentError):
            mq_delta([0.0, 1.0], 1.0, 0)


class TestLogRegression:
    def test_linear_ramp(self):
        est = log_regression_estimate(np.linspace(0.0, 5.0, 400), delta_grid=range(1, 21))
        assert est.h_hat_r == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(est.xi, est.q_grid, atol=1e-9)

    def test_constant_series(self):
        with pytest.raises(InsufficientDataError):
            log_regression_estimate(np.full(100, 1.0))

    def test_white_noise_near_zero(self):
        rng = np.random.default_rng(5)
        est = log_regression_estimate(rng.standard_normal(5000), delta_grid=range(1, 31))
        assert abs(est.h_hat_r) < 0.05

    def test_delta_grid_validation(self):
        s = np.arange(50.0)
        with pytest.raises(InvalidArgumentError):
            log_regression_estimate(s, delta_grid=[1, 2])
        with pytest.raises(InvalidArgumentError):
            log_regression_estimate(s, delta_grid=[1, 2, 60])
        with pytest.raises(InvalidArgumentError):
            log_regression_estimate(s, q_grid=[-1.0, 1.0])

    def test_zero_moment_lags_excluded(self):
        # period-2 series: even lags carry zero increments and are dropped
        s = np.tile([0.0, 1.0], 50)
        with pytest.warns(UserWarning):
            est = log_regression_estimate(s, delta_grid=[1, 2, 3, 4, 5])
        assert np.isfinite(est.h_hat_r)

    def test_all_even_lags_insufficient(self):
        s = np.tile([0.0, 1.0], 50)
        with pytest.raises(InsufficientDataError):
            log_regression_estimate(s, delta_grid=[2, 4, 6])
