import numpy as np
import pytest

from roughlab import (
    InvalidArgumentError,
    LogRegressionEstimator,
    RealizedVolTransformer,
    RoughnessEstimator,
    estimate_roughness,
    simulate_fbm,
)


class TestParams:
    def test_get_params(self):
        est = RoughnessEstimator(K=300, method="least_squares")
        params = est.get_params()
        assert params["K"] == 300
        assert params["method"] == "least_squares"
        assert "zero_denominator_guard" in params

    def test_set_params_roundtrip(self):
        est = RoughnessEstimator()
        assert est.set_params(K=50) is est
        assert est.K == 50

    def test_set_params_rejects_unknown(self):
        with pytest.raises(InvalidArgumentError):
            RoughnessEstimator().set_params(bandwidth=3)

    def test_repr_shows_params(self):
        text = repr(RealizedVolTransformer(window=60))
        assert "RealizedVolTransformer" in text
        assert "window=60" in text


class TestRoughnessEstimator:
    def test_fit_matches_functional(self):
        path = simulate_fbm(0.3, 9000, seed=1)
        est = RoughnessEstimator(K=90).fit(path)
        direct = estimate_roughness(path, K=90)
        assert est.h_hat_ == direct.h_hat
        assert est.p_hat_ == direct.p_hat
        assert est.K_ == 90
        assert est.L_ == 9000
        assert est.curve_.h_grid.size == direct.curve.h_grid.size

    def test_fit_accepts_values_array(self):
        path = simulate_fbm(0.5, 2500, seed=2)
        est = RoughnessEstimator(K=50).fit(path.values)
        assert 0.3 < est.h_hat_ < 0.7

    def test_fit_accepts_times_values_tuple(self):
        path = simulate_fbm(0.5, 2500, seed=2)
        est = RoughnessEstimator(K=50).fit((path.times, path.values))
        assert est.h_hat_ == RoughnessEstimator(K=50).fit(path).h_hat_

    def test_predict_batch(self):
        paths = [simulate_fbm(0.5, 2500, seed=s) for s in range(3)]
        preds = RoughnessEstimator(K=50).predict(paths)
        assert preds.shape == (3,)
        assert np.all((preds > 0.3) & (preds < 0.7))


class TestLogRegressionEstimator:
    def test_ramp(self):
        est = LogRegressionEstimator(delta_grid=range(1, 11)).fit(np.linspace(0.0, 2.0, 200))
        assert est.h_hat_r_ == pytest.approx(1.0, abs=1e-9)
        assert est.xi_.size == 5

    def test_log_input_validation(self):
        with pytest.raises(InvalidArgumentError):
            LogRegressionEstimator(log_input=True).fit(np.array([1.0, -1.0, 2.0, 1.0]))

    def test_log_input_applied(self):
        series = np.exp(np.linspace(0.0, 1.0, 150))
        est = LogRegressionEstimator(delta_grid=range(1, 11), log_input=True).fit(series)
        assert est.h_hat_r_ == pytest.approx(1.0, abs=1e-9)


class TestRealizedVolTransformer:
    def test_transform_gbm(self):
        rng = np.random.default_rng(0)
        n, sigma = 90000, 0.2
        inc = sigma * np.sqrt(1.0 / n) * rng.standard_normal(n)
        series = np.concatenate(([0.0], np.cumsum(inc)))
        out = RealizedVolTransformer(window=300).fit_transform(series)
        assert out.size == 300
        assert out.mean() == pytest.approx(sigma, rel=0.05)

    def test_fit_returns_self(self):
        tr = RealizedVolTransformer(window=10)
        assert tr.fit(np.zeros(30)) is tr
