"""Estimator-object front end with sklearn-style fit/transform semantics.

Thin stateful wrappers over the functional ops, for use in pipelines and
grid searches. Parameters are constructor arguments; fitted results land in
trailing-underscore attributes.
"""

import inspect

import numpy as np

from ._validation import as_float_array
from .errors import InvalidArgumentError
from .estimator import estimate_roughness, log_regression_estimate
from .pathvar import SampledPath
from .volatility import realized_vol_series


class _ParamsMixin:
    """get_params/set_params over the constructor signature."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise InvalidArgumentError(
                    f"invalid parameter {name!r} for {type(self).__name__}; valid: {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def _as_path(X):
    if isinstance(X, SampledPath):
        return X
    if isinstance(X, tuple) and len(X) == 2:
        return SampledPath(X[0], X[1])
    return SampledPath.from_values(as_float_array(X, "X", min_len=2))


class RoughnessEstimator(_ParamsMixin):
    """Block-normalized variation estimator of a path's roughness index."""

    def __init__(self, K=None, method="single_t", h_grid=None, t=None, zero_denominator_guard=False):
        self.K = K
        self.method = method
        self.h_grid = h_grid
        self.t = t
        self.zero_denominator_guard = zero_denominator_guard

    def fit(self, X, y=None):
        est = estimate_roughness(
            _as_path(X),
            K=self.K,
            h_grid=self.h_grid,
            method=self.method,
            t=self.t,
            zero_denominator_guard=self.zero_denominator_guard,
        )
        self.estimate_ = est
        self.h_hat_ = est.h_hat
        self.p_hat_ = est.p_hat
        self.curve_ = est.curve
        self.residual_ = est.residual
        self.K_ = est.K
        self.L_ = est.L
        return self

    def predict(self, paths):
        """h_hat per path for an iterable of paths or value arrays."""
        return np.array(
            [
                estimate_roughness(
                    _as_path(p),
                    K=self.K,
                    h_grid=self.h_grid,
                    method=self.method,
                    t=self.t,
                    zero_denominator_guard=self.zero_denominator_guard,
                ).h_hat
                for p in paths
            ]
        )


class LogRegressionEstimator(_ParamsMixin):
    """Moment-scaling regression roughness estimator."""

    def __init__(self, q_grid=None, delta_grid=None, log_input=False):
        self.q_grid = q_grid
        self.delta_grid = delta_grid
        self.log_input = log_input

    def fit(self, X, y=None):
        series = as_float_array(X, "X", min_len=3)
        if self.log_input:
            if np.any(series <= 0):
                raise InvalidArgumentError("log_input requires strictly positive values")
            series = np.log(series)
        est = log_regression_estimate(series, q_grid=self.q_grid, delta_grid=self.delta_grid)
        self.estimate_ = est
        self.h_hat_r_ = est.h_hat_r
        self.xi_ = est.xi
        self.intercepts_ = est.intercepts
        return self


class RealizedVolTransformer(_ParamsMixin):
    """Map a log-price series to its windowed realized volatility series."""

    def __init__(self, window=300, step=None, normalized=True):
        self.window = window
        self.step = step
        self.normalized = normalized

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        path = _as_path(X)
        rv = realized_vol_series(
            path, window=self.window, step=self.step, normalized=self.normalized
        )
        return rv.values

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)
