"""Realized variance and volatility series, spot alignment, and error diagnostics."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_float_array, check_integer, is_strictly_increasing
from .errors import DegenerateSeriesError, InvalidArgumentError
from .partitions import TIME_ATOL
from .pathvar import SampledPath

DEFAULT_WINDOW = 300


@dataclass(frozen=True)
class RVSeries:
    """Realized volatility per window of m fine intervals.

    times are window right endpoints; normalized series divide by the square
    root of the window duration so values estimate spot volatility directly.
    """

    times: np.ndarray
    values: np.ndarray
    window_len: int
    step: int
    normalized: bool

    def __post_init__(self):
        times = as_float_array(self.times, "times", min_len=1)
        values = as_float_array(self.values, "values", min_len=1)
        if times.size != values.size:
            raise InvalidArgumentError("times and values must have equal length")
        if times.size > 1 and not is_strictly_increasing(times):
            raise InvalidArgumentError("window times must be strictly increasing")
        if np.any(values < 0):
            raise InvalidArgumentError("realized volatility values must be >= 0")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def as_path(self):
        """View the series as a SampledPath for the roughness estimators."""
        return SampledPath(self.times, self.values)


def realized_variance(log_price, t=None):
    """Sum of squared log-price increments over intervals with right endpoint <= t."""
    if t is None:
        t = log_price.horizon
    if not (log_price.times[0] - TIME_ATOL <= t <= log_price.times[-1] + TIME_ATOL):
        raise InvalidArgumentError(f"t={t!r} outside the sampled range")
    j = int(np.searchsorted(log_price.times, t + TIME_ATOL, side="right")) - 1
    if j < 1:
        return 0.0
    d = np.diff(log_price.values[: j + 1])
    return float(np.dot(d, d))


def _window_starts(n_increments, m, step):
    n_windows = (n_increments - m) // step + 1
    return np.arange(n_windows, dtype=np.intp) * step


def realized_vol_series(log_price, window=DEFAULT_WINDOW, step=None, normalized=True):
    """Realized volatility over sliding or non-overlapping windows of fine intervals."""
    n = log_price.n_intervals
    m = check_integer("window", window, minimum=2, maximum=n)
    step = m if step is None else check_integer("step", step, minimum=1)
    d = np.diff(log_price.values)
    np.multiply(d, d, out=d)
    starts = _window_starts(n, m, step)
    if step == m:
        sums = d[: starts.size * m].reshape(starts.size, m).sum(axis=1)
    else:
        c = np.empty(n + 1)
        c[0] = 0.0
        np.cumsum(d, out=c[1:])
        sums = c[starts + m] - c[starts]
        del c
    del d
    np.maximum(sums, 0.0, out=sums)  # cumsum differences can round below zero
    values = np.sqrt(sums)
    t_right = log_price.times[starts + m]
    if normalized:
        values = values / np.sqrt(t_right - log_price.times[starts])
    return RVSeries(
        times=t_right,
        values=values,
        window_len=m,
        step=step,
        normalized=bool(normalized),
    )


def _check_alignment(market, rv):
    n = market.log_price.n_intervals
    starts = _window_starts(n, rv.window_len, rv.step)
    if starts.size != rv.values.size:
        raise InvalidArgumentError("rv series does not align with the market grid")
    expected = market.log_price.times[starts + rv.window_len]
    tol = max(TIME_ATOL, 1e-9 * market.log_price.horizon)
    if not np.allclose(expected, rv.times, rtol=0.0, atol=tol):
        raise InvalidArgumentError("rv window endpoints do not match the market grid")
    return starts


def spot_vol_series(market, rv):
    """Spot volatility sampled at each rv window's left endpoint, aligned 1:1."""
    starts = _check_alignment(market, rv)
    return market.spot_vol.values[starts].copy()


def window_vol_series(market, rv):
    """Root mean square of spot volatility over each rv window, aligned 1:1.

    This is the volatility level the window's realized volatility actually
    estimates; point sampling at the window edge differs on rough paths.
    """
    starts = _check_alignment(market, rv)
    s2 = market.spot_vol.values[:-1] ** 2
    m = rv.window_len
    if rv.step == m:
        out = s2[: starts.size * m].reshape(starts.size, m).mean(axis=1)
    else:
        c = np.empty(s2.size + 1)
        c[0] = 0.0
        np.cumsum(s2, out=c[1:])
        out = (c[starts + m] - c[starts]) / m
    del s2
    np.maximum(out, 0.0, out=out)
    return np.sqrt(out)


def estimation_error(rv, spot, log_scale=False):
    """Difference of realized and spot volatility, elementwise or in logs."""
    spot = as_float_array(spot, "spot", min_len=1)
    if spot.size != rv.values.size:
        raise InvalidArgumentError(
            f"length mismatch: rv has {rv.values.size} windows, spot has {spot.size}"
        )
    if log_scale:
        if np.any(rv.values <= 0) or np.any(spot <= 0):
            raise InvalidArgumentError("log-scale errors need strictly positive values")
        return np.log(rv.values) - np.log(spot)
    if not rv.normalized:
        raise InvalidArgumentError("linear estimation error requires a normalized rv series")
    return rv.values - spot


def acf(series, max_lag):
    """Sample autocorrelation at lags 0..max_lag."""
    series = as_float_array(series, "series", min_len=2)
    max_lag = check_integer("max_lag", max_lag, minimum=0)
    if series.size <= max_lag + 1:
        raise InvalidArgumentError("series must be longer than max_lag + 1")
    x = series - series.mean()
    c0 = float(np.dot(x, x))
    if c0 == 0.0:
        raise DegenerateSeriesError("series has zero variance")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(np.dot(x[:-k], x[k:])) / c0
    return out
