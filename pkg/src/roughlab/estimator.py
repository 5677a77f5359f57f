"""Roughness estimators.

Two families:

* the block estimator h_hat solving W(L, K, pi, 1/h, T, X) = T, read off a
  statistic curve either at the terminal time (single_t) or by least squares
  across all coarse block endpoints;
* the moment-scaling regression h_hat_r from m(q, delta) ~ C_q delta^(xi_q),
  xi_q ~ q * H.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_array, check_integer, check_positive
from .errors import (
    InsufficientDataError,
    InvalidArgumentError,
    NoCrossingError,
    NoValidKError,
)
from .pathvar import (
    DEFAULT_H_GRID,
    SampledPath,
    StatisticCurve,
    _BlockData,
    _check_degenerate,
    _logsumexp,
)

DEFAULT_Q_GRID = (0.5, 1.0, 1.5, 2.0, 3.0)
DEFAULT_DELTA_GRID = tuple(range(1, 51))

_METHODS = ("single_t", "least_squares")

# |W(1/h_hat, T) - T| after interpolating the crossing on the default grid
SOLVER_TOL = 1e-3

_FLAT_ATOL = 1e-12


@dataclass(frozen=True)
class RoughnessEstimate:
    h_hat: float
    p_hat: float
    curve: StatisticCurve
    method: str
    K: int
    L: int
    residual: float
    at_boundary: bool = False


@dataclass(frozen=True)
class LogRegressionEstimate:
    q_grid: np.ndarray
    delta_grid: np.ndarray
    xi: np.ndarray
    intercepts: np.ndarray
    h_hat_r: float


def default_block_count(L):
    """Divisor of L nearest sqrt(L) within [floor(sqrt L)/2, 2 floor(sqrt L)]."""
    L = check_integer("L", L, minimum=4)
    root = math.isqrt(L)
    lo, hi = math.floor(root) / 2.0, 2.0 * math.floor(root)
    target = math.sqrt(L)
    best = None
    for d in range(1, root + 1):
        if L % d:
            continue
        for cand in (d, L // d):
            if lo <= cand <= hi:
                key = (abs(cand - target), -cand)  # tie: prefer the larger divisor
                if best is None or key < best[0]:
                    best = (key, cand)
    if best is None:
        raise NoValidKError(
            f"no divisor of L={L} lies within [{lo:g}, {hi:g}]; choose K explicitly"
        )
    return best[1]


def _interp_crossing(h_grid, y):
    """First sign change of y on the grid, linearly interpolated in (h, y)."""
    finite_pair = ~(np.isnan(y[:-1]) | np.isnan(y[1:]))
    sb = np.signbit(y)
    flips = np.nonzero((sb[:-1] != sb[1:]) & finite_pair)[0]
    exact = np.nonzero(y == 0.0)[0]
    first_flip = flips[0] if flips.size else None
    first_exact = exact[0] if exact.size else None
    if first_exact is not None and (first_flip is None or first_exact <= first_flip):
        return float(h_grid[first_exact])
    if first_flip is None:
        return None
    i = first_flip
    y0, y1 = y[i], y[i + 1]
    if not np.isfinite(y0) or not np.isfinite(y1):
        # crossing into a saturated region: clamp to the finite endpoint
        return float(h_grid[i] if np.isfinite(y0) else h_grid[i + 1])
    frac = (0.0 - y0) / (y1 - y0)
    return float(h_grid[i] + frac * (h_grid[i + 1] - h_grid[i]))


def estimate_roughness(
    path,
    K=None,
    h_grid=None,
    method="single_t",
    t=None,
    zero_denominator_guard=False,
):
    """Estimate the roughness index of a sampled path from its statistic curve."""
    if method not in _METHODS:
        raise InvalidArgumentError(f"method must be one of {_METHODS}, got {method!r}")
    L = path.n_intervals
    if K is None:
        K = default_block_count(L)
    if h_grid is None:
        h_grid = DEFAULT_H_GRID
    h_grid = as_float_array(h_grid, "h_grid", min_len=2)
    if t is None:
        t = path.horizon

    blocks = _BlockData(path, K)
    j = blocks.used_blocks(t)
    if j < 1:
        raise InvalidArgumentError("t leaves no complete coarse block; increase t")
    _check_degenerate(blocks, j, zero_denominator_guard)
    duration = float(blocks.coarse_times[j] - blocks.coarse_times[0])
    rel_t = np.cumsum(np.diff(blocks.coarse_times[: j + 1]))

    logw = np.empty(h_grid.size)
    objective = np.empty(h_grid.size)
    work = np.empty_like(blocks.sh)
    for i, h in enumerate(h_grid):
        terms = blocks.log_terms(1.0 / h, zero_denominator_guard, work=work)[:j]
        logw[i] = _logsumexp(terms)
        if method == "least_squares":
            with np.errstate(over="ignore"):
                cum_w = np.cumsum(np.exp(terms))
            diff = cum_w - rel_t
            objective[i] = float(np.dot(diff, diff)) if np.all(np.isfinite(diff)) else np.inf
    with np.errstate(over="ignore"):
        w = np.exp(logw)
    curve = StatisticCurve(
        h_grid=h_grid,
        w_values=w,
        log_w_values=logw,
        t_eval=float(t),
        block_count=int(K),
        sample_count=int(L),
    )

    y = logw - np.log(duration)
    finite_y = y[np.isfinite(y)]
    if finite_y.size and np.all(np.abs(finite_y) <= _FLAT_ATOL):
        raise NoCrossingError(
            curve,
            "statistic equals t for every exponent; blocks of one interval carry no "
            "roughness information (K equals the interval count?)",
        )

    at_boundary = False
    if method == "single_t":
        h_hat = _interp_crossing(h_grid, y)
        if h_hat is None:
            raise NoCrossingError(curve)
        terms = blocks.log_terms(1.0 / h_hat, zero_denominator_guard, work=work)[:j]
        residual = abs(float(np.exp(_logsumexp(terms))) - duration)
    else:
        if not np.isfinite(objective).any():
            raise NoCrossingError(curve, "least-squares objective is non-finite everywhere")
        i_star = int(np.nanargmin(objective))
        h_hat = float(h_grid[i_star])
        residual = float(objective[i_star])
        if i_star == 0 or i_star == h_grid.size - 1:
            at_boundary = True
        elif np.all(np.isfinite(objective[i_star - 1 : i_star + 2])):
            y0, y1, y2 = objective[i_star - 1 : i_star + 2]
            denom = y0 - 2.0 * y1 + y2
            if denom > 0:
                offset = 0.5 * (y0 - y2) / denom
                h_hat = float(h_hat + offset * (h_grid[i_star + 1] - h_grid[i_star]))

    return RoughnessEstimate(
        h_hat=float(h_hat),
        p_hat=1.0 / float(h_hat),
        curve=curve,
        method=method,
        K=int(K),
        L=int(L),
        residual=residual,
        at_boundary=at_boundary,
    )


def mq_delta(series, q, delta):
    """Empirical q-th absolute moment of lag-delta increments, 1/(n - delta) normalization."""
    series = as_float_array(series, "series", min_len=2)
    q = check_positive("q", q)
    delta = check_integer("delta", delta, minimum=1, maximum=series.size - 1)
    inc = np.abs(series[delta:] - series[:-delta])
    return float(np.mean(inc**q))


def log_regression_estimate(series, q_grid=None, delta_grid=None):
    """Slope-of-slopes estimate: per-q OLS of log m(q, delta) on log delta, then
    a through-origin regression of xi_q on q."""
    series = as_float_array(series, "series", min_len=3)
    q_grid = as_float_array(DEFAULT_Q_GRID if q_grid is None else q_grid, "q_grid", min_len=1)
    if np.any(q_grid <= 0):
        raise InvalidArgumentError("q_grid values must be > 0")
    deltas = np.asarray(DEFAULT_DELTA_GRID if delta_grid is None else delta_grid)
    if deltas.ndim != 1 or deltas.size < 3:
        raise InvalidArgumentError("delta_grid needs at least 3 lags")
    if np.any(deltas < 1) or np.any(deltas >= series.size) or np.any(deltas != deltas.astype(int)):
        raise InvalidArgumentError("delta_grid lags must be integers in [1, len(series))")
    deltas = deltas.astype(int)

    # |increment| moments once per lag, powers once per (q, lag)
    mvals = np.empty((q_grid.size, deltas.size))
    for k, d in enumerate(deltas):
        inc = np.abs(series[d:] - series[:-d])
        for i, q in enumerate(q_grid):
            mvals[i, k] = np.mean(inc**q)

    xi = np.empty(q_grid.size)
    intercepts = np.empty(q_grid.size)
    log_d = np.log(deltas.astype(float))
    for i, q in enumerate(q_grid):
        usable = mvals[i] > 0.0
        if usable.sum() < deltas.size:
            warnings.warn(
                f"excluded {int((~usable).sum())} zero moments from the q={q:g} regression",
                stacklevel=2,
            )
        if usable.sum() < 3:
            raise InsufficientDataError(q)
        x = log_d[usable]
        yv = np.log(mvals[i][usable])
        xc = x - x.mean()
        slope = float(np.dot(xc, yv - yv.mean()) / np.dot(xc, xc))
        xi[i] = slope
        intercepts[i] = float(yv.mean() - slope * x.mean())

    h_hat_r = float(np.dot(q_grid, xi) / np.dot(q_grid, q_grid))
    return LogRegressionEstimate(
        q_grid=q_grid,
        delta_grid=deltas,
        xi=xi,
        intercepts=intercepts,
        h_hat_r=h_hat_r,
    )
