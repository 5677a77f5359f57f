"""p-th variation sums and the normalized p-th variation statistic W.

W(L, K, pi, p, t, X) splits the L fine intervals into K coarse blocks of
m = L/K intervals each and sums, over coarse intervals [T_i, T_{i+1}] with
T_{i+1} <= t,

    |X(T_{i+1}) - X(T_i)|^p / sum_block |dX|^p * (T_{i+1} - T_i).

Everything is computed in log space: increments^p underflows and overflows
double precision for the p = 1/h values the estimator sweeps.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import all_finite, as_float_array, check_integer, check_positive, is_strictly_increasing
from .errors import DegenerateBlockError, InvalidArgumentError
from .partitions import TIME_ATOL

DEFAULT_H_GRID = np.round(np.arange(0.01, 0.9901, 0.002), 10)
DEFAULT_H_GRID.setflags(write=False)

_GUARD_LOG = np.log(1e-300)


@dataclass(frozen=True)
class SampledPath:
    """A signal observed on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = as_float_array(self.times, "times", min_len=2)
        values = as_float_array(self.values, "values", min_len=2)
        if times.size != values.size:
            raise InvalidArgumentError(
                f"times and values must have equal length, got {times.size} and {values.size}"
            )
        if not is_strictly_increasing(times):
            raise InvalidArgumentError("times must be strictly increasing")
        if not all_finite(values):
            raise InvalidArgumentError("values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_intervals(self):
        return self.times.size - 1

    @property
    def horizon(self):
        return float(self.times[-1])

    @classmethod
    def from_values(cls, values, horizon=1.0):
        """Wrap plain samples on the uniform grid over [0, horizon]."""
        values = as_float_array(values, "values", min_len=2)
        return cls(np.linspace(0.0, horizon, values.size), values)


@dataclass(frozen=True)
class StatisticCurve:
    """W evaluated on a grid of candidate roughness values h = 1/p."""

    h_grid: np.ndarray
    w_values: np.ndarray
    log_w_values: np.ndarray  # kept alongside: exp() saturates where W over/underflows
    t_eval: float
    block_count: int
    sample_count: int

    def __post_init__(self):
        h = as_float_array(self.h_grid, "h_grid", min_len=1)
        if not is_strictly_increasing(h) and h.size > 1:
            raise InvalidArgumentError("h_grid must be strictly increasing")
        if h[0] <= 0.0 or h[-1] > 1.0:
            raise InvalidArgumentError("h_grid values must lie in (0, 1]")
        object.__setattr__(self, "h_grid", h)
        object.__setattr__(self, "w_values", np.asarray(self.w_values, dtype=np.float64))
        object.__setattr__(self, "log_w_values", np.asarray(self.log_w_values, dtype=np.float64))

    @property
    def finite_mask(self):
        return np.isfinite(self.w_values)


def _normalize_block(path, block):
    n = path.n_intervals
    if isinstance(block, range):
        start, stop, step = block.start, block.stop, block.step
        if step != 1:
            raise InvalidArgumentError("block range must have step 1")
    elif isinstance(block, (tuple, list)) and len(block) == 2:
        start, stop = block
    else:
        raise InvalidArgumentError("block must be a range or a (start, stop) pair of interval indices")
    start = check_integer("block start", start, minimum=0)
    stop = check_integer("block stop", stop, minimum=start + 1, maximum=n)
    return start, stop


def pvar_sum(path, block, p):
    """Sum of |increment|^p over a contiguous range of fine intervals."""
    p = check_positive("p", p)
    start, stop = _normalize_block(path, block)
    d = np.abs(np.diff(path.values[start : stop + 1]))
    return float(np.sum(d**p))


class _BlockData:
    """Per-path precomputation shared by every p the statistic is evaluated at."""

    __slots__ = ("sh", "mx", "lc", "ldt", "coarse_times", "m", "zero_blocks")

    def __init__(self, path, K):
        n = path.n_intervals
        K = check_integer("K", K, minimum=1)
        if n % K != 0:
            raise InvalidArgumentError(f"K={K} does not divide the interval count {n}")
        m = n // K
        d = np.abs(np.diff(path.values))
        with np.errstate(divide="ignore"):
            la = np.log(d).reshape(K, m)
        self.mx = la.max(axis=1)
        self.zero_blocks = ~np.isfinite(self.mx)
        # shift each block by its max so exp(p * sh) never overflows
        with np.errstate(invalid="ignore"):
            np.subtract(la, self.mx[:, None], out=la)
        if self.zero_blocks.any():
            la[self.zero_blocks, :] = -np.inf
        self.sh = la
        coarse_vals = path.values[::m]
        with np.errstate(divide="ignore"):
            self.lc = np.log(np.abs(np.diff(coarse_vals)))
        self.coarse_times = path.times[::m]
        self.ldt = np.log(np.diff(self.coarse_times))
        self.m = m

    def used_blocks(self, t):
        j = int(np.searchsorted(self.coarse_times, t + TIME_ATOL, side="right")) - 1
        return max(j, 0)

    def log_terms(self, p, guard, out=None, work=None):
        """log of each block's contribution at exponent p; -inf where the numerator vanishes."""
        if work is None or work.shape != self.sh.shape:
            work = np.empty_like(self.sh)
        np.multiply(self.sh, p, out=work)
        np.exp(work, out=work)
        s = work.sum(axis=1)
        with np.errstate(divide="ignore"):
            log_den = p * self.mx + np.log(s)
        if guard:
            log_den = np.logaddexp(log_den, _GUARD_LOG)
            log_den[self.zero_blocks] = _GUARD_LOG
        with np.errstate(invalid="ignore"):
            terms = p * self.lc - log_den + self.ldt
        # all-zero block: numerator is 0 too, the guarded term contributes nothing
        terms[self.zero_blocks] = -np.inf if guard else np.nan
        if out is not None:
            out[:] = terms
            return out
        return terms


def _logsumexp(a):
    if a.size == 0:
        return -np.inf
    mx = float(np.max(a))
    if not np.isfinite(mx):
        return mx
    return mx + float(np.log(np.sum(np.exp(a - mx))))


def _check_degenerate(blocks, j, guard):
    if guard:
        return
    bad = np.nonzero(blocks.zero_blocks[:j])[0]
    if bad.size:
        raise DegenerateBlockError(int(bad[0]))


def normalized_pvar_statistic(path, K, p, t=None, zero_denominator_guard=False):
    """W(L, K, pi, p, t, X) for one exponent p."""
    p = check_positive("p", p)
    if t is None:
        t = path.horizon
    if not (path.times[0] - TIME_ATOL <= t <= path.times[-1] + TIME_ATOL):
        raise InvalidArgumentError(f"t={t!r} outside the sampled range")
    blocks = _BlockData(path, K)
    j = blocks.used_blocks(t)
    _check_degenerate(blocks, j, zero_denominator_guard)
    terms = blocks.log_terms(p, zero_denominator_guard)
    return float(np.exp(_logsumexp(terms[:j])))


def statistic_curve(path, K, h_grid=None, t=None, zero_denominator_guard=False):
    """Evaluate W across a grid of candidate roughness values h = 1/p."""
    if h_grid is None:
        h_grid = DEFAULT_H_GRID
    h_grid = as_float_array(h_grid, "h_grid", min_len=1)
    if h_grid.size > 1 and not is_strictly_increasing(h_grid):
        raise InvalidArgumentError("h_grid must be strictly increasing")
    if h_grid[0] <= 0.0 or h_grid[-1] > 1.0:
        raise InvalidArgumentError("h_grid values must lie in (0, 1]")
    if t is None:
        t = path.horizon
    if not (path.times[0] - TIME_ATOL <= t <= path.times[-1] + TIME_ATOL):
        raise InvalidArgumentError(f"t={t!r} outside the sampled range")
    blocks = _BlockData(path, K)
    j = blocks.used_blocks(t)
    _check_degenerate(blocks, j, zero_denominator_guard)
    logw = np.empty(h_grid.size)
    work = np.empty_like(blocks.sh)
    terms = np.empty(blocks.mx.size)
    for i, h in enumerate(h_grid):
        blocks.log_terms(1.0 / h, zero_denominator_guard, out=terms, work=work)
        logw[i] = _logsumexp(terms[:j])
    with np.errstate(over="ignore"):
        w = np.exp(logw)
    return StatisticCurve(
        h_grid=h_grid,
        w_values=w,
        log_w_values=logw,
        t_eval=float(t),
        block_count=int(K),
        sample_count=int(path.n_intervals),
    )
