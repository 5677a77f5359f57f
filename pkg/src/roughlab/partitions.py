"""Deterministic partition sequences of a fixed horizon.

All variation statistics are computed along uniform or dyadic refinements;
this module owns their construction and the few geometric predicates the
estimators need.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_array, check_integer, check_positive, is_strictly_increasing
from .errors import InvalidArgumentError

TIME_ATOL = 1e-12

_KINDS = ("uniform", "dyadic")


@dataclass(frozen=True)
class Partition:
    """Strictly increasing grid 0 = t_0 < ... < t_N = T."""

    times: np.ndarray

    def __post_init__(self):
        times = as_float_array(self.times, "times", min_len=2)
        if not is_strictly_increasing(times):
            raise InvalidArgumentError("partition times must be strictly increasing")
        if abs(times[0]) > TIME_ATOL:
            raise InvalidArgumentError("partition must start at 0")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    @property
    def n_intervals(self):
        return self.times.size - 1

    @property
    def horizon(self):
        return float(self.times[-1])


@dataclass(frozen=True)
class PartitionSpec:
    """Family of refining partitions: uniform level n has n intervals, dyadic has 2^n."""

    kind: str = "uniform"
    horizon: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "horizon", check_positive("horizon", self.horizon))


def build(spec, level):
    """Realize the level-n partition of [0, T]."""
    level = check_integer("level", level, minimum=1)
    n = level if spec.kind == "uniform" else 2**level
    return Partition(np.linspace(0.0, spec.horizon, n + 1))


def mesh(p):
    """Largest and smallest interval of a partition."""
    gaps = np.diff(p.times)
    return float(gaps.max()), float(gaps.min())


def restrict(p, t):
    """Interval indices i with t_{i+1} <= t, the maximal complete prefix."""
    if not (-TIME_ATOL <= t <= p.horizon + TIME_ATOL):
        raise InvalidArgumentError(f"t={t!r} outside [0, {p.horizon}]")
    j = int(np.searchsorted(p.times, t + TIME_ATOL, side="right")) - 1
    return range(max(j, 0))


def is_subpartition(coarse, fine):
    """True iff every coarse time occurs in fine, within TIME_ATOL."""
    if abs(coarse.horizon - fine.horizon) > TIME_ATOL:
        raise InvalidArgumentError("partitions live on different horizons")
    idx = np.searchsorted(fine.times, coarse.times)
    idx = np.clip(idx, 0, fine.times.size - 1)
    near_right = np.abs(fine.times[idx] - coarse.times) <= TIME_ATOL
    idx_left = np.clip(idx - 1, 0, fine.times.size - 1)
    near_left = np.abs(fine.times[idx_left] - coarse.times) <= TIME_ATOL
    return bool(np.all(near_right | near_left))
