"""Shared input validation helpers."""

import numbers

import numpy as np

from .errors import InvalidArgumentError

_CHUNK = 1 << 22


def as_float_array(x, name, min_len=1):
    """Coerce to a 1-D float64 array, rejecting bad shapes and non-numeric data."""
    try:
        arr = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} must be numeric: {exc}") from None
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise InvalidArgumentError(f"{name} must have at least {min_len} entries, got {arr.size}")
    return arr


def check_positive(name, value, allow_zero=False):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise InvalidArgumentError(f"{name} must be a finite real number, got {value!r}")
    if allow_zero:
        if value < 0:
            raise InvalidArgumentError(f"{name} must be >= 0, got {value!r}")
    elif value <= 0:
        raise InvalidArgumentError(f"{name} must be > 0, got {value!r}")
    return float(value)


def check_integer(name, value, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise InvalidArgumentError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise InvalidArgumentError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_open_unit(name, value):
    if not isinstance(value, numbers.Real) or not (0.0 < float(value) < 1.0):
        raise InvalidArgumentError(f"{name} must lie strictly inside (0, 1), got {value!r}")
    return float(value)


def is_strictly_increasing(arr):
    """Chunked monotonicity check; avoids a full-size temporary on long grids."""
    for lo in range(0, arr.size - 1, _CHUNK):
        hi = min(lo + _CHUNK + 1, arr.size)
        seg = arr[lo:hi]
        if not np.all(seg[1:] > seg[:-1]):
            return False
    return True


def all_finite(arr):
    for lo in range(0, arr.size, _CHUNK):
        if not np.all(np.isfinite(arr[lo : lo + _CHUNK])):
            return False
    return True
