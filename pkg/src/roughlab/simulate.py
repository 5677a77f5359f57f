"""Exact fractional Brownian motion sampling and stochastic volatility markets.

fBM increments (fractional Gaussian noise) are drawn by circulant embedding
of the autocovariance, which is exact in distribution and O(n log n). The
embedding is evaluated at an FFT-friendly length and sliced, so prime-sized
requests do not fall into slow Bluestein transforms or their memory spikes.
"""

import threading
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.linalg import cholesky, toeplitz
from scipy.signal import lfilter

from ._validation import check_integer, check_open_unit, check_positive
from .errors import InvalidArgumentError, SimulationFailureError
from .pathvar import SampledPath

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15

# streams carved out of one base seed
STREAM_PRICE = 0
STREAM_VOL = 1

CHOLESKY_MAX_N = 4096
_EIGEN_TOL = -1e-10

_VARIANTS = ("fbm", "abs_bm_vol", "ou_sv", "fou_sv")

_CHUNK = 1 << 22


@dataclass(frozen=True)
class ModelSpec:
    """Market model: price dS = sigma S dB with one of the volatility laws."""

    variant: str
    hurst: float | None = None
    gamma: float = 1.0
    theta: float = 1.0
    sigma0: float = 1.0
    y0: float = 0.0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise InvalidArgumentError(f"variant must be one of {_VARIANTS}, got {self.variant!r}")
        if self.variant in ("fbm", "fou_sv"):
            if self.hurst is None:
                raise InvalidArgumentError(f"variant {self.variant!r} requires a hurst value")
            object.__setattr__(self, "hurst", check_open_unit("hurst", self.hurst))
        check_positive("gamma", self.gamma)
        check_positive("theta", self.theta)
        check_positive("sigma0", self.sigma0)

    @classmethod
    def fbm(cls, hurst):
        return cls(variant="fbm", hurst=hurst)

    @classmethod
    def abs_bm_vol(cls):
        return cls(variant="abs_bm_vol")

    @classmethod
    def ou_sv(cls, gamma=1.0, theta=1.0, sigma0=1.0):
        return cls(variant="ou_sv", gamma=gamma, theta=theta, sigma0=sigma0)

    @classmethod
    def fou_sv(cls, hurst, gamma=1.0, theta=1.0, sigma0=1.0, y0=0.0):
        return cls(variant="fou_sv", hurst=hurst, gamma=gamma, theta=theta, sigma0=sigma0, y0=y0)


@dataclass(frozen=True)
class SimulatedMarket:
    """One model draw: price, log price and spot volatility on a shared grid."""

    price: SampledPath
    spot_vol: SampledPath
    log_price: SampledPath
    seed: int
    model: ModelSpec


def derive_stream_seed(base_seed, stream_id):
    """Collision-resistant 64-bit stream seed (splitmix-style avalanche)."""
    z = ((int(base_seed) ^ _GOLDEN64) + int(stream_id)) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


# Lag where gamma(k) switches from the direct second difference to the series
# tail; past it the difference cancels too many mantissa bits at large 2H.
_AUTOCOV_SERIES_MIN_K = 32
_AUTOCOV_SERIES_TERMS = 8


def _autocov_series_coeffs(two_h):
    """binom(2H, 2j) for j = 1..terms; the even-order Taylor weights of
    (1+x)^2H + (1-x)^2H - 2, all of one sign, so the tail sum never cancels."""
    coeffs = []
    b = 1.0
    for m in range(1, 2 * _AUTOCOV_SERIES_TERMS + 1):
        b *= (two_h - m + 1.0) / m
        if m % 2 == 0:
            coeffs.append(b)
    return coeffs


def _fgn_autocov(H, n):
    """gamma(k) = 0.5 (|k+1|^2H - 2|k|^2H + |k-1|^2H) for k = 0..n, unit step.

    Computed directly only for small k: once k^2H outgrows the 1/k^2-sized
    curvature the subtraction loses the result in rounding noise (order-one
    spectral corruption near k ~ 1e7), so the tail uses the equivalent series
    gamma(k) = sum_j binom(2H, 2j) k^(2H - 2j), exact to double precision
    for k >= 32 with 8 terms.
    """
    out = np.empty(n + 1)
    two_h = 2.0 * H
    head = min(n, _AUTOCOV_SERIES_MIN_K - 1)
    k = np.arange(0, head + 1, dtype=np.float64)
    out[: head + 1] = 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
    if n < _AUTOCOV_SERIES_MIN_K:
        return out
    coeffs = _autocov_series_coeffs(two_h)
    for lo in range(_AUTOCOV_SERIES_MIN_K, n + 1, _CHUNK):
        hi = min(lo + _CHUNK, n + 1)
        k = np.arange(lo, hi, dtype=np.float64)
        inv_sq = 1.0 / (k * k)
        term = k ** (two_h - 2.0)
        acc = coeffs[0] * term
        for c in coeffs[1:]:
            term *= inv_sq
            acc += c * term
        out[lo:hi] = acc
    return out


_sqrt_eigen_cache: dict[tuple[float, int], np.ndarray] = {}
_cache_lock = threading.Lock()
_CACHE_MAX = 2


def _embedding_sqrt_eigen(H, n):
    """sqrt of the circulant embedding eigenvalues for length-n fGN."""
    key = (float(H), int(n))
    with _cache_lock:
        cached = _sqrt_eigen_cache.get(key)
    if cached is not None:
        return cached
    c = np.empty(2 * n)
    c[: n + 1] = _fgn_autocov(H, n)
    c[n + 1 :] = c[n - 1 : 0 : -1]
    lam = sfft.rfft(c, overwrite_x=True).real
    if float(lam.min()) < _EIGEN_TOL:
        raise SimulationFailureError(
            f"circulant embedding is not nonnegative definite for H={H}, n={n}"
        )
    np.clip(lam, 0.0, None, out=lam)
    np.sqrt(lam, out=lam)
    with _cache_lock:
        if len(_sqrt_eigen_cache) >= _CACHE_MAX:
            _sqrt_eigen_cache.pop(next(iter(_sqrt_eigen_cache)))
        _sqrt_eigen_cache[key] = lam
    return lam


def _fgn_embedding(H, n, rng):
    """Unit-step fGN of length n via circulant embedding at an FFT-smooth size."""
    n_fast = sfft.next_fast_len(n, real=True)
    sqrt_lam = _embedding_sqrt_eigen(H, n_fast)  # length n_fast + 1
    m = 2 * n_fast
    z = np.empty(n_fast + 1, dtype=np.complex128)
    z.real[0] = rng.standard_normal()
    z.imag[0] = 0.0
    z.real[-1] = rng.standard_normal()
    z.imag[-1] = 0.0
    z.real[1:-1] = rng.standard_normal(n_fast - 1)
    z.imag[1:-1] = rng.standard_normal(n_fast - 1)
    z[1:-1] /= np.sqrt(2.0)
    z *= sqrt_lam
    out = sfft.irfft(z, n=m, overwrite_x=True)
    del z
    res = out[:n] * np.sqrt(m)
    del out
    return res


def _fgn_cholesky(H, n, rng):
    cov = toeplitz(_fgn_autocov(H, n - 1))
    chol = cholesky(cov, lower=True)
    return chol @ rng.standard_normal(n)


def _fgn(H, n, rng):
    try:
        return _fgn_embedding(H, n, rng)
    except SimulationFailureError:
        if n > CHOLESKY_MAX_N:
            raise SimulationFailureError(
                f"embedding failed and n={n} exceeds the Cholesky fallback cap {CHOLESKY_MAX_N}"
            ) from None
        return _fgn_cholesky(H, n, rng)


def simulate_fbm(H, n_steps, horizon=1.0, seed=0):
    """Fractional Brownian motion on the uniform grid with n_steps intervals."""
    H = check_open_unit("H", H)
    n_steps = check_integer("n_steps", n_steps, minimum=2)
    horizon = check_positive("horizon", horizon)
    rng = np.random.default_rng(derive_stream_seed(seed, STREAM_PRICE))
    g = _fgn(H, n_steps, rng)
    g *= (horizon / n_steps) ** H
    values = np.empty(n_steps + 1)
    values[0] = 0.0
    np.cumsum(g, out=values[1:])
    return SampledPath(np.linspace(0.0, horizon, n_steps + 1), values)


def _ou_exact(gamma, theta, n, dt, rng, y0=0.0):
    a = np.exp(-gamma * dt)
    b = theta * np.sqrt((1.0 - np.exp(-2.0 * gamma * dt)) / (2.0 * gamma))
    z = rng.standard_normal(n)
    y = np.empty(n + 1)
    y[0] = y0
    y[1:], _ = lfilter([b], [1.0, -a], z, zi=np.array([a * y0]))
    return y


def _fou_euler(model, n, dt, rng):
    g = _fgn(model.hurst, n, rng)
    g *= dt**model.hurst
    y = np.empty(n + 1)
    y[0] = model.y0
    a = 1.0 - model.gamma * dt
    y[1:], _ = lfilter([model.theta], [1.0, -a], g, zi=np.array([a * model.y0]))
    return y


def _spot_vol(model, n_steps, dt, rng):
    if model.variant == "abs_bm_vol":
        z = rng.standard_normal(n_steps)
        z *= np.sqrt(dt)
        sig = np.empty(n_steps + 1)
        sig[0] = 0.0
        np.cumsum(z, out=sig[1:])
        np.abs(sig, out=sig)
        return sig
    if model.variant == "ou_sv":
        y = _ou_exact(model.gamma, model.theta, n_steps, dt, rng, y0=0.0)
    else:
        y = _fou_euler(model, n_steps, dt, rng)
    np.exp(y, out=y)
    y *= model.sigma0
    return y


def simulate_market(model, n_steps, horizon=1.0, seed=0):
    """Draw one market: spot volatility stream plus an independent price stream."""
    if not isinstance(model, ModelSpec):
        raise InvalidArgumentError("model must be a ModelSpec")
    if model.variant == "fbm":
        raise InvalidArgumentError("fbm has no volatility component; use simulate_fbm")
    n_steps = check_integer("n_steps", n_steps, minimum=2)
    horizon = check_positive("horizon", horizon)
    dt = horizon / n_steps

    vol_rng = np.random.default_rng(derive_stream_seed(seed, STREAM_VOL))
    sig = _spot_vol(model, n_steps, dt, vol_rng)

    price_rng = np.random.default_rng(derive_stream_seed(seed, STREAM_PRICE))
    x = np.empty(n_steps + 1)
    x[0] = 0.0
    sqrt_dt = np.sqrt(dt)
    for lo in range(0, n_steps, _CHUNK):
        hi = min(lo + _CHUNK, n_steps)
        db = price_rng.standard_normal(hi - lo)
        db *= sqrt_dt
        s = sig[lo:hi]
        db *= s
        db -= (0.5 * dt) * s * s
        np.cumsum(db, out=x[lo + 1 : hi + 1])
        x[lo + 1 : hi + 1] += x[lo]
    del db

    times = np.linspace(0.0, horizon, n_steps + 1)
    log_price = SampledPath(times, x)
    price = SampledPath(times, np.exp(x))
    spot_vol = SampledPath(times, sig)
    return SimulatedMarket(
        price=price,
        spot_vol=spot_vol,
        log_price=log_price,
        seed=int(seed),
        model=model,
    )
