"""Monte Carlo harness for the packaged simulation studies.

Each study fans out over seeded paths, estimates roughness per path, and
reduces to quantile summaries plus fixed-bin histograms. Reports are
reproducible for any worker count: path seeds derive from the base seed by
index and results are reduced in index order.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import check_integer, check_positive
from .errors import (
    DegenerateBlockError,
    ExperimentFailureError,
    InsufficientDataError,
    InvalidArgumentError,
    NoCrossingError,
    NoValidKError,
    RoughlabError,
    SimulationFailureError,
)
from .estimator import estimate_roughness
from .pathvar import SampledPath
from .simulate import ModelSpec, SimulatedMarket, derive_stream_seed, simulate_fbm, simulate_market
from .volatility import _window_starts, realized_vol_series, spot_vol_series, window_vol_series

HIST_BINS = 40

# Horizon used by the volatility studies. The realized/spot estimates of the
# mean-reverting models depend on how many mean-reversion times the window
# spans; this value is calibrated against the packaged validation targets
# (tests/test_acceptance.py). The |W|-vol model is horizon invariant.
SV_DEFAULT_HORIZON = 4.5

IV_MODES = ("window_rms", "point")


@dataclass(frozen=True)
class SummaryStats:
    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float
    n: int


@dataclass(frozen=True)
class RawRow:
    model: str
    hurst: float | None
    seed: int
    target: float | None
    h_rv: float | None
    h_iv: float | None
    status: str


@dataclass(frozen=True)
class CellSummary:
    model: str
    hurst: float | None
    column: str
    stats: SummaryStats


@dataclass(frozen=True)
class CellHistogram:
    model: str
    hurst: float | None
    column: str
    counts: np.ndarray  # HIST_BINS uniform bins on [0, 1]


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    config: dict
    rows: list
    summaries: list
    histograms: list
    wall_time: float


@dataclass(frozen=True)
class KPoint:
    K: int
    h_hat: float | None
    note: str


def quantiles(samples):
    """Five-number summary plus mean, linear-interpolation quantiles."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise InvalidArgumentError("quantiles need at least one sample")
    qs = np.quantile(samples, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return SummaryStats(
        min=float(qs[0]),
        q1=float(qs[1]),
        median=float(qs[2]),
        mean=float(samples.mean()),
        q3=float(qs[3]),
        max=float(qs[4]),
        n=int(samples.size),
    )


def _failure_status(exc):
    if isinstance(exc, NoCrossingError):
        return "no_crossing"
    if isinstance(exc, DegenerateBlockError):
        return "degenerate_block"
    if isinstance(exc, NoValidKError):
        return "no_valid_k"
    if isinstance(exc, InsufficientDataError):
        return "insufficient_data"
    if isinstance(exc, SimulationFailureError):
        return "simulation_failure"
    return "error"


def _map_ordered(fn, tasks, threads):
    threads = check_integer("threads", threads, minimum=1)
    if threads == 1:
        return [fn(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _histogram(values):
    counts, _ = np.histogram(np.asarray(values, dtype=np.float64), bins=HIST_BINS, range=(0.0, 1.0))
    return counts


def _summarize_cells(rows, cell_keys, columns):
    summaries, histograms = [], []
    for model, hurst in cell_keys:
        cell_rows = [r for r in rows if r.model == model and r.hurst == hurst]
        for column in columns:
            vals = [getattr(r, "h_" + column) for r in cell_rows]
            vals = [v for v in vals if v is not None]
            if vals:
                summaries.append(CellSummary(model, hurst, column, quantiles(vals)))
                histograms.append(CellHistogram(model, hurst, column, _histogram(vals)))
    return summaries, histograms


def _check_failure_share(report):
    failed = sum(1 for r in report.rows if r.status != "ok")
    if failed > 0.1 * len(report.rows):
        raise ExperimentFailureError(
            f"{failed} of {len(report.rows)} paths failed (more than 10%)",
            report=report,
        )


def run_fbm_study(H_list, L=90000, K=300, n_paths=50, base_seed=0, threads=1, horizon=1.0, method="single_t"):
    """Estimator accuracy across Hurst values on simulated fBM paths.

    The estimate of each directly observed path is reported in the h_iv
    column; h_rv is reserved for windowed realized volatility estimates.
    """
    H_list = [float(h) for h in H_list]
    if not H_list:
        raise InvalidArgumentError("H_list must be non-empty")
    n_paths = check_integer("n_paths", n_paths, minimum=1)
    started = time.perf_counter()
    tasks = [
        (cell_idx, H, derive_stream_seed(base_seed, cell_idx * n_paths + i))
        for cell_idx, H in enumerate(H_list)
        for i in range(n_paths)
    ]

    def one(task):
        _, H, seed = task
        try:
            path = simulate_fbm(H, L, horizon=horizon, seed=seed)
            est = estimate_roughness(path, K, method=method)
            return RawRow("fbm", H, seed, H, None, est.h_hat, "ok")
        except RoughlabError as exc:
            return RawRow("fbm", H, seed, H, None, None, _failure_status(exc))

    rows = _map_ordered(one, tasks, threads)
    summaries, histograms = _summarize_cells(rows, [("fbm", H) for H in H_list], ("iv",))
    report = ExperimentReport(
        name="fbm-table",
        config={
            "H_list": H_list,
            "L": L,
            "K": K,
            "n_paths": n_paths,
            "base_seed": base_seed,
            "horizon": horizon,
            "method": method,
        },
        rows=rows,
        summaries=summaries,
        histograms=histograms,
        wall_time=time.perf_counter() - started,
    )
    _check_failure_share(report)
    return report


def _coerce_model(model):
    if isinstance(model, ModelSpec):
        return model
    if isinstance(model, str):
        return ModelSpec(variant=model.replace("-", "_"))
    raise InvalidArgumentError("model must be a ModelSpec or a variant name")


def _market_row(model, L, K, window, horizon, seed, iv_mode, method):
    n_steps = (L + 1) * window
    target = model.hurst if model.variant == "fou_sv" else 0.5
    try:
        market = simulate_market(model, n_steps, horizon=horizon, seed=seed)
    except RoughlabError as exc:
        return RawRow(model.variant, model.hurst, seed, target, None, None, _failure_status(exc))
    rv = realized_vol_series(market.log_price, window=window, step=window, normalized=True)
    status = "ok"
    h_rv = h_iv = None
    try:
        h_rv = estimate_roughness(rv.as_path(), K, method=method).h_hat
    except RoughlabError as exc:
        status = _failure_status(exc)
    try:
        if iv_mode == "point":
            starts = _window_starts(market.log_price.n_intervals, window, window)
            iv_path = SampledPath(market.log_price.times[starts], spot_vol_series(market, rv))
        else:
            iv_path = SampledPath(rv.times, window_vol_series(market, rv))
        h_iv = estimate_roughness(iv_path, K, method=method).h_hat
    except RoughlabError as exc:
        status = _failure_status(exc) if status == "ok" else status
    del market
    return RawRow(model.variant, model.hurst, seed, target, h_rv, h_iv, status)


def run_sv_study(
    model,
    L=90000,
    K=300,
    window=300,
    n_paths=100,
    base_seed=0,
    threads=1,
    horizon=SV_DEFAULT_HORIZON,
    iv_mode="window_rms",
    method="single_t",
):
    """Roughness of realized vs instantaneous volatility for one market model.

    Markets are simulated with (L+1)*window fine steps so the non-overlapping
    window series has L+1 points and the estimator runs at (L, K) on both
    columns. iv_mode picks what the IV column estimates: the root mean square
    of spot volatility over each window (window_rms, what realized volatility
    measures) or spot volatility sampled at window left endpoints (point).
    """
    model = _coerce_model(model)
    if model.variant == "fbm":
        raise InvalidArgumentError("fbm is not a volatility model; use run_fbm_study")
    if iv_mode not in IV_MODES:
        raise InvalidArgumentError(f"iv_mode must be one of {IV_MODES}, got {iv_mode!r}")
    n_paths = check_integer("n_paths", n_paths, minimum=1)
    check_positive("horizon", horizon)
    started = time.perf_counter()
    seeds = [derive_stream_seed(base_seed, i) for i in range(n_paths)]
    rows = _map_ordered(
        lambda seed: _market_row(model, L, K, window, horizon, seed, iv_mode, method),
        seeds,
        threads,
    )
    summaries, histograms = _summarize_cells(rows, [(model.variant, model.hurst)], ("rv", "iv"))
    report = ExperimentReport(
        name="sv-table",
        config={
            "model": model.variant,
            "hurst": model.hurst,
            "L": L,
            "K": K,
            "window": window,
            "n_paths": n_paths,
            "base_seed": base_seed,
            "horizon": horizon,
            "iv_mode": iv_mode,
            "method": method,
        },
        rows=rows,
        summaries=summaries,
        histograms=histograms,
        wall_time=time.perf_counter() - started,
    )
    _check_failure_share(report)
    return report


def run_fou_sweep(
    H_grid,
    n_paths=20,
    L=90000,
    K=300,
    base_seed=0,
    threads=1,
    window=300,
    horizon=SV_DEFAULT_HORIZON,
    iv_mode="point",
    method="single_t",
):
    """RV and IV roughness of the fractional OU volatility model across Hurst values.

    The default iv_mode is point: the sweep tracks how well the estimator
    recovers the spot path's own roughness H, which window averaging masks.
    """
    H_grid = [float(h) for h in H_grid]
    if not H_grid:
        raise InvalidArgumentError("H_grid must be non-empty")
    if iv_mode not in IV_MODES:
        raise InvalidArgumentError(f"iv_mode must be one of {IV_MODES}, got {iv_mode!r}")
    n_paths = check_integer("n_paths", n_paths, minimum=1)
    started = time.perf_counter()
    tasks = []
    for cell_idx, H in enumerate(H_grid):
        model = ModelSpec.fou_sv(H)
        for i in range(n_paths):
            tasks.append((model, derive_stream_seed(base_seed, cell_idx * n_paths + i)))
    rows = _map_ordered(
        lambda task: _market_row(task[0], L, K, window, horizon, task[1], iv_mode, method),
        tasks,
        threads,
    )
    summaries, histograms = _summarize_cells(rows, [("fou_sv", H) for H in H_grid], ("rv", "iv"))
    report = ExperimentReport(
        name="fou-sweep",
        config={
            "H_grid": H_grid,
            "L": L,
            "K": K,
            "window": window,
            "n_paths": n_paths,
            "base_seed": base_seed,
            "horizon": horizon,
            "iv_mode": iv_mode,
            "method": method,
        },
        rows=rows,
        summaries=summaries,
        histograms=histograms,
        wall_time=time.perf_counter() - started,
    )
    _check_failure_share(report)
    return report


def run_k_sensitivity(path_or_market, K_grid, method="single_t"):
    """Estimate h_hat across block counts; non-divisors are skipped with a note."""
    if isinstance(path_or_market, SimulatedMarket):
        path = path_or_market.log_price
    elif isinstance(path_or_market, SampledPath):
        path = path_or_market
    else:
        raise InvalidArgumentError("expected a SampledPath or SimulatedMarket")
    n = path.n_intervals
    points = []
    usable = 0
    for K in K_grid:
        K = int(K)
        if K < 1 or n % K != 0:
            points.append(KPoint(K, None, f"skipped: {K} does not divide {n}"))
            continue
        usable += 1
        try:
            est = estimate_roughness(path, K, method=method)
            points.append(KPoint(K, est.h_hat, ""))
        except NoCrossingError:
            points.append(KPoint(K, None, "degenerate: statistic carries no crossing"))
        except RoughlabError as exc:
            points.append(KPoint(K, None, _failure_status(exc)))
    if usable == 0:
        raise InvalidArgumentError("no K in the grid divides the interval count")
    return points


def _fmt_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_value(v) for v in row) + "\n")


def write_report_csvs(report, prefix):
    """Write raw, summary and histogram CSVs; returns the file paths."""
    paths = {}
    raw_path = f"{prefix}_raw.csv"
    _write_csv(
        raw_path,
        ["model", "hurst", "seed", "target", "h_rv", "h_iv", "status"],
        [(r.model, r.hurst, r.seed, r.target, r.h_rv, r.h_iv, r.status) for r in report.rows],
    )
    paths["raw"] = raw_path
    summary_path = f"{prefix}_summary.csv"
    _write_csv(
        summary_path,
        ["model", "hurst", "column", "n", "min", "q1", "median", "mean", "q3", "max"],
        [
            (
                s.model,
                s.hurst,
                s.column,
                s.stats.n,
                s.stats.min,
                s.stats.q1,
                s.stats.median,
                s.stats.mean,
                s.stats.q3,
                s.stats.max,
            )
            for s in report.summaries
        ],
    )
    paths["summary"] = summary_path
    hist_path = f"{prefix}_hist.csv"
    hist_rows = []
    edges = np.linspace(0.0, 1.0, HIST_BINS + 1)
    for h in report.histograms:
        for b in range(HIST_BINS):
            hist_rows.append((h.model, h.hurst, h.column, b, edges[b], edges[b + 1], int(h.counts[b])))
    _write_csv(
        hist_path,
        ["model", "hurst", "column", "bin", "bin_left", "bin_right", "count"],
        hist_rows,
    )
    paths["hist"] = hist_path
    return paths


def write_k_sensitivity_csv(points, path):
    _write_csv(path, ["K", "h_hat", "note"], [(p.K, p.h_hat, p.note) for p in points])
    return path
