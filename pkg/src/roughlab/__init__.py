"""Pathwise roughness measurement via normalized p-th variation statistics."""

from .api import LogRegressionEstimator, RealizedVolTransformer, RoughnessEstimator
from .errors import (
    CSVFormatError,
    DegenerateBlockError,
    DegenerateSeriesError,
    ExperimentFailureError,
    InsufficientDataError,
    InvalidArgumentError,
    NoCrossingError,
    NoValidKError,
    RoughlabError,
    SimulationFailureError,
)
from .estimator import (
    RoughnessEstimate,
    LogRegressionEstimate,
    default_block_count,
    estimate_roughness,
    log_regression_estimate,
    mq_delta,
)
from .partitions import Partition, PartitionSpec, build, is_subpartition, mesh, restrict
from .pathvar import (
    DEFAULT_H_GRID,
    SampledPath,
    StatisticCurve,
    normalized_pvar_statistic,
    pvar_sum,
    statistic_curve,
)
from .simulate import ModelSpec, SimulatedMarket, derive_stream_seed, simulate_fbm, simulate_market
from .volatility import (
    RVSeries,
    acf,
    estimation_error,
    realized_variance,
    realized_vol_series,
    spot_vol_series,
    window_vol_series,
)
from .experiments import (
    ExperimentReport,
    run_fbm_study,
    run_fou_sweep,
    run_k_sensitivity,
    run_sv_study,
    write_k_sensitivity_csv,
    write_report_csvs,
)

__version__ = "0.1.0"

__all__ = [
    "CSVFormatError",
    "DEFAULT_H_GRID",
    "DegenerateBlockError",
    "DegenerateSeriesError",
    "ExperimentFailureError",
    "ExperimentReport",
    "InsufficientDataError",
    "InvalidArgumentError",
    "LogRegressionEstimator",
    "LogRegressionEstimate",
    "ModelSpec",
    "NoCrossingError",
    "NoValidKError",
    "Partition",
    "PartitionSpec",
    "RVSeries",
    "RealizedVolTransformer",
    "RoughlabError",
    "RoughnessEstimate",
    "RoughnessEstimator",
    "SampledPath",
    "SimulatedMarket",
    "SimulationFailureError",
    "StatisticCurve",
    "acf",
    "build",
    "default_block_count",
    "derive_stream_seed",
    "estimate_roughness",
    "estimation_error",
    "is_subpartition",
    "log_regression_estimate",
    "mesh",
    "mq_delta",
    "normalized_pvar_statistic",
    "pvar_sum",
    "realized_variance",
    "realized_vol_series",
    "restrict",
    "run_fbm_study",
    "run_fou_sweep",
    "run_k_sensitivity",
    "run_sv_study",
    "simulate_fbm",
    "simulate_market",
    "spot_vol_series",
    "statistic_curve",
    "window_vol_series",
    "write_k_sensitivity_csv",
    "write_report_csvs",
]
