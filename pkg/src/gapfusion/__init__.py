"""Gap filling for skewed time series by two-fidelity GP fusion.

The package fits a joint Gaussian process over a high-fidelity (HF)
series and a correlated low-fidelity (LF) series, optionally after a
data-driven Gaussianizing transform of each sample, and uses the joint
posterior to reconstruct long HF gaps with calibrated uncertainty.

Public surface: kernels and single-fidelity GPs (:mod:`gapfusion.gp`),
the two-fidelity model (:mod:`gapfusion.mfgp`), quantile warping
(:mod:`gapfusion.warp`), end-to-end fill pipelines
(:mod:`gapfusion.pipelines`), synthetic data and experiment drivers
(:mod:`gapfusion.simulate`, :mod:`gapfusion.experiments`), evaluation
metrics (:mod:`gapfusion.metrics`), station clustering
(:mod:`gapfusion.clustering`), and CSV ingestion
(:mod:`gapfusion.timeseries`).
"""

from ._version import __version__
from .errors import (
    AdvisoryWarning,
    ConfigError,
    DegenerateSampleError,
    DesignViolationError,
    DuplicateTimestampError,
    FitFailureError,
    GapFusionError,
    InvalidInputError,
    NumericalFailureError,
    PairingError,
    ParameterPathologyError,
    UndefinedReductionError,
)
from .gp import FitConfig, GPModel, gp_fit, gp_predict
from .kernels import KernelParams, cov_matrix
from .mfgp import MFGPModel, NestedDesign, mfgp_fit, mfgp_predict
from .warp import WarpTable, build_warp, inverse_warp
from .metrics import (
    EvalSummary,
    coverage_probability,
    error_reduction,
    eval_point_metrics,
    sample_skewness,
    summarize,
)
from .pipelines import (
    FillResult,
    bcmf_fill,
    gp_fill,
    mfgp_fill,
    simple_impute,
    surrogate_discrepancy,
    wgp_fill,
    wmfgp_fill,
)
from .simulate import (
    CSNParams,
    DEFAULT_TREND,
    ScenarioConfig,
    SharedSpec,
    TrendSpec,
    WEATHER_SHARED,
    WIND_TREND,
    WeibullParams,
    default_scenario,
    sample_csn,
    sample_shared,
    sample_weibull,
    synth_trend,
)
from .experiments import run_random_experiment, run_structural_experiment
from .clustering import Clustering, Station, constrained_kmeans, pair_stations
from .timeseries import (
    GapReport,
    TimeSeries,
    detect_and_classify_gaps,
    hourly_aggregate,
    load_series_csv,
)

__all__ = [
    "__version__",
    "AdvisoryWarning",
    "ConfigError",
    "DegenerateSampleError",
    "DesignViolationError",
    "DuplicateTimestampError",
    "FitFailureError",
    "GapFusionError",
    "InvalidInputError",
    "NumericalFailureError",
    "PairingError",
    "ParameterPathologyError",
    "UndefinedReductionError",
    "FitConfig",
    "GPModel",
    "gp_fit",
    "gp_predict",
    "KernelParams",
    "cov_matrix",
    "MFGPModel",
    "NestedDesign",
    "mfgp_fit",
    "mfgp_predict",
    "WarpTable",
    "build_warp",
    "inverse_warp",
    "EvalSummary",
    "coverage_probability",
    "error_reduction",
    "eval_point_metrics",
    "sample_skewness",
    "summarize",
    "FillResult",
    "bcmf_fill",
    "gp_fill",
    "mfgp_fill",
    "simple_impute",
    "surrogate_discrepancy",
    "wgp_fill",
    "wmfgp_fill",
    "CSNParams",
    "DEFAULT_TREND",
    "ScenarioConfig",
    "SharedSpec",
    "TrendSpec",
    "WEATHER_SHARED",
    "WIND_TREND",
    "WeibullParams",
    "default_scenario",
    "sample_csn",
    "sample_shared",
    "sample_weibull",
    "synth_trend",
    "run_random_experiment",
    "run_structural_experiment",
    "Clustering",
    "Station",
    "constrained_kmeans",
    "pair_stations",
    "GapReport",
    "TimeSeries",
    "detect_and_classify_gaps",
    "hourly_aggregate",
    "load_series_csv",
]
