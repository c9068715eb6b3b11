"""Evaluation statistics for gap-filling experiments.

Point metrics (MAE, bias, error variance), moment-based sample skewness,
prediction-interval coverage, and the error-reduction fraction of a model
relative to the raw surrogate discrepancy. All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSampleError,
    InvalidInputError,
    UndefinedReductionError,
)


@dataclass(frozen=True)
class EvalSummary:
    """One row of experiment results, in response units."""

    mae: float
    bias: float
    variance: float
    coverage: float
    error_reduction: float
    n_points: int

    def __post_init__(self):
        if self.mae < 0:
            raise InvalidInputError("mae must be >= 0")
        if not 0.0 <= self.coverage <= 1.0:
            raise InvalidInputError("coverage must lie in [0, 1]")


def _aligned(a, b, names) -> tuple:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.size != b.size:
        raise InvalidInputError(
            f"{names[0]} ({a.size}) and {names[1]} ({b.size}) differ in length"
        )
    if a.size == 0:
        raise InvalidInputError(f"{names[0]} is empty")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInputError(
            f"{names[0]}/{names[1]} contain non-finite values"
        )
    return a, b


def eval_point_metrics(truth, pred):
    """MAE, bias, and sample variance of the errors pred - truth."""
    truth, pred = _aligned(truth, pred, ("truth", "pred"))
    e = pred - truth
    mae = float(np.mean(np.abs(e)))
    bias = float(np.mean(e))
    variance = float(np.var(e, ddof=1)) if e.size > 1 else 0.0
    return mae, bias, variance


def sample_skewness(x) -> float:
    """Moment skewness m3 / m2^(3/2) with central sample moments."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < 3:
        raise InvalidInputError("skewness needs at least 3 values")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("sample contains non-finite values")
    d = x - x.mean()
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        raise DegenerateSampleError("zero variance sample has no skewness")
    m3 = float(np.mean(d**3))
    return m3 / m2**1.5


def coverage_probability(truth, lower, upper) -> float:
    """Fraction of truth values enclosed by [lower, upper]."""
    truth, lower = _aligned(truth, lower, ("truth", "lower"))
    _, upper = _aligned(truth, upper, ("truth", "upper"))
    if np.any(lower > upper):
        raise InvalidInputError("interval bounds out of order")
    covered = (lower <= truth) & (truth <= upper)
    return float(np.mean(covered))


def error_reduction(model_mae: float, surrogate_mad: float) -> float:
    """Fractional error reduction 1 - model_mae / surrogate_mad."""
    if surrogate_mad <= 0:
        raise UndefinedReductionError(
            "surrogate discrepancy is zero; reduction undefined"
        )
    return 1.0 - model_mae / surrogate_mad


def summarize(truth, pred, lower, upper, surrogate_mad: float) -> EvalSummary:
    """Bundle all metrics for one gap-filling run into an EvalSummary."""
    mae, bias, variance = eval_point_metrics(truth, pred)
    cov = coverage_probability(truth, lower, upper)
    red = error_reduction(mae, surrogate_mad)
    return EvalSummary(
        mae=mae,
        bias=bias,
        variance=variance,
        coverage=cov,
        error_reduction=red,
        n_points=int(np.asarray(truth).size),
    )
