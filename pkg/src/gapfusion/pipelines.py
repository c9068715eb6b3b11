"""End-to-end gap-filling models over (low-fidelity, high-fidelity) pairs.

Seven fill strategies share one result type:

* ``gp_fill``     single-fidelity GP on the HF series alone
* ``wgp_fill``    GP on normal-score warped HF data
* ``mfgp_fill``   two-fidelity GP on raw data
* ``wmfgp_fill``  two-fidelity GP on per-source normal scores
* ``bcmf_fill``   two-fidelity GP on per-source Box-Cox transforms
* ``simple_impute``  k-nearest moving-average baseline
* ``surrogate_discrepancy``  the no-model |HF - LF| benchmark

All GP fills center each series on its training mean before fitting and
restore the offset at prediction. Intervals are 95% prediction intervals:
the latent sd includes the fitted observation-noise variance, so coverage
is meant against noisy held-out observations, not the latent trend.
Warped and Box-Cox variants transform the latent mean and both interval
endpoints through the monotone inverse map, which preserves ordering.
"""

from __future__ import annotations

import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import boxcox_llf

from .errors import DegenerateSampleError, InvalidInputError
from .gp import FitConfig, GPModel, gp_fit, gp_predict
from .mfgp import MFGPModel, NestedDesign, mfgp_fit, mfgp_predict
from .warp import build_warp, inverse_warp

Z95 = 1.96
BOXCOX_GRID = np.linspace(-2.0, 2.0, 401)
SHIFT_EPS = 1e-6


@dataclass(frozen=True)
class FillResult:
    """Gap predictions with 95% intervals, in response units."""

    query: np.ndarray
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    model: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        q = np.asarray(self.query, dtype=float).reshape(-1)
        m = np.asarray(self.mean, dtype=float).reshape(-1)
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if not (q.size == m.size == lo.size == hi.size):
            raise InvalidInputError("FillResult arrays differ in length")
        for name, arr in (("mean", m), ("lower", lo), ("upper", hi)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"FillResult {name} contains non-finite values")
        if np.any(lo > hi):
            raise InvalidInputError("FillResult bounds out of order")
        object.__setattr__(self, "query", q)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def to_csv(self, path) -> None:
        lines = ["timestamp,mean,lower,upper,model"]
        lines.extend(
            f"{float(t)!r},{float(m)!r},{float(lo)!r},{float(hi)!r},{self.model}"
            for t, m, lo, hi in zip(self.query, self.mean, self.lower, self.upper)
        )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


@contextmanager
def _recorded_warnings():
    """Record warnings issued during a fit for the diagnostics dict."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        yield caught


def _interval(mean, var, noise):
    sd = np.sqrt(np.maximum(var + noise, 0.0))
    return mean - Z95 * sd, mean + Z95 * sd


def gp_fill(x, y, query, config: FitConfig | None = None) -> FillResult:
    """Single-fidelity GP fill of the HF series."""
    y = np.asarray(y, dtype=float).reshape(-1)
    center = float(np.mean(y))
    with _recorded_warnings() as caught:
        model = gp_fit(x, y - center, config)
    mean_c, var = gp_predict(model, query)
    lower, upper = _interval(mean_c, var, model.noise_variance)
    return FillResult(
        query=np.asarray(query, dtype=float).reshape(-1),
        mean=mean_c + center,
        lower=lower + center,
        upper=upper + center,
        model="gp",
        diagnostics=_gp_diag(model, caught),
    )


def _gp_diag(model: GPModel, caught) -> dict:
    return {
        "nlml": model.nlml,
        "length_scale": model.kernel.length_scale,
        "signal_variance": model.kernel.signal_variance,
        "noise_variance": model.noise_variance,
        "warnings": [str(w.message) for w in caught],
    }


def _mfgp_diag(model: MFGPModel, caught) -> dict:
    return {
        "nlml": model.nlml,
        "rho": model.rho,
        "noise_lo": model.noise_lo,
        "noise_hi": model.noise_hi,
        "warnings": [str(w.message) for w in caught],
    }


def mfgp_fill(
    design: NestedDesign, query, config: FitConfig | None = None
) -> FillResult:
    """Two-fidelity GP fill on raw (unwarped) data."""
    c_lo = float(np.mean(design.y_lo))
    c_hi = float(np.mean(design.y_hi))
    centered = NestedDesign(
        design.x_lo, design.y_lo - c_lo, design.x_hi, design.y_hi - c_hi
    )
    with _recorded_warnings() as caught:
        model = mfgp_fit(centered, config)
    mean_c, var = mfgp_predict(model, query)
    lower, upper = _interval(mean_c, var, model.noise_hi)
    return FillResult(
        query=np.asarray(query, dtype=float).reshape(-1),
        mean=mean_c + c_hi,
        lower=lower + c_hi,
        upper=upper + c_hi,
        model="mfgp",
        diagnostics=_mfgp_diag(model, caught),
    )


def _warp_source(sample, source: str):
    try:
        return build_warp(np.asarray(sample, dtype=float).reshape(-1), source=source)
    except DegenerateSampleError as exc:
        raise DegenerateSampleError(f"{source} source: {exc}") from exc


def wgp_fill(x, y, query, config: FitConfig | None = None) -> FillResult:
    """GP fill in normal-score space, back-transformed through the table."""
    with _recorded_warnings() as caught:
        scores, table = _warp_source(y, "hf")
        center = float(np.mean(scores))
        model = gp_fit(x, scores - center, config)
    mean_c, var = gp_predict(model, query)
    lat_lo, lat_hi = _interval(mean_c, var, model.noise_variance)
    diag = _gp_diag(model, caught)
    diag["bandwidth"] = table.bandwidth
    return FillResult(
        query=np.asarray(query, dtype=float).reshape(-1),
        mean=inverse_warp(table, mean_c + center),
        lower=inverse_warp(table, lat_lo + center),
        upper=inverse_warp(table, lat_hi + center),
        model="wgp",
        diagnostics=diag,
    )


def wmfgp_fill(
    design: NestedDesign, query, config: FitConfig | None = None
) -> FillResult:
    """Two-fidelity GP fill on per-source normal scores.

    Each source is warped with its own table; the model is fitted on the
    scores; predictions and interval endpoints are mapped back through the
    HF table.
    """
    with _recorded_warnings() as caught:
        scores_lo, table_lo = _warp_source(design.y_lo, "lf")
        scores_hi, table_hi = _warp_source(design.y_hi, "hf")
        c_lo = float(np.mean(scores_lo))
        c_hi = float(np.mean(scores_hi))
        latent = NestedDesign(
            design.x_lo, scores_lo - c_lo, design.x_hi, scores_hi - c_hi
        )
        model = mfgp_fit(latent, config)
    mean_c, var = mfgp_predict(model, query)
    lat_lo, lat_hi = _interval(mean_c, var, model.noise_hi)
    diag = _mfgp_diag(model, caught)
    diag["bandwidth_lf"] = table_lo.bandwidth
    diag["bandwidth_hf"] = table_hi.bandwidth
    return FillResult(
        query=np.asarray(query, dtype=float).reshape(-1),
        mean=inverse_warp(table_hi, mean_c + c_hi),
        lower=inverse_warp(table_hi, lat_lo + c_hi),
        upper=inverse_warp(table_hi, lat_hi + c_hi),
        model="wmfgp",
        diagnostics=diag,
    )


def boxcox(sample):
    """Grid-MLE Box-Cox transform of a positive sample.

    Lambda maximizes the profile log-likelihood over [-2, 2] in steps of
    0.01; returns (lambda, transformed values).
    """
    y = np.asarray(sample, dtype=float).reshape(-1)
    if y.size < 2:
        raise InvalidInputError("boxcox needs at least 2 values")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise InvalidInputError("boxcox requires strictly positive finite values")
    llf = np.array([boxcox_llf(lam, y) for lam in BOXCOX_GRID])
    lam = float(BOXCOX_GRID[int(np.argmax(llf))])
    return lam, _boxcox_apply(y, lam)


def _boxcox_apply(y, lam):
    if lam == 0.0:
        return np.log(y)
    return (np.power(y, lam) - 1.0) / lam


def _boxcox_inverse(z, lam):
    if lam == 0.0:
        return np.exp(z)
    # guard: lam*z + 1 can dip below 0 for wide interval endpoints
    core = np.maximum(lam * np.asarray(z, dtype=float) + 1.0, 1e-12)
    return np.power(core, 1.0 / lam)


def bcmf_fill(
    design: NestedDesign,
    query,
    config: FitConfig | None = None,
    lam: tuple | None = None,
) -> FillResult:
    """Two-fidelity fill in per-source Box-Cox space.

    Each source is shifted by max(0, -min + eps) to be positive, then
    transformed with its own grid-MLE lambda (or the ``lam`` override as
    (lam_lo, lam_hi)); predictions invert the HF transform and shift.
    """
    shift_lo = max(0.0, -float(np.min(design.y_lo)) + SHIFT_EPS)
    shift_hi = max(0.0, -float(np.min(design.y_hi)) + SHIFT_EPS)
    pos_lo = design.y_lo + shift_lo
    pos_hi = design.y_hi + shift_hi
    if lam is None:
        lam_lo, z_lo = boxcox(pos_lo)
        lam_hi, z_hi = boxcox(pos_hi)
    else:
        lam_lo, lam_hi = float(lam[0]), float(lam[1])
        z_lo = _boxcox_apply(pos_lo, lam_lo)
        z_hi = _boxcox_apply(pos_hi, lam_hi)
    c_lo = float(np.mean(z_lo))
    c_hi = float(np.mean(z_hi))
    latent = NestedDesign(design.x_lo, z_lo - c_lo, design.x_hi, z_hi - c_hi)
    with _recorded_warnings() as caught:
        model = mfgp_fit(latent, config)
    mean_c, var = mfgp_predict(model, query)
    lat_lo, lat_hi = _interval(mean_c, var, model.noise_hi)
    diag = _mfgp_diag(model, caught)
    diag["lambda_lf"] = lam_lo
    diag["lambda_hf"] = lam_hi
    return FillResult(
        query=np.asarray(query, dtype=float).reshape(-1),
        mean=_boxcox_inverse(mean_c + c_hi, lam_hi) - shift_hi,
        lower=_boxcox_inverse(lat_lo + c_hi, lam_hi) - shift_hi,
        upper=_boxcox_inverse(lat_hi + c_hi, lam_hi) - shift_hi,
        model="bcmf",
        diagnostics=diag,
    )


def simple_impute(x_obs, y_obs, query, k: int = 24) -> FillResult:
    """Moving-average k-nearest-neighbor fill.

    Each query point gets the mean of its k nearest observed values in
    time (ties to the earlier index); the interval is that point estimate
    plus/minus 1.96 times the sd over the 2k nearest neighbors.
    """
    x = np.asarray(x_obs, dtype=float).reshape(-1)
    y = np.asarray(y_obs, dtype=float).reshape(-1)
    q = np.asarray(query, dtype=float).reshape(-1)
    if x.size != y.size:
        raise InvalidInputError("x_obs and y_obs differ in length")
    if x.size == 0:
        raise InvalidInputError("no observed values to impute from")
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    k_eff = min(k, x.size)
    w_eff = min(2 * k, x.size)
    mean = np.empty(q.size)
    lower = np.empty(q.size)
    upper = np.empty(q.size)
    for i, t in enumerate(q):
        order = np.argsort(np.abs(x - t), kind="stable")
        mean[i] = float(np.mean(y[order[:k_eff]]))
        window = y[order[:w_eff]]
        sd = float(np.std(window, ddof=1)) if window.size > 1 else 0.0
        lower[i] = mean[i] - Z95 * sd
        upper[i] = mean[i] + Z95 * sd
    return FillResult(
        query=q,
        mean=mean,
        lower=lower,
        upper=upper,
        model="si",
        diagnostics={"k": k},
    )


def surrogate_discrepancy(y_hi, y_lo) -> float:
    """Mean absolute HF-LF discrepancy: the no-model benchmark."""
    hi = np.asarray(y_hi, dtype=float).reshape(-1)
    lo = np.asarray(y_lo, dtype=float).reshape(-1)
    if hi.size != lo.size:
        raise InvalidInputError("series differ in length")
    if hi.size == 0:
        raise InvalidInputError("empty gap")
    return float(np.mean(np.abs(hi - lo)))
