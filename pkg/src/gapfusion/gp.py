"""Single-fidelity Gaussian process regression on time indices.

Zero-mean GP with a stationary kernel and i.i.d. Gaussian observation
noise. Hyperparameters are fitted by multi-start minimization of the
negative log marginal likelihood in log-parameter space. Fitted models are
immutable and safe to share across threads; fitting itself is
single-threaded per model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import FitFailureError, InvalidInputError, NumericalFailureError
from .kernels import KernelParams, cov_matrix, cov_matrix_with_grads

LOG2PI = math.log(2.0 * math.pi)

# Relative jitter ladder tried before a factorization is declared failed.
JITTER_LEVELS = tuple(1e-10 * 10.0**k for k in range(7))  # 1e-10 .. 1e-4


def chol_with_jitter(k: np.ndarray):
    """Lower Cholesky factor of ``k``, adding escalating diagonal jitter.

    Jitter is relative to the mean diagonal of ``k``: first none, then
    1e-10 * mean-diagonal escalating tenfold up to 1e-4 * mean-diagonal.

    Returns
    -------
    (chol, jitter) : (ndarray, float)
        The factor and the absolute jitter that was added.

    Raises
    ------
    NumericalFailureError
        If no level on the ladder produces a positive-definite matrix.
        The attempted relative levels are attached to the error.
    """
    scale = float(np.mean(np.diag(k)))
    if not np.isfinite(scale) or scale <= 0:
        scale = 1.0
    tried = []
    for level in (0.0,) + JITTER_LEVELS:
        tried.append(level)
        try:
            shifted = k if level == 0.0 else k + (level * scale) * np.eye(k.shape[0])
            chol = sla.cholesky(shifted, lower=True, check_finite=False)
            return chol, level * scale
        except (sla.LinAlgError, ValueError):
            continue
    raise NumericalFailureError(
        f"covariance factorization failed after jitter levels {tried}",
        jitter_levels=tried,
    )


def _chol_inverse(chol: np.ndarray) -> np.ndarray:
    """Full inverse of the matrix whose lower Cholesky factor is ``chol``."""
    inv, info = sla.lapack.dpotri(chol, lower=1)
    if info != 0:
        raise NumericalFailureError(f"dpotri failed with info={info}")
    return np.tril(inv) + np.tril(inv, -1).T


def _validate_series(x, y):
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise InvalidInputError(f"inputs ({x.size}) and targets ({y.size}) differ in length")
    if x.size == 0:
        raise InvalidInputError("empty training set")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise InvalidInputError("training data contain non-finite values")
    if x.size > 1 and not np.all(np.diff(x) > 0):
        raise InvalidInputError("train_inputs must be strictly increasing")
    return x, y


@dataclass(frozen=True)
class FitConfig:
    """Settings for multi-start likelihood optimization.

    ``n_starts`` Latin-hypercube starts are drawn over the log-space box
    given by ``ls_bounds`` (hours) and ``var_bounds`` (variances), and one
    extra data-driven start is appended. The kernel nugget is held fixed at
    ``nugget`` during optimization; noise variances are free parameters.
    """

    n_starts: int = 8
    seed: int = 0
    maxiter: int = 200
    ls_bounds: tuple = (1e-2, 1e3)
    var_bounds: tuple = (1e-4, 1e2)
    family: str = "sqexp"
    nugget: float = 0.0


@dataclass(frozen=True)
class GPModel:
    """A fitted (or directly constructed) single-fidelity GP."""

    kernel: KernelParams
    noise_variance: float
    train_inputs: np.ndarray
    train_targets: np.ndarray
    chol_factor: np.ndarray
    alpha: np.ndarray = field(repr=False, default=None)
    nlml: float = float("nan")
    jitter: float = 0.0


def gp_nlml(kernel: KernelParams, noise_variance: float, x, y) -> float:
    """Negative log marginal likelihood of a zero-mean GP.

    Computes ``0.5 y^T K^-1 y + 0.5 log|K| + (N/2) log 2pi`` where K is the
    kernel matrix plus ``noise_variance`` on the diagonal.
    """
    x, y = _validate_series(x, y)
    k = cov_matrix(x, x, kernel)
    k[np.diag_indices_from(k)] += noise_variance
    chol, _ = chol_with_jitter(k)
    alpha = sla.cho_solve((chol, True), y, check_finite=False)
    return float(
        0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * x.size * LOG2PI
    )


def gp_nlml_grad(kernel: KernelParams, noise_variance: float, x, y):
    """NLML and its gradient w.r.t. (length_scale, signal_variance, noise).

    The kernel nugget is treated as a fixed constant.
    """
    x, y = _validate_series(x, y)
    k, dk_dls, dk_dsv = cov_matrix_with_grads(x, x, kernel)
    k[np.diag_indices_from(k)] += noise_variance
    chol, _ = chol_with_jitter(k)
    alpha = sla.cho_solve((chol, True), y, check_finite=False)
    nlml = float(
        0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * x.size * LOG2PI
    )
    # d NLML / d theta = 0.5 tr((K^-1 - alpha alpha^T) dK/dtheta)
    a = _chol_inverse(chol)
    a -= np.outer(alpha, alpha)
    grad = np.array(
        [
            0.5 * np.sum(a * dk_dls),
            0.5 * np.sum(a * dk_dsv),
            0.5 * np.trace(a),
        ]
    )
    return nlml, grad


def gp_build(x, y, kernel: KernelParams, noise_variance: float = 0.0) -> GPModel:
    """Construct a GP model at fixed hyperparameters (no optimization)."""
    x, y = _validate_series(x, y)
    if noise_variance < 0:
        raise InvalidInputError("noise_variance must be >= 0")
    k = cov_matrix(x, x, kernel)
    k[np.diag_indices_from(k)] += noise_variance
    chol, jitter = chol_with_jitter(k)
    alpha = sla.cho_solve((chol, True), y, check_finite=False)
    nlml = float(
        0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * x.size * LOG2PI
    )
    return GPModel(
        kernel=kernel,
        noise_variance=float(noise_variance),
        train_inputs=x,
        train_targets=y,
        chol_factor=chol,
        alpha=alpha,
        nlml=nlml,
        jitter=jitter,
    )


def _acf_length_scale(x: np.ndarray, y: np.ndarray) -> float:
    """Rough length-scale guess from the lag at which autocorrelation halves."""
    span = x[-1] - x[0] if x.size > 1 else 1.0
    yd = y - y.mean()
    var = float(yd @ yd) / y.size
    if var <= 0 or y.size < 8:
        return max(span / 8.0, 1e-2)
    spacing = span / (x.size - 1)
    max_lag = min(y.size // 3, 48)
    for lag in range(1, max_lag + 1):
        c = float(yd[:-lag] @ yd[lag:]) / ((y.size - lag) * var)
        if c < 0.5:
            # sqexp correlation falls to 0.5 at distance 1.177 ls
            return max(spacing * lag / 1.177, 1e-2)
    return max(span / 8.0, 1e-2)


def _data_driven_start(x, y, cfg: FitConfig) -> np.ndarray:
    var = float(np.var(y))
    lo_v, hi_v = cfg.var_bounds
    sv0 = np.clip(var if var > 0 else lo_v, lo_v, hi_v)
    noise0 = np.clip(0.1 * var if var > 0 else lo_v, lo_v, hi_v)
    ls0 = np.clip(_acf_length_scale(x, y), *cfg.ls_bounds)
    return np.log(np.array([ls0, sv0, noise0]))


def _lhs_starts(cfg: FitConfig, ndim: int, lower: np.ndarray, upper: np.ndarray):
    sampler = qmc.LatinHypercube(d=ndim, seed=cfg.seed)
    unit = sampler.random(cfg.n_starts)
    return lower + unit * (upper - lower)


def gp_fit(x, y, config: FitConfig | None = None) -> GPModel:
    """Fit GP hyperparameters by multi-start NLML minimization.

    Length scale, signal variance and noise variance are optimized in
    log-space with L-BFGS-B using analytic gradients; the best of all
    starts is returned, so the returned NLML is no worse than the NLML at
    any start point.
    """
    cfg = config or FitConfig()
    x, y = _validate_series(x, y)
    if x.size < 2:
        raise InvalidInputError("gp_fit needs at least 2 points")

    lower = np.log([cfg.ls_bounds[0], cfg.var_bounds[0], cfg.var_bounds[0]])
    upper = np.log([cfg.ls_bounds[1], cfg.var_bounds[1], cfg.var_bounds[1]])
    starts = list(_lhs_starts(cfg, 3, lower, upper))
    starts.append(np.clip(_data_driven_start(x, y, cfg), lower, upper))

    def objective(log_params):
        ls, sv, noise = np.exp(log_params)
        try:
            kernel = KernelParams(ls, sv, nugget=cfg.nugget, family=cfg.family)
            nlml, grad = gp_nlml_grad(kernel, noise, x, y)
        except NumericalFailureError:
            return 1e25, np.zeros(3)
        if not np.isfinite(nlml):
            return 1e25, np.zeros(3)
        return nlml, grad * np.exp(log_params)  # chain rule to log-space

    best = None
    failures = []
    for start in starts:
        try:
            res = minimize(
                objective,
                start,
                jac=True,
                method="L-BFGS-B",
                bounds=list(zip(lower, upper)),
                options={"maxiter": cfg.maxiter},
            )
        except Exception as exc:  # optimizer-internal failure
            failures.append(str(exc))
            continue
        if not np.isfinite(res.fun) or res.fun >= 1e25:
            failures.append("non-finite objective")
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise FitFailureError(f"all {len(starts)} optimizer starts failed: {failures}")

    ls, sv, noise = np.exp(best.x)
    kernel = KernelParams(ls, sv, nugget=cfg.nugget, family=cfg.family)
    return gp_build(x, y, kernel, noise)


def gp_predict(model: GPModel, query):
    """Predictive mean and variance of the latent function at ``query``.

    Variances are clamped at zero. At a training input of a noise-free
    model the mean reproduces the training target.
    """
    q = np.asarray(query, dtype=float).reshape(-1)
    if q.size and not np.all(np.isfinite(q)):
        raise InvalidInputError("query contains non-finite indices")
    if q.size == 0:
        return np.zeros(0), np.zeros(0)
    k_star = cov_matrix(q, model.train_inputs, model.kernel)
    mean = k_star @ model.alpha
    v = sla.solve_triangular(
        model.chol_factor, k_star.T, lower=True, check_finite=False
    )
    var = model.kernel.prior_variance - np.sum(v * v, axis=0)
    return mean, np.maximum(var, 0.0)


def with_params(model: GPModel, **changes) -> GPModel:
    """Rebuild a model from an existing one with some fields replaced."""
    base = replace(model, **changes)
    return gp_build(
        base.train_inputs, base.train_targets, base.kernel, base.noise_variance
    )
