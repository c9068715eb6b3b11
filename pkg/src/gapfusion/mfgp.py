"""Two-fidelity autoregressive Gaussian process fusion.

The high-fidelity series is modeled as a scaled copy of the low-fidelity
latent process plus an independent discrepancy process:

    u_H(x) = rho * u_L(x) + delta(x)

Both processes carry stationary kernels; each fidelity has its own
observation noise. The joint covariance over stacked [y_L; y_H]
observations couples the fidelities through rho, so low-fidelity data
inform high-fidelity predictions inside long observation gaps.

Seven parameters are estimated: two per kernel (length scale, signal
variance), two noise variances, and rho. Kernel nuggets are structural
constants, not fitted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import (
    AdvisoryWarning,
    DesignViolationError,
    FitFailureError,
    InvalidInputError,
    NumericalFailureError,
)
from .gp import LOG2PI, FitConfig, _chol_inverse, chol_with_jitter
from .kernels import KernelParams, cov_matrix, cov_matrix_with_grads

RHO_START_RANGE = (-2.5, 2.5)
RHO_BOUNDS = (-100.0, 100.0)
HF_RATIO_ADVISORY = 0.35


def _validate_fidelity(x, y, label):
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.size != y.size:
        raise InvalidInputError(
            f"{label}: indices ({x.size}) and targets ({y.size}) differ in length"
        )
    if x.size == 0:
        raise InvalidInputError(f"{label}: empty series")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise InvalidInputError(f"{label}: non-finite values")
    if x.size > 1 and not np.all(np.diff(x) > 0):
        raise InvalidInputError(f"{label}: indices must be strictly increasing")
    return x, y


@dataclass(frozen=True)
class NestedDesign:
    """Aligned two-fidelity training data with nested index sets.

    Every high-fidelity index must also appear in the low-fidelity index
    set. Violations raise DesignViolationError at construction.
    """

    x_lo: np.ndarray
    y_lo: np.ndarray
    x_hi: np.ndarray
    y_hi: np.ndarray

    def __post_init__(self):
        x_lo, y_lo = _validate_fidelity(self.x_lo, self.y_lo, "low fidelity")
        x_hi, y_hi = _validate_fidelity(self.x_hi, self.y_hi, "high fidelity")
        missing = ~np.isin(x_hi, x_lo)
        if np.any(missing):
            raise DesignViolationError(
                f"{int(missing.sum())} high-fidelity indices are not in the "
                "low-fidelity index set"
            )
        object.__setattr__(self, "x_lo", x_lo)
        object.__setattr__(self, "y_lo", y_lo)
        object.__setattr__(self, "x_hi", x_hi)
        object.__setattr__(self, "y_hi", y_hi)

    @property
    def n_lo(self) -> int:
        return self.x_lo.size

    @property
    def n_hi(self) -> int:
        return self.x_hi.size

    @property
    def stacked_targets(self) -> np.ndarray:
        return np.concatenate([self.y_lo, self.y_hi])


@dataclass(frozen=True)
class MFGPModel:
    """A fitted (or directly constructed) two-fidelity GP."""

    theta1: KernelParams
    theta2: KernelParams
    rho: float
    noise_lo: float
    noise_hi: float
    design: NestedDesign
    chol_factor: np.ndarray
    alpha: np.ndarray = field(repr=False, default=None)
    nlml: float = float("nan")
    jitter: float = 0.0


def assemble_joint_cov(
    design: NestedDesign,
    theta1: KernelParams,
    theta2: KernelParams,
    rho: float,
    noise_lo: float,
    noise_hi: float,
) -> np.ndarray:
    """Joint covariance over stacked [y_L; y_H] observations.

    Blocks:
        LL = C(x_L, x_L; theta1) + noise_lo I
        LH = rho * C(x_L, x_H; theta1)
        HH = rho^2 C(x_H, x_H; theta1) + C(x_H, x_H; theta2) + noise_hi I
    """
    if noise_lo < 0 or noise_hi < 0:
        raise InvalidInputError("noise variances must be >= 0")
    c_ll = cov_matrix(design.x_lo, design.x_lo, theta1)
    c_lh = rho * cov_matrix(design.x_lo, design.x_hi, theta1)
    c_hh = rho**2 * cov_matrix(design.x_hi, design.x_hi, theta1) + cov_matrix(
        design.x_hi, design.x_hi, theta2
    )
    c_ll[np.diag_indices_from(c_ll)] += noise_lo
    c_hh[np.diag_indices_from(c_hh)] += noise_hi
    top = np.hstack([c_ll, c_lh])
    bottom = np.hstack([c_lh.T, c_hh])
    return np.vstack([top, bottom])


def mfgp_nlml(
    design: NestedDesign,
    theta1: KernelParams,
    theta2: KernelParams,
    rho: float,
    noise_lo: float,
    noise_hi: float,
) -> float:
    """Negative log marginal likelihood of the joint two-fidelity model."""
    k = assemble_joint_cov(design, theta1, theta2, rho, noise_lo, noise_hi)
    chol, _ = chol_with_jitter(k)
    y = design.stacked_targets
    alpha = sla.cho_solve((chol, True), y, check_finite=False)
    n = design.n_lo + design.n_hi
    return float(0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * n * LOG2PI)


def mfgp_nlml_grad(
    design: NestedDesign,
    theta1: KernelParams,
    theta2: KernelParams,
    rho: float,
    noise_lo: float,
    noise_hi: float,
):
    """NLML and its gradient in the seven free parameters.

    Gradient order: (ls1, sv1, ls2, sv2, noise_lo, noise_hi, rho). Uses
    the trace identity d NLML = 0.5 tr((K^-1 - alpha alpha^T) dK) with the
    blocks of dK assembled from per-block kernel gradients; the symmetric
    cross blocks contribute twice.
    """
    x_lo, x_hi = design.x_lo, design.x_hi
    n_lo = design.n_lo

    a1, da1_ls, da1_sv = cov_matrix_with_grads(x_lo, x_lo, theta1)
    c1, dc1_ls, dc1_sv = cov_matrix_with_grads(x_lo, x_hi, theta1)
    b1, db1_ls, db1_sv = cov_matrix_with_grads(x_hi, x_hi, theta1)
    b2, db2_ls, db2_sv = cov_matrix_with_grads(x_hi, x_hi, theta2)

    k_ll = a1.copy()
    k_ll[np.diag_indices_from(k_ll)] += noise_lo
    k_hh = rho**2 * b1 + b2
    k_hh[np.diag_indices_from(k_hh)] += noise_hi
    k = np.vstack(
        [np.hstack([k_ll, rho * c1]), np.hstack([rho * c1.T, k_hh])]
    )

    chol, _ = chol_with_jitter(k)
    y = design.stacked_targets
    alpha = sla.cho_solve((chol, True), y, check_finite=False)
    n = y.size
    nlml = float(0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * n * LOG2PI)

    a = _chol_inverse(chol)
    a -= np.outer(alpha, alpha)
    a_ll = a[:n_lo, :n_lo]
    a_lh = a[:n_lo, n_lo:]
    a_hh = a[n_lo:, n_lo:]

    grad = np.array(
        [
            0.5 * (np.sum(a_ll * da1_ls) + 2 * rho * np.sum(a_lh * dc1_ls)
                   + rho**2 * np.sum(a_hh * db1_ls)),
            0.5 * (np.sum(a_ll * da1_sv) + 2 * rho * np.sum(a_lh * dc1_sv)
                   + rho**2 * np.sum(a_hh * db1_sv)),
            0.5 * np.sum(a_hh * db2_ls),
            0.5 * np.sum(a_hh * db2_sv),
            0.5 * np.trace(a_ll),
            0.5 * np.trace(a_hh),
            0.5 * (2 * np.sum(a_lh * c1) + 2 * rho * np.sum(a_hh * b1)),
        ]
    )
    return nlml, grad


def mfgp_build(
    design: NestedDesign,
    theta1: KernelParams,
    theta2: KernelParams,
    rho: float,
    noise_lo: float,
    noise_hi: float,
) -> MFGPModel:
    """Construct a two-fidelity model at fixed hyperparameters."""
    k = assemble_joint_cov(design, theta1, theta2, rho, noise_lo, noise_hi)
    chol, jitter = chol_with_jitter(k)
    y = design.stacked_targets
    alpha = sla.cho_solve((chol, True), y, check_finite=False)
    n = y.size
    nlml = float(0.5 * y @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * n * LOG2PI)
    return MFGPModel(
        theta1=theta1,
        theta2=theta2,
        rho=float(rho),
        noise_lo=float(noise_lo),
        noise_hi=float(noise_hi),
        design=design,
        chol_factor=chol,
        alpha=alpha,
        nlml=nlml,
        jitter=jitter,
    )


def _shared_values(design: NestedDesign):
    """Targets at indices present in both fidelities, aligned."""
    pos = {v: i for i, v in enumerate(design.x_lo)}
    idx = np.array([pos[v] for v in design.x_hi])
    return design.y_lo[idx], design.y_hi


def _acf_half_lag(x, y):
    yd = y - y.mean()
    var = float(yd @ yd) / y.size
    span = x[-1] - x[0] if x.size > 1 else 1.0
    if var <= 0 or y.size < 8:
        return max(span / 8.0, 1e-2)
    spacing = span / (x.size - 1)
    for lag in range(1, min(y.size // 3, 48) + 1):
        c = float(yd[:-lag] @ yd[lag:]) / ((y.size - lag) * var)
        if c < 0.5:
            return max(spacing * lag / 1.177, 1e-2)
    return max(span / 8.0, 1e-2)


def _warm_start(design: NestedDesign, cfg: FitConfig) -> np.ndarray:
    """Data-driven start: regression slope for rho, moment splits for the rest."""
    lo_v, hi_v = cfg.var_bounds
    y_lo_s, y_hi = _shared_values(design)
    if y_hi.size >= 3 and np.var(y_lo_s) > 0:
        rho0 = float(np.polyfit(y_lo_s, y_hi, 1)[0])
        resid = y_hi - rho0 * y_lo_s
        resid_var = max(float(np.var(resid)), lo_v)
    else:
        rho0 = 1.0
        resid_var = max(float(np.var(y_hi)), lo_v)
    sv1 = np.clip(np.var(design.y_lo), lo_v, hi_v)
    nlo = np.clip(0.5 * np.var(np.diff(design.y_lo)) if design.n_lo > 1 else lo_v,
                  lo_v, hi_v)
    sv2 = np.clip(0.5 * resid_var, lo_v, hi_v)
    nhi = np.clip(0.5 * resid_var, lo_v, hi_v)
    ls1 = np.clip(_acf_half_lag(design.x_lo, design.y_lo), *cfg.ls_bounds)
    ls2 = np.clip(ls1 / 2.0, *cfg.ls_bounds)
    rho0 = float(np.clip(rho0, *RHO_BOUNDS))
    return np.concatenate([np.log([ls1, sv1, ls2, sv2, nlo, nhi]), [rho0]])


def mfgp_fit(design: NestedDesign, config: FitConfig | None = None) -> MFGPModel:
    """Fit the seven parameters by multi-start NLML minimization.

    The six positive parameters are optimized in log-space; rho is
    optimized raw and effectively unconstrained. Start points come from a
    seeded Latin hypercube plus one data-driven warm start; the best
    optimizer result over all starts is kept.
    """
    cfg = config or FitConfig()
    if design.n_lo < 3 or design.n_hi < 3:
        raise InvalidInputError("mfgp_fit needs at least 3 points per fidelity")
    if design.n_hi / design.n_lo > HF_RATIO_ADVISORY:
        warnings.warn(
            f"high-fidelity fraction {design.n_hi / design.n_lo:.2f} exceeds "
            f"{HF_RATIO_ADVISORY}; fusion gains little over a single-fidelity fit",
            AdvisoryWarning,
            stacklevel=2,
        )

    log_lower = np.log(
        [cfg.ls_bounds[0], cfg.var_bounds[0]] * 2 + [cfg.var_bounds[0]] * 2
    )
    log_upper = np.log(
        [cfg.ls_bounds[1], cfg.var_bounds[1]] * 2 + [cfg.var_bounds[1]] * 2
    )
    lower = np.concatenate([log_lower, [RHO_START_RANGE[0]]])
    upper = np.concatenate([log_upper, [RHO_START_RANGE[1]]])
    sampler = qmc.LatinHypercube(d=7, seed=cfg.seed)
    starts = list(lower + sampler.random(cfg.n_starts) * (upper - lower))
    starts.append(
        np.clip(
            _warm_start(design, cfg),
            np.concatenate([log_lower, [RHO_BOUNDS[0]]]),
            np.concatenate([log_upper, [RHO_BOUNDS[1]]]),
        )
    )
    bounds = list(zip(log_lower, log_upper)) + [RHO_BOUNDS]

    def unpack(vec):
        ls1, sv1, ls2, sv2, nlo, nhi = np.exp(vec[:6])
        theta1 = KernelParams(ls1, sv1, nugget=cfg.nugget, family=cfg.family)
        theta2 = KernelParams(ls2, sv2, nugget=cfg.nugget, family=cfg.family)
        return theta1, theta2, vec[6], nlo, nhi

    def objective(vec):
        try:
            theta1, theta2, rho, nlo, nhi = unpack(vec)
            nlml, grad = mfgp_nlml_grad(design, theta1, theta2, rho, nlo, nhi)
        except NumericalFailureError:
            return 1e25, np.zeros(7)
        if not np.isfinite(nlml):
            return 1e25, np.zeros(7)
        jac = grad.copy()
        jac[:6] *= np.exp(vec[:6])  # chain rule for log-space entries
        return nlml, jac

    best = None
    failures = []
    for start in starts:
        try:
            res = minimize(
                objective,
                start,
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": cfg.maxiter},
            )
        except Exception as exc:
            failures.append(str(exc))
            continue
        if not np.isfinite(res.fun) or res.fun >= 1e25:
            failures.append("non-finite objective")
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise FitFailureError(f"all {len(starts)} optimizer starts failed: {failures}")

    theta1, theta2, rho, nlo, nhi = unpack(best.x)
    return mfgp_build(design, theta1, theta2, rho, nlo, nhi)


def mfgp_predict(model: MFGPModel, query):
    """Predictive mean and variance of the latent HF process at ``query``.

    The cross-covariance row for a query x* is
    [rho*C(x*, x_L; theta1), rho^2*C(x*, x_H; theta1) + C(x*, x_H; theta2)];
    variance is the prior HF variance minus the explained part, clamped at
    zero (with a warning when the overshoot exceeds round-off scale).
    """
    q = np.asarray(query, dtype=float).reshape(-1)
    if q.size and not np.all(np.isfinite(q)):
        raise InvalidInputError("query contains non-finite indices")
    if q.size == 0:
        return np.zeros(0), np.zeros(0)
    left = model.rho * cov_matrix(q, model.design.x_lo, model.theta1)
    right = model.rho**2 * cov_matrix(q, model.design.x_hi, model.theta1) + cov_matrix(
        q, model.design.x_hi, model.theta2
    )
    k_star = np.hstack([left, right])
    mean = k_star @ model.alpha
    v = sla.solve_triangular(
        model.chol_factor, k_star.T, lower=True, check_finite=False
    )
    prior = model.rho**2 * model.theta1.prior_variance + model.theta2.prior_variance
    var = prior - np.sum(v * v, axis=0)
    if np.any(var < -1e-8 * prior):
        warnings.warn(
            "predictive variance negative beyond round-off; clamped to zero",
            AdvisoryWarning,
            stacklevel=2,
        )
    return mean, np.maximum(var, 0.0)
