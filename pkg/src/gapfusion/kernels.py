"""Stationary covariance functions over time indices.

Two families are provided: the squared-exponential kernel (default, smooth
hourly trends) and Matern-5/2. A kernel evaluation between two index sets
adds the nugget on exactly matching index pairs, so the nugget behaves as a
micro-scale variance component of the process rather than observation noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

KERNEL_FAMILIES = ("sqexp", "matern52")

_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class KernelParams:
    """Hyperparameters of a stationary kernel.

    Parameters
    ----------
    length_scale : float
        Correlation length in the same time units as the inputs (hours).
        Must be positive.
    signal_variance : float
        Marginal variance of the process, in squared response units.
        Must be positive.
    nugget : float, optional
        Micro-scale variance added on exact index matches. Non-negative.
    family : str, optional
        ``"sqexp"`` (default) or ``"matern52"``.
    """

    length_scale: float
    signal_variance: float
    nugget: float = 0.0
    family: str = "sqexp"

    def __post_init__(self):
        if not np.isfinite(self.length_scale) or self.length_scale <= 0:
            raise InvalidInputError(
                f"length_scale must be positive and finite, got {self.length_scale}"
            )
        if not np.isfinite(self.signal_variance) or self.signal_variance <= 0:
            raise InvalidInputError(
                f"signal_variance must be positive and finite, got {self.signal_variance}"
            )
        if not np.isfinite(self.nugget) or self.nugget < 0:
            raise InvalidInputError(f"nugget must be >= 0 and finite, got {self.nugget}")
        if self.family not in KERNEL_FAMILIES:
            raise InvalidInputError(
                f"unknown kernel family {self.family!r}, expected one of {KERNEL_FAMILIES}"
            )

    @property
    def prior_variance(self) -> float:
        """Variance of the process at any single index (zero distance)."""
        return self.signal_variance + self.nugget


def _as_index_array(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite time indices")
    return arr


def _correlation(diff: np.ndarray, params: KernelParams) -> np.ndarray:
    """Unit-variance correlation matrix for pairwise differences ``diff``."""
    ls = params.length_scale
    if params.family == "sqexp":
        return np.exp(diff * diff / (-2.0 * ls * ls))
    # matern52
    u = (_SQRT5 / ls) * np.abs(diff)
    return (1.0 + u + u * u / 3.0) * np.exp(-u)


def _correlation_and_ls_grad(diff: np.ndarray, params: KernelParams):
    """Correlation matrix R and dR/d(length_scale)."""
    ls = params.length_scale
    if params.family == "sqexp":
        d2 = diff * diff
        r = np.exp(d2 / (-2.0 * ls * ls))
        return r, r * d2 / ls**3
    u = (_SQRT5 / ls) * np.abs(diff)
    e = np.exp(-u)
    r = (1.0 + u + u * u / 3.0) * e
    # d/du [(1+u+u^2/3)e^-u] = -(u/3)(1+u)e^-u and du/dls = -u/ls
    dr = (u * u * (1.0 + u) / (3.0 * ls)) * e
    return r, dr


def exact_match_mask(a, b) -> np.ndarray:
    """Boolean matrix marking pairs with exactly equal time indices."""
    a = _as_index_array(a, "a")
    b = _as_index_array(b, "b")
    return np.equal.outer(a, b)


def cov_matrix(a, b, params: KernelParams) -> np.ndarray:
    """Covariance matrix between index sets ``a`` (rows) and ``b`` (columns).

    Entry (i, j) is ``signal_variance * corr(a_i - b_j)`` plus the nugget
    where ``a_i == b_j`` exactly. Symmetric whenever ``a is b`` elementwise.
    """
    a = _as_index_array(a, "a")
    b = _as_index_array(b, "b")
    diff = a[:, None] - b[None, :]
    k = params.signal_variance * _correlation(diff, params)
    if params.nugget > 0:
        k = k + params.nugget * np.equal.outer(a, b)
    return k


def cov_matrix_with_grads(a, b, params: KernelParams):
    """Covariance matrix plus analytic gradients.

    Returns
    -------
    k : ndarray
        Same as :func:`cov_matrix`.
    dk_dls : ndarray
        Elementwise derivative with respect to ``length_scale``.
    dk_dsv : ndarray
        Elementwise derivative with respect to ``signal_variance`` (the
        correlation matrix; the nugget term does not depend on it).
    """
    a = _as_index_array(a, "a")
    b = _as_index_array(b, "b")
    diff = a[:, None] - b[None, :]
    r, dr = _correlation_and_ls_grad(diff, params)
    k = params.signal_variance * r
    if params.nugget > 0:
        k = k + params.nugget * np.equal.outer(a, b)
    return k, params.signal_variance * dr, r
