"""Two-fidelity GP: joint covariance, gradients, fitting, prediction."""

import warnings

import numpy as np
import pytest

from gapfusion.errors import AdvisoryWarning, DesignViolationError, InvalidInputError
from gapfusion.gp import FitConfig, gp_nlml
from gapfusion.kernels import KernelParams, cov_matrix
from gapfusion.mfgp import (
    MFGPModel,
    NestedDesign,
    assemble_joint_cov,
    mfgp_build,
    mfgp_fit,
    mfgp_nlml,
    mfgp_nlml_grad,
    mfgp_predict,
)


def _design(n_lo=30, n_hi=8, seed=0, rho=2.0):
    rng = np.random.default_rng(seed)
    x_lo = np.sort(rng.uniform(0, 10, n_lo))
    y_lo = np.sin(x_lo) + 0.1 * rng.standard_normal(n_lo)
    idx = np.sort(rng.choice(n_lo, n_hi, replace=False))
    x_hi = x_lo[idx]
    y_hi = rho * y_lo[idx] + 0.05 * rng.standard_normal(n_hi)
    return NestedDesign(x_lo, y_lo, x_hi, y_hi)


def test_joint_cov_blocks_match_manual_assembly():
    d = _design()
    t1 = KernelParams(1.1, 0.7)
    t2 = KernelParams(0.6, 0.3)
    rho, n_lo, n_hi = 1.7, 0.04, 0.01
    k = assemble_joint_cov(d, t1, t2, rho, n_lo, n_hi)

    c1_ll = cov_matrix(d.x_lo, d.x_lo, t1) + n_lo * np.eye(d.n_lo)
    c1_lh = rho * cov_matrix(d.x_lo, d.x_hi, t1)
    c1_hh = rho**2 * cov_matrix(d.x_hi, d.x_hi, t1)
    c2_hh = cov_matrix(d.x_hi, d.x_hi, t2) + n_hi * np.eye(d.n_hi)
    expected = np.block([[c1_ll, c1_lh], [c1_lh.T, c1_hh + c2_hh]])
    assert np.max(np.abs(k - expected)) < 1e-12


def test_two_point_likelihood_hand_value():
    # one shared location: K = [[1, 2], [2, 5]], y = [1, 1]
    # quad = y' K^-1 y = 2, log|K| = 0, so nlml = 1 + log(2 pi)
    d = NestedDesign(
        np.array([0.0]), np.array([1.0]), np.array([0.0]), np.array([1.0])
    )
    t1 = KernelParams(1.0, 1.0)
    t2 = KernelParams(1.0, 1.0)
    value = mfgp_nlml(d, t1, t2, rho=2.0, noise_lo=0.0, noise_hi=0.0)
    assert abs(value - (1.0 + np.log(2.0 * np.pi))) < 1e-12


def test_zero_rho_decouples_fidelities():
    d = _design(20, 6, seed=4)
    t1 = KernelParams(1.3, 0.9)
    t2 = KernelParams(0.7, 0.4)
    joint = mfgp_nlml(d, t1, t2, rho=0.0, noise_lo=0.03, noise_hi=0.02)
    split = gp_nlml(t1, 0.03, d.x_lo, d.y_lo) + gp_nlml(t2, 0.02, d.x_hi, d.y_hi)
    assert abs(joint - split) < 1e-9


def test_gradient_matches_finite_differences_all_seven():
    d = _design(14, 5, seed=2)
    rng = np.random.default_rng(3)
    for _ in range(8):
        raw = np.exp(rng.uniform(-0.7, 0.7, 6))
        rho = float(rng.uniform(-2.0, 2.0))
        theta = [float(v) for v in raw]

        def nlml_at(v):
            return mfgp_nlml(
                d,
                KernelParams(v[0], v[1]),
                KernelParams(v[2], v[3]),
                rho=v[6],
                noise_lo=v[4],
                noise_hi=v[5],
            )

        point = theta + [rho]
        _, grad = mfgp_nlml_grad(
            d,
            KernelParams(*theta[0:2]),
            KernelParams(*theta[2:4]),
            rho=rho,
            noise_lo=theta[4],
            noise_hi=theta[5],
        )
        eps = 1e-6
        for i in range(7):
            hi = list(point)
            lo = list(point)
            hi[i] += eps
            lo[i] -= eps
            fd = (nlml_at(hi) - nlml_at(lo)) / (2 * eps)
            rel = abs(grad[i] - fd) / max(abs(fd), 1e-10)
            assert rel < 1e-4, f"param {i}: grad {grad[i]} vs fd {fd}"


def test_nesting_violation_rejected():
    x_lo = np.array([0.0, 1.0, 2.0, 3.0])
    y_lo = np.zeros(4)
    with pytest.raises(DesignViolationError):
        NestedDesign(x_lo, y_lo, np.array([1.5]), np.array([0.0]))


def test_design_validation():
    with pytest.raises(InvalidInputError):
        NestedDesign(np.array([0.0, 0.5]), np.array([1.0]), np.array([0.0]), np.array([1.0]))
    with pytest.raises(InvalidInputError):
        NestedDesign(
            np.array([1.0, 0.0]), np.zeros(2), np.array([1.0]), np.zeros(1)
        )


def test_predict_matches_dense_oracle():
    d = _design(16, 6, seed=8)
    t1 = KernelParams(1.4, 0.8)
    t2 = KernelParams(0.9, 0.25)
    rho, n_lo, n_hi = 1.6, 0.05, 0.02
    model = mfgp_build(d, t1, t2, rho, n_lo, n_hi)
    query = np.linspace(-0.5, 10.5, 13)
    mean, var = mfgp_predict(model, query)

    k = assemble_joint_cov(d, t1, t2, rho, n_lo, n_hi)
    k_inv = np.linalg.inv(k)
    q_lo = rho * cov_matrix(query, d.x_lo, t1)
    q_hi = rho**2 * cov_matrix(query, d.x_hi, t1) + cov_matrix(query, d.x_hi, t2)
    q_row = np.hstack([q_lo, q_hi])
    y = d.stacked_targets
    mean_o = q_row @ k_inv @ y
    prior = rho**2 * t1.prior_variance + t2.prior_variance
    var_o = prior - np.sum((q_row @ k_inv) * q_row, axis=1)
    assert np.max(np.abs(mean - mean_o)) < 1e-8
    assert np.max(np.abs(var - var_o)) < 1e-8


def test_more_highfi_points_never_raise_variance():
    # fixed hyperparameters; conditioning on extra points tightens the posterior
    rng = np.random.default_rng(5)
    x_lo = np.sort(rng.uniform(0, 10, 40))
    y_lo = np.sin(x_lo)
    t1 = KernelParams(1.5, 1.0)
    t2 = KernelParams(1.0, 0.3)
    idx_small = np.array([5, 15, 25, 35])
    idx_big = np.array([5, 10, 15, 20, 25, 30, 35])
    query = np.linspace(0, 10, 21)

    variances = []
    for idx in (idx_small, idx_big):
        d = NestedDesign(x_lo, y_lo, x_lo[idx], 2.0 * y_lo[idx])
        model = mfgp_build(d, t1, t2, 1.8, 0.01, 0.01)
        _, var = mfgp_predict(model, query)
        variances.append(var)
    assert np.all(variances[1] <= variances[0] + 1e-10)


def test_fit_recovers_scale_factor():
    rng = np.random.default_rng(21)
    x_lo = np.linspace(0, 20, 120)
    y_lo = np.sin(0.6 * x_lo) + 0.05 * rng.standard_normal(120)
    idx = np.sort(rng.choice(120, 30, replace=False))
    y_hi = 2.0 * np.sin(0.6 * x_lo[idx]) + 0.05 * rng.standard_normal(30)
    d = NestedDesign(x_lo, y_lo, x_lo[idx], y_hi)
    model = mfgp_fit(d, FitConfig(n_starts=3, seed=0, maxiter=100))
    assert 1.5 < model.rho < 2.5


def test_fit_needs_minimum_points():
    d = NestedDesign(
        np.array([0.0, 1.0, 2.0]),
        np.zeros(3),
        np.array([0.0, 1.0]),
        np.zeros(2),
    )
    with pytest.raises(InvalidInputError):
        mfgp_fit(d, FitConfig(n_starts=2))


def test_high_ratio_emits_advisory():
    rng = np.random.default_rng(6)
    x_lo = np.sort(rng.uniform(0, 10, 10))
    y_lo = np.sin(x_lo) + 0.05 * rng.standard_normal(10)
    idx = np.arange(5)
    d = NestedDesign(x_lo, y_lo, x_lo[idx], 2.0 * y_lo[idx])
    with pytest.warns(AdvisoryWarning):
        mfgp_fit(d, FitConfig(n_starts=2, maxiter=30))


def test_fit_result_is_reproducible():
    d = _design(25, 8, seed=9)
    cfg = FitConfig(n_starts=2, seed=4, maxiter=50)
    a = mfgp_fit(d, cfg)
    b = mfgp_fit(d, cfg)
    assert a.nlml == b.nlml and a.rho == b.rho
