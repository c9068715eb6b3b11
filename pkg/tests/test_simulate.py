"""Synthetic data: trend, noise distributions, masks, scenario round trips."""

import json
import math
import os
import tempfile

import numpy as np
import pytest
from scipy import stats

from gapfusion.errors import ConfigError, ParameterPathologyError
from gapfusion.metrics import sample_skewness
from gapfusion.simulate import (
    CSN_SCENARIOS,
    DEFAULT_TREND,
    STRUCTURAL_GAP_LENGTHS,
    WEIBULL_SCENARIOS,
    CSNParams,
    ScenarioConfig,
    TrendSpec,
    WeibullParams,
    build_pair,
    default_scenario,
    load_scenario,
    load_trend,
    random_missingness_mask,
    sample_csn,
    sample_noise,
    sample_weibull,
    save_scenario,
    save_trend,
    scenario_from_dict,
    scenario_to_dict,
    structural_gap_mask,
    synth_trend,
)


def test_trend_is_sum_of_harmonics_and_drift():
    spec = TrendSpec(harmonics=((24.0, 2.0, 0.0),), drift=(1.0, 3.0))
    n = 48
    t = np.arange(n)
    expected = 2.0 * np.cos(2.0 * np.pi * t / 24.0) + 1.0 + 3.0 * t / (n - 1)
    assert np.allclose(synth_trend(n, spec), expected)


def test_trend_round_trips_through_file():
    trend = synth_trend(500, DEFAULT_TREND)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "trend.txt")
        save_trend(path, trend)
        loaded = load_trend(path)
    assert np.array_equal(trend, loaded)


def test_malformed_trend_spec_rejected():
    with pytest.raises(ConfigError):
        TrendSpec(harmonics=((24.0, 2.0),), drift=(0.0,))
    with pytest.raises(ConfigError):
        TrendSpec(harmonics=((0.0, 2.0, 0.0),), drift=(0.0,))


def test_weibull_moments_match_closed_form():
    params = WeibullParams(scale=2.0, shape=0.8)
    s = sample_weibull(params, 400_000, np.random.default_rng(0))
    mean = 2.0 * math.gamma(1.0 + 1.0 / 0.8)
    var = 4.0 * (math.gamma(1.0 + 2.0 / 0.8) - math.gamma(1.0 + 1.0 / 0.8) ** 2)
    assert abs(s.mean() - mean) < 0.02
    assert abs(s.var() - var) < 0.15
    # hard-skew shape: population skewness about 2.9
    assert 2.6 < sample_skewness(s) < 3.2


def test_weibull_centered_mean_near_zero():
    params = WeibullParams(scale=0.5, shape=0.8, centered=True)
    s = sample_weibull(params, 200_000, np.random.default_rng(1))
    assert abs(s.mean()) < 3.0 * s.std() / np.sqrt(s.size)


def test_weibull_distribution_oracle():
    params = WeibullParams(scale=2.0, shape=2.3)
    s = sample_weibull(params, 20_000, np.random.default_rng(2))
    res = stats.kstest(s, stats.weibull_min(2.3, scale=2.0).cdf)
    assert res.pvalue > 0.01


def test_csn_zero_gamma_is_plain_normal():
    params = CSNParams(mu=1.0, sigma1=0.5, gamma=0.0, nu=2.0, delta=3.0)
    s = sample_csn(params, 20_000, np.random.default_rng(3))
    res = stats.kstest(s, stats.norm(loc=1.0, scale=0.5).cdf)
    assert res.pvalue > 0.01


def test_csn_density_oracle():
    # accepted draws follow phi((x-mu)/s1) * Phi((gamma (x-mu) - nu) / delta),
    # normalized; compare against a numerically integrated CDF of that density
    params = CSNParams(mu=-0.25, sigma1=0.8, gamma=50.0, nu=2.0, delta=3.0)
    s = sample_csn(params, 20_000, np.random.default_rng(4))

    grid = np.linspace(params.mu - 6 * params.sigma1, params.mu + 8 * params.sigma1, 200_001)
    core = stats.norm.pdf((grid - params.mu) / params.sigma1)
    tilt = stats.norm.cdf((params.gamma * (grid - params.mu) - params.nu) / params.delta)
    dens = core * tilt
    cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(grid))])
    cum /= cum[-1]

    res = stats.kstest(s, lambda q: np.interp(q, grid, cum))
    assert res.pvalue > 0.01


def test_csn_positive_gamma_skews_right():
    params = CSNParams(mu=0.0, sigma1=1.0, gamma=4.0, nu=2.0, delta=3.0)
    s = sample_csn(params, 50_000, np.random.default_rng(5))
    assert sample_skewness(s) > 0.1


def test_csn_pathological_acceptance_rejected():
    params = CSNParams(mu=0.0, sigma1=1.0, gamma=1.0, nu=1000.0, delta=1.0)
    with pytest.raises(ParameterPathologyError):
        sample_csn(params, 100, np.random.default_rng(6))


def test_sampling_is_seed_deterministic():
    w = WeibullParams(scale=1.5, shape=1.2)
    a = sample_weibull(w, 100, np.random.default_rng(7))
    b = sample_weibull(w, 100, np.random.default_rng(7))
    c = sample_weibull(w, 100, np.random.default_rng(8))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

    csn = CSNParams(mu=0.0, sigma1=1.0, gamma=4.0, nu=2.0, delta=3.0)
    a = sample_csn(csn, 100, np.random.default_rng(7))
    b = sample_csn(csn, 100, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_sample_noise_dispatch():
    rng = np.random.default_rng(0)
    assert sample_noise(WeibullParams(1.0, 1.0), 5, rng).shape == (5,)
    assert sample_noise(CSNParams(0.0, 1.0, 0.0, 1.0, 1.0), 5, rng).shape == (5,)
    with pytest.raises(ConfigError):
        sample_noise("weibull", 5, rng)


def test_build_pair_shares_trend():
    rng = np.random.default_rng(1)
    trend = synth_trend(100, DEFAULT_TREND)
    w_lo = sample_weibull(WeibullParams(2.0, 0.8), 100, rng)
    w_hi = sample_weibull(WeibullParams(0.5, 0.8), 100, rng)
    y_lo, y_hi = build_pair(trend, w_lo, w_hi)
    assert y_lo.shape == y_hi.shape == (100,)
    # noise is nonnegative for uncentered weibull, so both sit above the trend
    assert np.all(y_lo >= trend) and np.all(y_hi >= trend)


def test_random_mask_exact_count_and_determinism():
    rng = np.random.default_rng(2)
    mask = random_missingness_mask(500, 0.1, rng)
    assert mask.sum() == 50
    assert mask.dtype == bool
    again = random_missingness_mask(500, 0.1, np.random.default_rng(2))
    assert np.array_equal(mask, again)


def test_random_mask_fraction_bounds():
    from gapfusion.errors import InvalidInputError

    rng = np.random.default_rng(3)
    with pytest.raises(InvalidInputError):
        random_missingness_mask(100, 0.0, rng)
    with pytest.raises(InvalidInputError):
        random_missingness_mask(100, 1.5, rng)


def test_structural_gap_mask_properties():
    # mask is an observed-mask: True outside the gap, False inside
    rng = np.random.default_rng(4)
    mask, (start, stop) = structural_gap_mask(500, 96, rng)
    assert stop - start == 96
    assert (~mask).sum() == 96
    assert not mask[start:stop].any()
    assert mask[:start].all() and mask[stop:].all()


def test_structural_gap_length_whitelist():
    rng = np.random.default_rng(5)
    with pytest.raises(ConfigError):
        structural_gap_mask(500, 37, rng)
    # override list allows custom lengths
    mask, _ = structural_gap_mask(500, 37, rng, allowed_lengths=None)
    assert (~mask).sum() == 37
    with pytest.raises(ConfigError):
        structural_gap_mask(96, 96, rng, allowed_lengths=None)


def test_structural_gap_start_spans_series(event_count=200):
    starts = set()
    for seed in range(event_count):
        _, (start, _) = structural_gap_mask(300, 24, np.random.default_rng(seed))
        starts.add(start)
    assert min(starts) < 20
    assert max(starts) > 250


def test_scenario_tables_match_documented_values():
    w = WEIBULL_SCENARIOS["high"]
    assert (w["w_lo"].scale, w["w_lo"].shape) == (2.0, 0.8)
    assert (w["w_hi"].scale, w["w_hi"].shape) == (0.5, 0.8)
    assert w["w_hi"].centered and not w["w_lo"].centered
    c = CSN_SCENARIOS["low"]
    assert c["w_hi"].sigma1 == 0.04 and c["w_lo"].sigma1 == 0.8
    assert c["w_hi"].gamma == c["w_lo"].gamma == 4.0


def test_scenario_json_round_trip():
    sc = default_scenario("csn", "high", n=200, hf_fraction=0.2, reps=3, seed=9)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "scenario.json")
        save_scenario(path, sc)
        loaded = load_scenario(path)
    assert loaded == sc
    assert scenario_from_dict(scenario_to_dict(sc)) == sc


def test_scenario_validation():
    with pytest.raises(ConfigError):
        default_scenario("weibull", "medium")
    with pytest.raises(ConfigError):
        default_scenario("cauchy", "high")
    with pytest.raises(ConfigError):
        ScenarioConfig(
            distribution="weibull", skew="high", n=0, hf_fraction=0.1, reps=1, seed=0
        )
    with pytest.raises(ConfigError):
        ScenarioConfig(
            distribution="weibull", skew="high", n=100, hf_fraction=0.0, reps=1, seed=0
        )


def test_scenario_config_rejects_mismatched_noise_type():
    with pytest.raises(ConfigError):
        ScenarioConfig(
            distribution="weibull",
            skew="high",
            n=100,
            hf_fraction=0.1,
            reps=1,
            seed=0,
            w_lo=CSNParams(0.0, 1.0, 0.0, 1.0, 1.0),
            w_hi=WeibullParams(0.5, 0.8),
        )


def test_default_gap_lengths_are_sorted_targets():
    assert STRUCTURAL_GAP_LENGTHS == (24, 48, 72, 96, 192)
