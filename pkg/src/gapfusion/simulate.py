"""Synthetic two-fidelity series generation for the simulation studies.

A deterministic trend (sum of sinusoids plus a slow polynomial drift, or a
column loaded from file), optionally joined by a smooth stochastic signal
S both sources co-observe, is corrupted by two independent skewed noise
series to produce a low-fidelity and a high-fidelity observation series of
the same latent signal:

    y_L = T + S + w_L,    y_H = T + S + w_H

Noise comes from a closed skew-normal family (rejection-sampled) or a
Weibull family (inverse-CDF sampled, optionally mean-centered). Default
parameter sets cover a low and a high skewness scenario per family.
Missingness is imposed either as a uniformly random observed subset of a
fixed size or as one contiguous structural gap.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError, InvalidInputError, ParameterPathologyError
from .kernels import KernelParams, cov_matrix

STRUCTURAL_GAP_LENGTHS = (24, 48, 72, 96, 192)

MIN_ACCEPTANCE = 1e-4
_ACCEPTANCE_PROBE = 100_000


@dataclass(frozen=True)
class TrendSpec:
    """Harmonic-plus-drift trend description.

    ``harmonics`` holds (period, amplitude, phase) triples evaluated as
    amplitude * cos(2 pi t / period + phase) on an hourly index t.
    ``drift`` holds polynomial coefficients (constant first) in normalized
    time t / (length - 1), so the drift magnitude is length-independent.
    """

    harmonics: tuple = ()
    drift: tuple = ()

    def __post_init__(self):
        harmonics = tuple(tuple(float(v) for v in h) for h in self.harmonics)
        drift = tuple(float(c) for c in self.drift)
        for h in harmonics:
            if len(h) != 3:
                raise ConfigError(f"harmonic {h} must be (period, amplitude, phase)")
            if not all(math.isfinite(v) for v in h):
                raise ConfigError(f"harmonic {h} has non-finite entries")
            if h[0] <= 0:
                raise ConfigError(f"harmonic period must be positive, got {h[0]}")
        if not all(math.isfinite(c) for c in drift):
            raise ConfigError("drift coefficients must be finite")
        object.__setattr__(self, "harmonics", harmonics)
        object.__setattr__(self, "drift", drift)


# Hourly-series default: diurnal cycle, a synoptic-scale wave, a slower
# envelope, and a gentle upward drift around a positive base level.
DEFAULT_TREND = TrendSpec(
    harmonics=((24.0, 2.0, 0.0), (163.0, 1.5, 1.0), (400.0, 1.0, 2.0)),
    drift=(5.0, 1.5),
)

# Wind-speed-like regime: the same cycles at one fifth the amplitude, so
# short-term skewed fluctuation dominates the marginal. This is the
# regime the scattered-missingness comparison probes.
WIND_TREND = TrendSpec(
    harmonics=((24.0, 0.4, 0.0), (163.0, 0.3, 1.0), (400.0, 0.2, 2.0)),
    drift=(5.0, 0.3),
)

@dataclass(frozen=True)
class SharedSpec:
    """Smooth stochastic signal co-observed by both fidelities.

    One fresh squared-exponential GP draw per replication, added to both
    series: the stand-in for weather that both sources watch. It is
    smooth at the sampling scale but carries no deterministic pattern,
    so nothing on one side of a long hole predicts it; only the series
    that stays complete through the hole does.
    """

    length_scale: float
    signal_sd: float

    def __post_init__(self):
        if not (math.isfinite(self.length_scale) and self.length_scale > 0):
            raise ConfigError(
                f"shared length_scale must be positive, got {self.length_scale}"
            )
        if not (math.isfinite(self.signal_sd) and self.signal_sd >= 0):
            raise ConfigError(
                f"shared signal_sd must be >= 0, got {self.signal_sd}"
            )


# Weather-like co-observed fluctuation: correlation length well below
# the studied hole lengths, variance above the noise floor. Each hole
# therefore hides signal that only the complete series still sees.
WEATHER_SHARED = SharedSpec(length_scale=12.0, signal_sd=1.3)


def sample_shared(spec: SharedSpec, n: int, rng) -> np.ndarray:
    """Draw one shared-signal path on t = 0..n-1 hours."""
    if n < 1:
        raise InvalidInputError("shared signal length must be >= 1")
    rng = np.random.default_rng(rng)
    if spec.signal_sd == 0.0:
        # Consume the same draws so sd = 0 changes only the signal, not
        # the downstream noise stream.
        rng.standard_normal(n)
        return np.zeros(n)
    t = np.arange(n, dtype=float)
    cov = cov_matrix(t, t, KernelParams(spec.length_scale, 1.0))
    cov[np.diag_indices(n)] += 1e-10
    return spec.signal_sd * (np.linalg.cholesky(cov) @ rng.standard_normal(n))


def synth_trend(length: int, spec: TrendSpec) -> np.ndarray:
    """Evaluate a TrendSpec on t = 0..length-1 hours."""
    if length < 1:
        raise InvalidInputError("trend length must be >= 1")
    t = np.arange(length, dtype=float)
    out = np.zeros(length)
    for period, amplitude, phase in spec.harmonics:
        out += amplitude * np.cos(2.0 * np.pi * t / period + phase)
    if spec.drift:
        u = t / max(length - 1, 1)
        out += np.polynomial.polynomial.polyval(u, spec.drift)
    return out


def save_trend(path, values) -> None:
    """Write a trend column, one exact float repr per line."""
    vals = np.asarray(values, dtype=float).reshape(-1)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(repr(float(v)) for v in vals) + "\n")


def load_trend(path) -> np.ndarray:
    """Read a trend column written by save_trend; exact round trip."""
    with open(path, "r", encoding="utf-8") as fh:
        vals = [float(line) for line in fh if line.strip()]
    if not vals:
        raise ConfigError(f"trend file {path} is empty")
    return np.array(vals)


@dataclass(frozen=True)
class CSNParams:
    """Closed skew-normal parameters (location, scale, skew, shape, trunc)."""

    mu: float
    sigma1: float
    gamma: float
    nu: float
    delta: float

    def __post_init__(self):
        if not self.sigma1 > 0:
            raise InvalidInputError("sigma1 must be positive")
        if not self.delta > 0:
            raise InvalidInputError("delta must be positive")
        for name in ("mu", "sigma1", "gamma", "nu", "delta"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")


@dataclass(frozen=True)
class WeibullParams:
    """Weibull noise parameters; ``centered`` subtracts the analytic mean."""

    scale: float
    shape: float
    centered: bool = False

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise InvalidInputError("scale must be positive")
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise InvalidInputError("shape must be positive")

    @property
    def mean(self) -> float:
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)


def sample_csn(params: CSNParams, n: int, seed) -> np.ndarray:
    """Rejection-sample the closed skew-normal.

    Proposals are Normal(mu, sigma1^2); acceptance probability is
    Phi((gamma (x - mu) - nu) / delta) rescaled by its supremum so the
    gamma = 0 case degenerates to plain normal sampling.

    Raises
    ------
    ParameterPathologyError
        If the empirical acceptance rate falls below 1e-4.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    sup = 1.0 if params.gamma != 0 else float(ndtr(-params.nu / params.delta))
    chunks = []
    accepted = 0
    proposed = 0
    while accepted < n:
        batch = max(4 * (n - accepted), 1024)
        x = rng.normal(params.mu, params.sigma1, size=batch)
        acc = ndtr((params.gamma * (x - params.mu) - params.nu) / params.delta) / sup
        keep = x[rng.random(batch) < acc]
        chunks.append(keep)
        accepted += keep.size
        proposed += batch
        if proposed >= _ACCEPTANCE_PROBE and accepted / proposed < MIN_ACCEPTANCE:
            raise ParameterPathologyError(
                f"acceptance rate {accepted / proposed:.2e} below {MIN_ACCEPTANCE}; "
                f"CSN parameters {params} are pathological"
            )
    return np.concatenate(chunks)[:n]


def sample_weibull(params: WeibullParams, n: int, seed) -> np.ndarray:
    """Inverse-CDF Weibull draws scale * (-ln U)^(1/shape)."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # (0, 1], keeps the log finite
    draws = params.scale * (-np.log(u)) ** (1.0 / params.shape)
    if params.centered:
        draws -= params.mean
    return draws


def sample_noise(params, n: int, seed) -> np.ndarray:
    """Dispatch on the noise parameter type."""
    if isinstance(params, CSNParams):
        return sample_csn(params, n, seed)
    if isinstance(params, WeibullParams):
        return sample_weibull(params, n, seed)
    raise ConfigError(f"unsupported noise parameters {type(params).__name__}")


def build_pair(signal, w_lo, w_hi):
    """Assemble (y_L, y_H) = (S + w_L, S + w_H) from a shared signal S."""
    t = np.asarray(signal, dtype=float).reshape(-1)
    lo = np.asarray(w_lo, dtype=float).reshape(-1)
    hi = np.asarray(w_hi, dtype=float).reshape(-1)
    if not (t.size == lo.size == hi.size):
        raise InvalidInputError(
            f"lengths differ: signal {t.size}, w_lo {lo.size}, w_hi {hi.size}"
        )
    return t + lo, t + hi


def random_missingness_mask(n: int, hf_fraction: float, seed) -> np.ndarray:
    """Boolean observed-mask with exactly round(n * hf_fraction) True entries."""
    if not 0.0 < hf_fraction <= 1.0:
        raise InvalidInputError("hf_fraction must lie in (0, 1]")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    count = int(np.rint(n * hf_fraction))
    rng = np.random.default_rng(seed)
    mask = np.zeros(n, dtype=bool)
    mask[rng.choice(n, size=count, replace=False)] = True
    return mask


def structural_gap_mask(
    n: int,
    gap_length: int,
    seed,
    allowed_lengths: tuple | None = STRUCTURAL_GAP_LENGTHS,
):
    """One contiguous missing run at a uniformly random admissible start.

    Returns
    -------
    (mask, (start, stop)) : observed-mask plus the half-open gap range.

    Pass ``allowed_lengths=None`` to permit arbitrary gap lengths.
    """
    if gap_length >= n:
        raise ConfigError(f"gap_length {gap_length} must be < series length {n}")
    if gap_length < 1:
        raise ConfigError("gap_length must be >= 1")
    if allowed_lengths is not None and gap_length not in allowed_lengths:
        raise ConfigError(
            f"gap_length {gap_length} not in configured set {allowed_lengths}; "
            "pass allowed_lengths=None to override"
        )
    rng = np.random.default_rng(seed)
    start = int(rng.integers(0, n - gap_length + 1))
    mask = np.ones(n, dtype=bool)
    mask[start : start + gap_length] = False
    return mask, (start, start + gap_length)


# Default noise parameter sets for the two skewness scenarios per family.
CSN_SCENARIOS = {
    "low": {
        "w_hi": CSNParams(mu=-0.25, sigma1=0.04, gamma=4.0, nu=2.0, delta=3.0),
        "w_lo": CSNParams(mu=-0.5, sigma1=0.8, gamma=4.0, nu=2.0, delta=3.0),
    },
    "high": {
        "w_hi": CSNParams(mu=-0.25, sigma1=0.8, gamma=50.0, nu=2.0, delta=3.0),
        "w_lo": CSNParams(mu=-0.5, sigma1=2.4, gamma=50.0, nu=2.0, delta=3.0),
    },
}

WEIBULL_SCENARIOS = {
    "high": {
        "w_lo": WeibullParams(scale=2.0, shape=0.8, centered=False),
        "w_hi": WeibullParams(scale=0.5, shape=0.8, centered=True),
    },
    "low": {
        "w_lo": WeibullParams(scale=2.0, shape=2.3, centered=False),
        "w_hi": WeibullParams(scale=0.5, shape=2.0, centered=True),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulation experiment needs, serializable to JSON."""

    distribution: str  # "csn" | "weibull"
    skew: str  # "low" | "high"
    n: int
    hf_fraction: float
    reps: int
    seed: int
    trend: TrendSpec = field(default_factory=lambda: DEFAULT_TREND)
    w_lo: CSNParams | WeibullParams = None
    w_hi: CSNParams | WeibullParams = None
    shared: SharedSpec | None = None

    def __post_init__(self):
        if self.distribution not in ("csn", "weibull"):
            raise ConfigError(f"unknown distribution {self.distribution!r}")
        if self.skew not in ("low", "high"):
            raise ConfigError(f"unknown skew level {self.skew!r}")
        if not 0.0 < self.hf_fraction <= 1.0:
            raise ConfigError("hf_fraction must lie in (0, 1]")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.n < 10:
            raise ConfigError("series length n must be >= 10")
        defaults = (CSN_SCENARIOS if self.distribution == "csn" else WEIBULL_SCENARIOS)[
            self.skew
        ]
        if self.w_lo is None:
            object.__setattr__(self, "w_lo", defaults["w_lo"])
        if self.w_hi is None:
            object.__setattr__(self, "w_hi", defaults["w_hi"])
        expect = CSNParams if self.distribution == "csn" else WeibullParams
        for name in ("w_lo", "w_hi"):
            if not isinstance(getattr(self, name), expect):
                raise ConfigError(
                    f"{name} parameters must be {expect.__name__} for "
                    f"distribution {self.distribution!r}"
                )
        if self.shared is not None and not isinstance(self.shared, SharedSpec):
            raise ConfigError("shared must be a SharedSpec or None")


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    out = asdict(cfg)
    out["trend"] = {
        "harmonics": [list(h) for h in cfg.trend.harmonics],
        "drift": list(cfg.trend.drift),
    }
    return out


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    data = dict(raw)
    try:
        trend_raw = data.pop("trend", None)
        trend = (
            TrendSpec(
                harmonics=tuple(tuple(h) for h in trend_raw.get("harmonics", ())),
                drift=tuple(trend_raw.get("drift", ())),
            )
            if trend_raw is not None
            else DEFAULT_TREND
        )
        dist = data.get("distribution")
        cls = CSNParams if dist == "csn" else WeibullParams
        for name in ("w_lo", "w_hi"):
            if isinstance(data.get(name), dict):
                data[name] = cls(**data[name])
        if isinstance(data.get("shared"), dict):
            data["shared"] = SharedSpec(**data["shared"])
        return ScenarioConfig(trend=trend, **data)
    except ConfigError:
        raise
    except (TypeError, ValueError, AttributeError, KeyError) as exc:
        raise ConfigError(f"malformed scenario config: {exc}") from exc


def load_scenario(path) -> ScenarioConfig:
    """Read a ScenarioConfig from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario config {path}: {exc}") from exc
    return scenario_from_dict(raw)


def save_scenario(path, cfg: ScenarioConfig) -> None:
    """Write a ScenarioConfig as JSON with stable key order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(scenario_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_scenario(
    distribution: str,
    skew: str,
    n: int = 500,
    hf_fraction: float = 0.1,
    reps: int = 50,
    seed: int = 0,
    trend: TrendSpec | None = None,
    shared: SharedSpec | None = None,
) -> ScenarioConfig:
    """Scenario with table-driven noise parameters.

    ``trend`` defaults to DEFAULT_TREND; pass WIND_TREND for the
    fluctuation-dominated regime. ``shared`` adds a smooth co-observed
    signal on top of the trend.
    """
    kwargs = {} if trend is None else {"trend": trend}
    return ScenarioConfig(
        distribution=distribution,
        skew=skew,
        n=n,
        hf_fraction=hf_fraction,
        reps=reps,
        seed=seed,
        shared=shared,
        **kwargs,
    )
