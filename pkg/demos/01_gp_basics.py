"""Fit a GP to noisy observations and see where a lone GP stops helping.

Two blocks are held out of a noisy daily cycle: a short one (12 hours)
and a long one (36 hours). The GP bridges the short block easily, but
over the long block it reverts toward the training mean because the gap
exceeds the fitted length scale. That failure mode is what the
two-fidelity models in the rest of this package address.

Run: python3 demos/01_gp_basics.py
"""

import numpy as np

from gapfusion import FitConfig, gp_fit, gp_predict

rng = np.random.default_rng(0)

x = np.arange(240, dtype=float)
truth = 5.0 + 2.0 * np.sin(2 * np.pi * x / 24.0)
y = truth + 0.3 * rng.normal(size=x.size)
short, long_ = slice(60, 72), slice(140, 176)
train = np.ones(x.size, dtype=bool)
train[short] = False
train[long_] = False

c = y[train].mean()
model = gp_fit(x[train], y[train] - c, FitConfig(seed=0))
print(f"fitted length scale {model.kernel.length_scale:.2f} h, "
      f"signal variance {model.kernel.signal_variance:.2f}, "
      f"noise variance {model.noise_variance:.3f}")
print(f"NLML {model.nlml:.2f}")

for name, held in (("12 h gap", short), ("36 h gap", long_)):
    mean, var = gp_predict(model, x[held])
    mean = mean + c
    sd = np.sqrt(var)
    mae = np.mean(np.abs(mean - truth[held]))
    inside = np.mean(
        (truth[held] >= mean - 1.96 * sd) & (truth[held] <= mean + 1.96 * sd)
    )
    print(f"{name}: MAE {mae:.3f} (noise sd 0.3), interval coverage {inside:.2f}, "
          f"mean interval half-width {1.96 * sd.mean():.2f}")
