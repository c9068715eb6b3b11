"""Fill one long contiguous gap with every model and compare errors.

A 96-hour gap is carved out of a skewed high-fidelity series; the
complete low-fidelity companion plus the surrounding HF hours are the
training data. Lower MAE is better; the raw LF values over the gap are
the bar any model must clear.

Run: python3 demos/04_gap_filling_models.py
"""

import numpy as np

from gapfusion import (
    FitConfig,
    NestedDesign,
    bcmf_fill,
    gp_fill,
    mfgp_fill,
    simple_impute,
    wgp_fill,
    wmfgp_fill,
)

rng = np.random.default_rng(3)

n = 400
x = np.arange(n, dtype=float)
trend = 6.0 + 2.0 * np.sin(2 * np.pi * x / 24.0) + np.linspace(0, 1.5, n)
y_lo = trend + 2.0 * rng.weibull(0.8, n)             # complete, noisy, skewed
y_hi = 1.5 * trend + 0.5 * rng.weibull(0.8, n)       # accurate, gets the gap

start, stop = 180, 276                               # 96 missing hours
observed = np.ones(n, dtype=bool)
observed[start:stop] = False
query = x[start:stop]
truth = y_hi[start:stop]

cfg = FitConfig(n_starts=2, seed=3, maxiter=100)
design = NestedDesign(x, y_lo, x[observed], y_hi[observed])

fills = {
    "si": simple_impute(x[observed], y_hi[observed], query),
    "gp": gp_fill(x[observed], y_hi[observed], query, cfg),
    "wgp": wgp_fill(x[observed], y_hi[observed], query, cfg),
    "mfgp": mfgp_fill(design, query, cfg),
    "bcmf": bcmf_fill(design, query, cfg),
    "wmfgp": wmfgp_fill(design, query, cfg),
}

surrogate_mae = float(np.mean(np.abs(truth - y_lo[start:stop])))
print(f"{'model':>6s}  {'MAE':>6s}  vs surrogate {surrogate_mae:.3f}")
for name, result in fills.items():
    mae = float(np.mean(np.abs(truth - result.mean)))
    beat = "beats" if mae < surrogate_mae else "loses to"
    print(f"{name:>6s}  {mae:6.3f}  {beat} surrogate")
