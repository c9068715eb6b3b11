"""Criterion 6/7 pilot: structural gaps, station trend, 1-start fit."""
import sys
import time

import numpy as np

from gapfusion.experiments import run_structural_experiment
from gapfusion.gp import FitConfig
from gapfusion.simulate import WIND_TREND, SharedSpec, default_scenario

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 10
n_starts = int(sys.argv[2]) if len(sys.argv) > 2 else 1
maxiter = int(sys.argv[3]) if len(sys.argv) > 3 else 60
seed = int(sys.argv[4]) if len(sys.argv) > 4 else 0
ls = float(sys.argv[5]) if len(sys.argv) > 5 else 30.0
sd = float(sys.argv[6]) if len(sys.argv) > 6 else 1.0

t0 = time.time()
scenario = default_scenario(
    "weibull", "high", n=400, reps=reps, seed=seed,
    trend=WIND_TREND, shared=SharedSpec(ls, sd),
)
report = run_structural_experiment(
    scenario, gap_lengths=(24, 96, 192),
    fit_config=FitConfig(n_starts=n_starts, maxiter=maxiter),
)
elapsed = time.time() - t0
print(f"elapsed {elapsed:.1f}s  ({elapsed / (3 * reps):.2f}s/rep)")

med = {(e["gap_length"], e["model"]): e["median_mae"] for e in report.summary}
for g in (24, 96, 192):
    row = "  ".join(
        f"{m} {med[(g, m)]:.4f}" for m in ("wmfgp", "mfgp", "gp", "si")
    )
    chain = med[(g, "wmfgp")] <= med[(g, "mfgp")] <= med[(g, "gp")] <= med[(g, "si")]
    print(f"gap {g:3d}: {row}  chain {chain}")

wmeds = [med[(g, "wmfgp")] for g in (24, 96, 192)]
spread = (max(wmeds) - min(wmeds)) / min(wmeds)
print(f"wmfgp spread {spread:.3f} (<0.25 needed)")

wrows = [r for r in report.rows if r["model"] == "wmfgp" and r["status"] == "ok"]
beats = np.mean([r["error_reduction"] > 0 for r in wrows])
print(f"beats surrogate {beats:.3f} (>=0.9 needed), n_ok {len(wrows)}")

for model in ("mfgp", "wmfgp"):
    rows = [
        r
        for r in report.rows
        if r["model"] == model and r["status"] == "ok" and r["coverage"] is not None
    ]
    total = sum(r["n_points"] for r in rows)
    cov = sum(r["coverage"] * r["n_points"] for r in rows) / total
    print(f"pooled coverage {model}: {cov:.4f} (need [0.85, 0.97])")
