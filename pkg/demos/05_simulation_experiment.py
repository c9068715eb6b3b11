"""Run a small simulation experiment and read its report files.

Ten replications of the scattered-missingness comparison on the
high-skew Weibull configuration, then a quick structural-gap run.
Full-size runs go through the CLI: `gapfusion simulate-random --help`.

Run: python3 demos/05_simulation_experiment.py
"""

import tempfile
from pathlib import Path

from gapfusion import (
    default_scenario,
    run_random_experiment,
    run_structural_experiment,
)
from gapfusion.gp import FitConfig

fast = FitConfig(n_starts=2, seed=0, maxiter=60)

scenario = default_scenario("weibull", "high", n=250, hf_fraction=0.15, reps=10, seed=42)
report = run_random_experiment(scenario, fit_config=fast)
print("scattered missingness, 10 replications:")
for entry in report.summary:
    print(f"  {entry['model']:>6s}  median MAE {entry['median_mae']:.3f}  "
          f"pooled coverage {entry['pooled_coverage']:.2f}")

structural = run_structural_experiment(
    default_scenario("weibull", "high", n=250, hf_fraction=0.15, reps=5, seed=42),
    gap_lengths=(48,),
    fit_config=fast,
)
print("one 48-hour structural gap, 5 replications:")
for entry in structural.summary:
    red = entry["median_error_reduction"]
    red_s = f"{red:+.1%}" if red is not None else "   n/a"
    print(f"  {entry['model']:>9s}  median MAE {entry['median_mae']:.3f}  "
          f"error reduction {red_s}")

with tempfile.TemporaryDirectory() as tmp:
    report.write(tmp)
    names = sorted(p.name for p in Path(tmp).iterdir())
    print(f"report files written: {', '.join(names)}")
