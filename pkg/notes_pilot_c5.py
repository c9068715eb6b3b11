"""Full-scale criterion 5 verification: wind trend, 50 reps, n=500, hf 10%."""
import time

from gapfusion.experiments import run_random_experiment
from gapfusion.simulate import WIND_TREND, default_scenario

t0 = time.time()
scenario = default_scenario(
    "weibull", "high", n=500, hf_fraction=0.1, reps=50, seed=0, trend=WIND_TREND
)
report = run_random_experiment(scenario)
elapsed = time.time() - t0
print(f"elapsed {elapsed:.1f}s")
for entry in report.summary:
    print(
        f"{entry['model']:>6s}  n_ok {entry['n_ok']:2d}  "
        f"median {entry['median_mae']:.4f}  pooled_cov {entry['pooled_coverage']:.3f}"
    )
med = {e["model"]: e["median_mae"] for e in report.summary}
print("WMFGP<=MFGP", med["wmfgp"] <= med["mfgp"])
print("WMFGP<=GP  ", med["wmfgp"] <= med["gp"])
print("WMFGP<=WGP ", med["wmfgp"] <= med["wgp"])
print("BCMF>=WMFGP", med["bcmf"] >= med["wmfgp"])
