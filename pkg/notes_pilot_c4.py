"""Pilot criterion 4: rho recovery on y_H = 2*y_L, N_L=400 noiseless."""
import time

import numpy as np

from gapfusion.gp import FitConfig, cov_matrix, KernelParams
from gapfusion.mfgp import NestedDesign, mfgp_fit

t0 = time.time()
hits = 0
rhos = []
for seed in range(20):
    rng = np.random.default_rng(seed)
    x = np.arange(400, dtype=float)
    k = cov_matrix(x, x, KernelParams(length_scale=25.0, signal_variance=4.0))
    y_lo = rng.multivariate_normal(np.zeros(400), k + 1e-10 * np.eye(400))
    idx = np.arange(0, 400, 5)
    design = NestedDesign(x, y_lo, x[idx], 2.0 * y_lo[idx])
    model = mfgp_fit(design, FitConfig(n_starts=2, seed=seed, maxiter=60))
    rhos.append(model.rho)
    if 1.8 <= model.rho <= 2.2:
        hits += 1
print(f"hits {hits}/20 in {time.time() - t0:.1f}s")
print("rhos:", " ".join(f"{r:.3f}" for r in rhos))
