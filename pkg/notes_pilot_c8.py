"""Pilot criterion 8: skewness sign of aX - bY over 20 constructions."""
import numpy as np

from gapfusion.metrics import sample_skewness

N = 100_000
neg = []
for seed in range(20):
    rng = np.random.default_rng(seed)
    shape = rng.uniform(0.7, 1.5)
    scale_t = rng.uniform(1.0, 3.0)
    scale_l = rng.uniform(1.0, 3.0)
    scale_h = rng.uniform(0.3, 1.0)
    t = scale_t * rng.weibull(shape, N)
    x = t + scale_h * rng.weibull(shape, N)
    y = t + scale_l * rng.weibull(shape, N)
    a, b = 1.0, float(rng.uniform(0.5, 1.5))
    sx, sy = sample_skewness(x), sample_skewness(y)
    corr = float(np.corrcoef(x, y)[0, 1])
    assert sx > 0 and sy > 0 and corr > 0, (seed, sx, sy, corr)
    s = sample_skewness(a * x - b * y)
    print(f"seed {seed:2d}  skew(X) {sx:5.2f}  skew(Y) {sy:5.2f}  corr {corr:.2f}  b {b:.2f}  skew(aX-bY) {s:+.3f}")
    if s <= 0:
        neg.append(seed)
print(f"negative at {len(neg)}/20 seeds: {neg}")
