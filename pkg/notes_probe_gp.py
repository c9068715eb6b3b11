"""Anatomy of one structural rep: what does the HF-only GP actually fit?"""
import numpy as np

from gapfusion.experiments import EXPERIMENT_FIT
from gapfusion.pipelines import gp_fill, simple_impute
from gapfusion.simulate import (
    WIND_TREND,
    SharedSpec,
    build_pair,
    sample_noise,
    sample_shared,
    default_scenario,
    synth_trend,
)

for ls, sd in ((30.0, 1.0), (50.0, 1.2)):
    print(f"=== shared ls {ls} sd {sd} ===")
    sc = default_scenario("weibull", "high", n=400, trend=WIND_TREND,
                          shared=SharedSpec(ls, sd))
    for seed in (0, 1, 2):
        rng = np.random.default_rng(seed)
        n = sc.n
        trend = synth_trend(n, sc.trend)
        s = sample_shared(sc.shared, n, rng)
        signal = trend + s
        w_lo = sample_noise(sc.w_lo, n, rng)
        w_hi = sample_noise(sc.w_hi, n, rng)
        y_lo, y_hi = build_pair(signal, w_lo, w_hi)
        x = np.arange(n, dtype=float)
        print(f" seed {seed}: noise_hi sd {w_hi.std():.3f} "
              f"mean-med {np.mean(w_hi) - np.median(w_hi):+.3f}  "
              f"signal sd {signal.std():.3f}")
        for gap in (24, 96):
            start = 200 - gap // 2
            stop = start + gap
            mask = np.ones(n, bool)
            mask[start:stop] = False
            query = x[start:stop]
            truth = y_hi[start:stop]
            res = gp_fill(x[mask], y_hi[mask], query, EXPERIMENT_FIT)
            si = simple_impute(x[mask], y_hi[mask], query)
            k = res.diagnostics
            # error against the noiseless signal: tracking quality alone
            gp_track = float(np.mean(np.abs(res.mean - signal[start:stop])))
            si_track = float(np.mean(np.abs(si.mean - signal[start:stop])))
            floor = float(np.mean(np.abs(w_hi[start:stop]
                                         - np.median(w_hi[mask]))))
            print(
                f"  gap {gap:3d}: gp mae {np.mean(np.abs(res.mean - truth)):.3f}"
                f" si mae {np.mean(np.abs(si.mean - truth)):.3f}"
                f" | track gp {gp_track:.3f} si {si_track:.3f}"
                f" | med-floor {floor:.3f} | fit {k}"
            )
