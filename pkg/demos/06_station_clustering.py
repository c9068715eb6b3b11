"""Group stations into small size-bounded clusters and pick pairing partners.

94 synthetic stations (lon, lat, altitude) are clustered into 26 groups
of 3-6 members each; a station needing a donor series is paired with a
uniformly random member of its own cluster.

Run: python3 demos/06_station_clustering.py
"""

from collections import Counter

import numpy as np

from gapfusion import Station, constrained_kmeans, pair_stations

rng = np.random.default_rng(4)

stations = [
    Station(
        id=f"S{i:02d}",
        lon=float(rng.uniform(7.5, 10.5)),
        lat=float(rng.uniform(44.0, 46.5)),
        alt=float(rng.uniform(10, 2400)),
    )
    for i in range(94)
]

clustering = constrained_kmeans(stations, k=26, min_size=3, max_size=6, seed=0)
sizes = Counter(clustering.assignments.values())
counts = Counter(sizes.values())
print(f"26 clusters; size distribution: "
      + ", ".join(f"{c} of size {s}" for s, c in sorted(counts.items())))
print(f"objective (within-cluster squared distance) {clustering.objective:.2f}")

target = "S07"
partners = [pair_stations(clustering, target, seed) for seed in range(5)]
print(f"cluster of {target}: {sorted(clustering.members(clustering.assignments[target]))}")
print(f"five seeded pairings for {target}: {partners}")
