"""Size-constrained station clustering and within-cluster pairing.

Stations are clustered on z-scored (lon, lat, alt) coordinates so no
coordinate dominates through its units; altitude in particular must keep
its weight. The assignment step is a greedy min-cost allocation under a
per-cluster maximum, repaired to satisfy the per-cluster minimum;
iterations are accepted only while the within-cluster sum of squared
distances improves, and the best of several restarts is kept.

Pairing draws a uniformly random other member of the target's cluster,
giving each station a surrogate series source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidInputError, PairingError

N_RESTARTS = 10
MAX_ITER = 100


@dataclass(frozen=True)
class Station:
    """A measurement site; ``series_ref`` optionally points at its data."""

    id: str
    lon: float
    lat: float
    alt: float
    series_ref: str | None = None

    def __post_init__(self):
        for name in ("lon", "lat", "alt"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"station {self.id}: {name} not finite")


@dataclass(frozen=True)
class Clustering:
    """A size-bounded partition of stations.

    ``assignments`` maps station id to cluster index in input order;
    ``centroids`` live in the standardized coordinate space.
    ``objective_trace`` holds the accepted within-cluster sum of squared
    distances per iteration of the winning restart, non-increasing.
    """

    k: int
    assignments: dict
    centroids: np.ndarray
    min_size: int
    max_size: int
    objective: float = float("nan")
    objective_trace: tuple = ()

    def __post_init__(self):
        labels = np.array(list(self.assignments.values()))
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise InvalidInputError("cluster labels out of range")
        sizes = np.bincount(labels, minlength=self.k)
        if np.any(sizes < self.min_size) or np.any(sizes > self.max_size):
            raise InvalidInputError(
                f"cluster sizes {sizes.tolist()} violate bounds "
                f"[{self.min_size}, {self.max_size}]"
            )

    def members(self, cluster: int) -> list:
        return [sid for sid, c in self.assignments.items() if c == cluster]

    def sizes(self) -> np.ndarray:
        return np.bincount(
            np.array(list(self.assignments.values())), minlength=self.k
        )


def _coords(stations) -> np.ndarray:
    if not stations:
        raise InvalidInputError("no stations given")
    ids = [s.id for s in stations]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("duplicate station ids")
    return np.array([[s.lon, s.lat, s.alt] for s in stations], dtype=float)


def standardize(coords: np.ndarray) -> np.ndarray:
    """Z-score each column; constant columns pass through as zeros."""
    mean = coords.mean(axis=0)
    sd = coords.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return (coords - mean) / sd


def _greedy_assign(d2: np.ndarray, max_size: int) -> np.ndarray:
    """Assign each row to a column by ascending distance under capacity."""
    n, k = d2.shape
    flat_order = np.lexsort(
        (np.tile(np.arange(k), n), np.repeat(np.arange(n), k), d2.ravel())
    )
    labels = np.full(n, -1)
    counts = np.zeros(k, dtype=int)
    assigned = 0
    for flat in flat_order:
        i, c = divmod(int(flat), k)
        if labels[i] >= 0 or counts[c] >= max_size:
            continue
        labels[i] = c
        counts[c] += 1
        assigned += 1
        if assigned == n:
            break
    return labels


def _repair_minima(labels, counts, d2, min_size: int):
    """Move cheapest stations from over-minimum clusters into deficits."""
    k = counts.size
    while True:
        deficits = [c for c in range(k) if counts[c] < min_size]
        if not deficits:
            return
        target = deficits[0]
        best = None
        for i, c in enumerate(labels):
            if c == target or counts[c] <= min_size:
                continue
            cost = d2[i, target]
            if best is None or cost < best[0]:
                best = (cost, i)
        if best is None:
            raise ConfigError("cannot repair cluster minima; bounds infeasible")
        _, i = best
        counts[labels[i]] -= 1
        labels[i] = target
        counts[target] += 1


def _inertia(z, labels, centroids) -> float:
    return float(np.sum((z - centroids[labels]) ** 2))


def _one_run(z, k, min_size, max_size, rng):
    n = z.shape[0]
    centroids = z[rng.choice(n, size=k, replace=False)]
    labels = None
    trace = []
    prev = math.inf
    for _ in range(MAX_ITER):
        d2 = ((z[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = _greedy_assign(d2, max_size)
        counts = np.bincount(new_labels, minlength=k)
        _repair_minima(new_labels, counts, d2, min_size)
        new_centroids = np.array(
            [
                z[new_labels == c].mean(axis=0) if counts[c] else centroids[c]
                for c in range(k)
            ]
        )
        obj = _inertia(z, new_labels, new_centroids)
        # accept only strict improvements; a stable assignment repeats its
        # objective and stops here, keeping the trace non-increasing
        if not obj < prev - 1e-12:
            if labels is None:
                labels, centroids, prev = new_labels, new_centroids, obj
                trace.append(obj)
            break
        labels, centroids, prev = new_labels, new_centroids, obj
        trace.append(obj)
    return labels, centroids, prev, tuple(trace)


def constrained_kmeans(
    stations,
    k: int,
    min_size: int,
    max_size: int,
    seed,
    n_restarts: int = N_RESTARTS,
) -> Clustering:
    """Cluster stations into k size-bounded groups; best of restarts."""
    coords = _coords(stations)
    n = coords.shape[0]
    if k < 1:
        raise ConfigError("k must be >= 1")
    if min_size < 0 or max_size < max(min_size, 1):
        raise ConfigError(f"invalid size bounds [{min_size}, {max_size}]")
    if not k * min_size <= n <= k * max_size:
        raise ConfigError(
            f"{n} stations cannot fill {k} clusters with sizes in "
            f"[{min_size}, {max_size}]"
        )
    z = standardize(coords)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(n_restarts, 1)):
        labels, centroids, obj, trace = _one_run(z, k, min_size, max_size, rng)
        if best is None or obj < best[2]:
            best = (labels, centroids, obj, trace)
    labels, centroids, obj, trace = best
    assignments = {s.id: int(c) for s, c in zip(stations, labels)}
    return Clustering(
        k=k,
        assignments=assignments,
        centroids=centroids,
        min_size=min_size,
        max_size=max_size,
        objective=obj,
        objective_trace=trace,
    )


def pair_stations(clustering: Clustering, target_station: str, seed) -> str:
    """Uniformly random other member of the target's cluster."""
    if target_station not in clustering.assignments:
        raise KeyError(f"station {target_station!r} not in clustering")
    cluster = clustering.assignments[target_station]
    others = [s for s in clustering.members(cluster) if s != target_station]
    if not others:
        raise PairingError(
            f"station {target_station!r} is alone in cluster {cluster}"
        )
    rng = np.random.default_rng(seed)
    return others[int(rng.integers(0, len(others)))]


def silhouette_score(z: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette over points; needs at least 2 clusters."""
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise InvalidInputError("silhouette needs at least 2 clusters")
    d = np.sqrt(((z[:, None, :] - z[None, :, :]) ** 2).sum(axis=2))
    scores = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        own = labels == labels[i]
        own[i] = False
        a = d[i, own].mean() if np.any(own) else 0.0
        b = min(
            d[i, labels == c].mean() for c in uniq if c != labels[i]
        )
        scores[i] = 0.0 if max(a, b) == 0 else (b - a) / max(a, b)
    return float(scores.mean())


def cluster_report(stations, k_values, min_size, max_size, seed) -> list:
    """Elbow/silhouette rows to guide the choice of k.

    Returns one dict per feasible k with the clustering objective and the
    mean silhouette (NaN for k=1). Infeasible k values are skipped.
    """
    z = standardize(_coords(stations))
    rows = []
    for k in k_values:
        try:
            clustering = constrained_kmeans(stations, k, min_size, max_size, seed)
        except ConfigError:
            continue
        labels = np.array([clustering.assignments[s.id] for s in stations])
        sil = silhouette_score(z, labels) if k >= 2 else float("nan")
        rows.append(
            {"k": k, "objective": clustering.objective, "silhouette": sil}
        )
    return rows


def load_stations(path) -> list:
    """Read stations from CSV with header id,lon,lat,alt[,series_ref]."""
    stations = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        expected = ["id", "lon", "lat", "alt"]
        if header[: len(expected)] != expected:
            raise InvalidInputError(
                f"station file must start with columns {expected}, got {header}"
            )
        has_ref = len(header) > 4 and header[4] == "series_ref"
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 4:
                raise InvalidInputError(f"{path}:{lineno}: expected 4+ columns")
            try:
                stations.append(
                    Station(
                        id=parts[0],
                        lon=float(parts[1]),
                        lat=float(parts[2]),
                        alt=float(parts[3]),
                        series_ref=parts[4] if has_ref and len(parts) > 4 else None,
                    )
                )
            except ValueError as exc:
                raise InvalidInputError(f"{path}:{lineno}: {exc}") from exc
    return stations


def write_clustering(path, clustering: Clustering) -> None:
    """Write assignments as CSV (id, cluster) in input order."""
    lines = ["id,cluster"]
    lines.extend(f"{sid},{c}" for sid, c in clustering.assignments.items())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_cluster_report(path, rows) -> None:
    lines = ["k,objective,silhouette"]
    lines.extend(
        f"{r['k']},{r['objective']!r},{r['silhouette']!r}" for r in rows
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
