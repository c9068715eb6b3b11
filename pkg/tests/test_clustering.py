"""Size-constrained k-means and within-cluster station pairing."""

import os
import tempfile

import numpy as np
import pytest

from gapfusion.errors import ConfigError, InvalidInputError, PairingError
from gapfusion.clustering import (
    Clustering,
    Station,
    cluster_report,
    constrained_kmeans,
    load_stations,
    pair_stations,
    standardize,
    write_cluster_report,
    write_clustering,
)


def _blobs(seed=0, centers=((0, 0, 0), (30, 30, 500), (-30, 20, 1500)), per=4):
    rng = np.random.default_rng(seed)
    stations = []
    for b, (lon, lat, alt) in enumerate(centers):
        for i in range(per):
            stations.append(
                Station(
                    id=f"B{b}S{i}",
                    lon=lon + rng.normal(0, 0.5),
                    lat=lat + rng.normal(0, 0.5),
                    alt=alt + rng.normal(0, 10),
                )
            )
    return stations


def _random_stations(n, seed=0):
    rng = np.random.default_rng(seed)
    return [
        Station(
            id=f"S{i:03d}",
            lon=float(rng.uniform(-5, 5)),
            lat=float(rng.uniform(40, 47)),
            alt=float(rng.uniform(0, 2500)),
        )
        for i in range(n)
    ]


def test_recovers_separable_blobs():
    stations = _blobs()
    clustering = constrained_kmeans(stations, k=3, min_size=3, max_size=6, seed=0)
    groups = {}
    for sid, label in clustering.assignments.items():
        groups.setdefault(sid[:2], set()).add(label)
    # every blob lands in exactly one cluster
    assert all(len(labels) == 1 for labels in groups.values())
    assert len({next(iter(v)) for v in groups.values()}) == 3


def test_size_bounds_hold():
    stations = _random_stations(94)
    clustering = constrained_kmeans(stations, k=26, min_size=3, max_size=6, seed=1)
    sizes = clustering.sizes()
    assert sizes.min() >= 3 and sizes.max() <= 6
    assert sizes.sum() == 94


def test_infeasible_bounds_rejected():
    stations = _random_stations(10)
    with pytest.raises(ConfigError):
        constrained_kmeans(stations, k=4, min_size=3, max_size=6, seed=0)
    with pytest.raises(ConfigError):
        constrained_kmeans(stations, k=2, min_size=1, max_size=4, seed=0)


def test_objective_trace_monotone_nonincreasing():
    stations = _random_stations(40, seed=3)
    clustering = constrained_kmeans(stations, k=10, min_size=3, max_size=6, seed=2)
    trace = np.array(clustering.objective_trace)
    assert np.all(np.diff(trace) <= 1e-9)
    assert clustering.objective == trace[-1]


def test_assignments_invariant_to_per_feature_scaling():
    # z-scoring absorbs any per-coordinate unit change
    stations = _random_stations(30, seed=4)
    scaled = [
        Station(id=s.id, lon=s.lon * 1000.0, lat=s.lat * 1000.0, alt=s.alt * 1000.0)
        for s in stations
    ]
    a = constrained_kmeans(stations, k=8, min_size=3, max_size=5, seed=5)
    b = constrained_kmeans(scaled, k=8, min_size=3, max_size=5, seed=5)
    assert a.assignments == b.assignments


def test_standardize_zero_spread_column():
    coords = np.array([[1.0, 2.0, 5.0], [1.0, 3.0, 7.0], [1.0, 4.0, 9.0]])
    z = standardize(coords)
    assert np.all(np.isfinite(z))
    assert np.allclose(z[:, 0], 0.0)


def test_pairing_same_cluster_not_self():
    stations = _random_stations(40, seed=6)
    clustering = constrained_kmeans(stations, k=10, min_size=3, max_size=6, seed=0)
    partner = pair_stations(clustering, "S005", seed=1)
    assert partner != "S005"
    assert clustering.assignments[partner] == clustering.assignments["S005"]


def test_pairing_is_roughly_uniform():
    stations = _random_stations(12, seed=7)
    clustering = constrained_kmeans(stations, k=2, min_size=6, max_size=6, seed=0)
    target = stations[0].id
    members = [
        sid
        for sid, label in clustering.assignments.items()
        if label == clustering.assignments[target] and sid != target
    ]
    counts = {sid: 0 for sid in members}
    for seed in range(2000):
        counts[pair_stations(clustering, target, seed=seed)] += 1
    freq = np.array(list(counts.values())) / 2000.0
    assert np.all(np.abs(freq - 1.0 / len(members)) < 0.05)


def test_pairing_errors():
    stations = _random_stations(6, seed=8)
    clustering = constrained_kmeans(stations, k=2, min_size=3, max_size=3, seed=0)
    with pytest.raises(KeyError):
        pair_stations(clustering, "missing", seed=0)
    lonely = Clustering(
        k=2,
        assignments={"a": 0, "b": 1, "c": 1},
        centroids=np.zeros((2, 3)),
        min_size=1,
        max_size=3,
        objective=0.0,
        objective_trace=(0.0,),
    )
    with pytest.raises(PairingError):
        pair_stations(lonely, "a", seed=0)


def test_cluster_report_rows():
    stations = _random_stations(30, seed=9)
    # N=30 with sizes in [3, 6] admits k in [5, 10] only
    rows = cluster_report(stations, k_values=[2, 5, 8, 50], min_size=3, max_size=6, seed=0)
    ks = [r["k"] for r in rows]
    assert 2 not in ks and 50 not in ks  # infeasible k skipped
    assert set(ks) == {5, 8}
    assert all(np.isfinite(r["objective"]) for r in rows)
    assert all(-1.0 <= r["silhouette"] <= 1.0 for r in rows)


def test_station_csv_round_trip_and_errors():
    stations = _random_stations(9, seed=10)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "stations.csv")
        lines = ["id,lon,lat,alt"]
        lines.extend(f"{s.id},{s.lon!r},{s.lat!r},{s.alt!r}" for s in stations)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        loaded = load_stations(path)
        assert [s.id for s in loaded] == [s.id for s in stations]

        bad = os.path.join(tmp, "bad.csv")
        with open(bad, "w", encoding="utf-8") as fh:
            fh.write("id,lon,lat,alt\nS1,1.0,not-a-number,3.0\n")
        with pytest.raises(InvalidInputError) as exc_info:
            load_stations(bad)
        assert "bad.csv" in str(exc_info.value)

        clustering = constrained_kmeans(stations, k=3, min_size=3, max_size=3, seed=0)
        out = os.path.join(tmp, "assign.csv")
        write_clustering(out, clustering)
        with open(out, encoding="utf-8") as fh:
            rows = fh.read().splitlines()
        assert rows[0] == "id,cluster"
        assert [r.split(",")[0] for r in rows[1:]] == [s.id for s in stations]

        report_rows = cluster_report(stations, [3], 3, 3, seed=0)
        rep = os.path.join(tmp, "report.csv")
        write_cluster_report(rep, report_rows)
        with open(rep, encoding="utf-8") as fh:
            assert fh.readline().strip() == "k,objective,silhouette"


def test_restarts_never_worsen_objective():
    stations = _random_stations(40, seed=11)
    single = constrained_kmeans(stations, k=10, min_size=3, max_size=6, seed=3, n_restarts=1)
    multi = constrained_kmeans(stations, k=10, min_size=3, max_size=6, seed=3, n_restarts=10)
    assert multi.objective <= single.objective + 1e-12
