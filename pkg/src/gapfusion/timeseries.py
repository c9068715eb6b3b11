"""Hourly time-series ingestion, aggregation, and gap classification.

Raw station CSVs (timestamp, value, optional station_id) are parsed with a
rejects report instead of silent dropping; sub-hourly records aggregate to
hourly means on a dense grid; maximal runs of missing hours are classified
by length: short (< 15 h), target (15 to 192 h, the fillable band), and
structural (> 192 h, refused by default downstream).

Missing values are carried as NaN on a strictly increasing timestamp grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateTimestampError, InvalidInputError

SHORT_GAP_MAX = 15  # exclusive upper bound, hours
TARGET_GAP_MAX = 192  # inclusive upper bound, hours
GAP_CLASSES = ("short", "target", "structural")

MISSING_MARKERS = {"", "na", "nan", "null", "none", "-"}

HOUR = np.timedelta64(1, "h")


def classify_gap_length(length: int) -> str:
    if length < 1:
        raise InvalidInputError("gap length must be >= 1")
    if length < SHORT_GAP_MAX:
        return "short"
    if length <= TARGET_GAP_MAX:
        return "target"
    return "structural"


@dataclass(frozen=True)
class TimeSeries:
    """Timestamped values with NaN as the missing marker."""

    station_id: str
    timestamps: np.ndarray  # datetime64[s], strictly increasing
    values: np.ndarray
    unit: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[s]")
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if ts.size != vals.size:
            raise InvalidInputError("timestamps and values differ in length")
        if ts.size == 0:
            raise InvalidInputError("empty series")
        if ts.size > 1 and not np.all(np.diff(ts) > np.timedelta64(0, "s")):
            raise InvalidInputError("timestamps must be strictly increasing")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    @property
    def is_hourly(self) -> bool:
        if self.timestamps.size < 2:
            return True
        return bool(np.all(np.diff(self.timestamps) == HOUR))

    def hours_since_start(self) -> np.ndarray:
        """Float hour offsets from the first timestamp (model time axis)."""
        delta = (self.timestamps - self.timestamps[0]).astype("timedelta64[s]")
        return delta.astype(float) / 3600.0


@dataclass(frozen=True)
class RejectedRow:
    row: int
    reason: str
    raw: str


def _parse_timestamp(text: str):
    try:
        ts = np.datetime64(text.strip())
    except ValueError:
        return None
    # bare dates or malformed strings become NaT rather than raising
    if np.isnat(ts):
        return None
    return ts.astype("datetime64[s]")


def load_series_csv(path, schema: dict | None = None):
    """Parse a station CSV into (TimeSeries, rejects).

    ``schema`` may rename the columns, e.g. {"timestamp": "time",
    "value": "speed", "station_id": "site"}; the defaults are
    timestamp/value/station_id. Unparseable rows are returned as
    RejectedRow entries; duplicate or backwards timestamps are hard
    errors naming the row.
    """
    names = {"timestamp": "timestamp", "value": "value", "station_id": "station_id"}
    if schema:
        names.update(schema)
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline().strip()
        if not header_line:
            raise InvalidInputError(f"{path}: empty file")
        header = [h.strip() for h in header_line.split(",")]
        try:
            ts_col = header.index(names["timestamp"])
            val_col = header.index(names["value"])
        except ValueError:
            raise InvalidInputError(
                f"{path}: required columns {names['timestamp']!r}, "
                f"{names['value']!r} not in header {header}"
            ) from None
        sid_col = header.index(names["station_id"]) if names["station_id"] in header else None

        timestamps = []
        values = []
        rejects = []
        station_id = ""
        seen = {}
        last_ts = None
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) <= max(ts_col, val_col):
                rejects.append(RejectedRow(lineno, "too few columns", line))
                continue
            ts = _parse_timestamp(parts[ts_col])
            if ts is None:
                rejects.append(RejectedRow(lineno, "unparseable timestamp", line))
                continue
            if ts in seen:
                raise DuplicateTimestampError(
                    f"{path}:{lineno}: timestamp {ts} already seen at row {seen[ts]}"
                )
            if last_ts is not None and ts < last_ts:
                raise InvalidInputError(
                    f"{path}:{lineno}: timestamp {ts} goes backwards"
                )
            raw_val = parts[val_col].strip()
            if raw_val.lower() in MISSING_MARKERS:
                value = float("nan")
            else:
                try:
                    value = float(raw_val)
                except ValueError:
                    rejects.append(RejectedRow(lineno, "unparseable value", line))
                    continue
            if sid_col is not None and len(parts) > sid_col and parts[sid_col].strip():
                station_id = parts[sid_col].strip()
            seen[ts] = lineno
            last_ts = ts
            timestamps.append(ts)
            values.append(value)
    if not timestamps:
        raise InvalidInputError(f"{path}: no parseable rows")
    series = TimeSeries(
        station_id=station_id,
        timestamps=np.array(timestamps, dtype="datetime64[s]"),
        values=np.array(values),
    )
    return series, rejects


def write_series_csv(path, series: TimeSeries) -> None:
    """Write the ingestion CSV schema (timestamp, value, station_id)."""
    lines = ["timestamp,value,station_id"]
    for ts, v in zip(series.timestamps, series.values):
        val = "NA" if np.isnan(v) else repr(float(v))
        lines.append(f"{ts},{val},{series.station_id}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_rejects_csv(path, rejects) -> None:
    lines = ["row,reason,raw"]
    for r in rejects:
        raw = r.raw.replace('"', '""')
        lines.append(f'{r.row},{r.reason},"{raw}"')
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def hourly_aggregate(series: TimeSeries) -> TimeSeries:
    """Mean over [h, h+1) on a dense hourly grid; empty hours become NaN."""
    hours = series.timestamps.astype("datetime64[h]")
    grid = np.arange(hours[0], hours[-1] + np.timedelta64(1, "h"))
    sums = np.zeros(grid.size)
    counts = np.zeros(grid.size, dtype=int)
    idx = (hours - hours[0]).astype(int)
    finite = np.isfinite(series.values)
    np.add.at(sums, idx[finite], series.values[finite])
    np.add.at(counts, idx[finite], 1)
    values = np.full(grid.size, np.nan)
    nonzero = counts > 0
    values[nonzero] = sums[nonzero] / counts[nonzero]
    return TimeSeries(
        station_id=series.station_id,
        timestamps=grid.astype("datetime64[s]"),
        values=values,
        unit=series.unit,
    )


@dataclass(frozen=True)
class Gap:
    start: np.datetime64
    start_index: int
    length: int  # hours

    @property
    def gap_class(self) -> str:
        return classify_gap_length(self.length)


@dataclass(frozen=True)
class GapReport:
    station_id: str
    gaps: tuple = ()
    histogram: dict = field(default_factory=dict)

    def by_class(self, gap_class: str) -> tuple:
        if gap_class not in GAP_CLASSES:
            raise InvalidInputError(f"unknown gap class {gap_class!r}")
        return tuple(g for g in self.gaps if g.gap_class == gap_class)

    def to_csv(self, path) -> None:
        lines = ["start,length_hours,class"]
        lines.extend(f"{g.start},{g.length},{g.gap_class}" for g in self.gaps)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    def histogram_to_csv(self, path) -> None:
        lines = ["length_hours,count"]
        lines.extend(f"{k},{v}" for k, v in sorted(self.histogram.items()))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def detect_and_classify_gaps(series: TimeSeries) -> GapReport:
    """Maximal NaN runs of an hourly series, with length classes."""
    if not series.is_hourly:
        raise InvalidInputError("gap detection expects an hourly series")
    missing = ~np.isfinite(series.values)
    gaps = []
    histogram = {}
    i = 0
    n = missing.size
    while i < n:
        if not missing[i]:
            i += 1
            continue
        j = i
        while j < n and missing[j]:
            j += 1
        length = j - i
        gaps.append(
            Gap(start=series.timestamps[i], start_index=i, length=length)
        )
        histogram[length] = histogram.get(length, 0) + 1
        i = j
    return GapReport(
        station_id=series.station_id, gaps=tuple(gaps), histogram=histogram
    )
