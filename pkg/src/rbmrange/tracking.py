"""Ingestion of tracking data (Movebank-style CSV) into trajectories.

Positions are normalized into a unit-scale frame by a pure affine map
(shared isotropic scale, no geographic projection); the map is recorded
in the trajectory's metadata so callers can invert it exactly.
"""

import csv
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .dynamics import Trajectory
from .exceptions import NonMonotoneTimestamps, ParseError

DEFAULT_COLUMNS = {
    "timestamp": "timestamp",
    "longitude": "location-long",
    "latitude": "location-lat",
}

GAP_FACTOR = 5.0


@dataclass(frozen=True)
class TrackRecord:
    """One ingested fix: raw coordinates plus the normalized position."""

    timestamp: float
    longitude: float
    latitude: float
    x: float
    y: float


def _parse_timestamp(text, line_no):
    """Seconds since epoch from a numeric or ISO 'YYYY-MM-DD hh:mm:ss[.fff]'."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise ParseError(f"unreadable timestamp {text!r}", line=line_no) from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def _parse_float(text, name, line_no):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"unreadable {name} {text!r}", line=line_no) from None


def fit_normalization(lon, lat):
    """Affine map onto the unit-scale frame: subtract mins, divide by the
    larger coordinate range (isotropic, so lengths keep their aspect)."""
    offset = (float(np.min(lon)), float(np.min(lat)))
    scale = float(max(np.ptp(lon), np.ptp(lat)))
    if scale <= 0:
        scale = 1.0
    return {"offset": [offset[0], offset[1]], "scale": scale}


def apply_normalization(lon, lat, norm):
    ox, oy = norm["offset"]
    s = norm["scale"]
    return (np.asarray(lon, dtype=float) - ox) / s, \
           (np.asarray(lat, dtype=float) - oy) / s


def invert_normalization(x, y, norm):
    ox, oy = norm["offset"]
    s = norm["scale"]
    return np.asarray(x, dtype=float) * s + ox, \
           np.asarray(y, dtype=float) * s + oy


def read_track_records(path, columns=None, normalization="fit"):
    """Parse the CSV into TrackRecords (normalized, timestamp-checked)."""
    colmap = dict(DEFAULT_COLUMNS)
    if columns:
        colmap.update(columns)

    times, lons, lats = [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError("empty file", line=1)
        missing = [c for c in colmap.values() if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"missing columns: {', '.join(missing)}", line=1)
        for row in reader:
            line_no = reader.line_num
            raw_t = row.get(colmap["timestamp"])
            raw_lon = row.get(colmap["longitude"])
            raw_lat = row.get(colmap["latitude"])
            if raw_t is None or raw_lon is None or raw_lat is None:
                raise ParseError("short row", line=line_no)
            times.append(_parse_timestamp(raw_t, line_no))
            lons.append(_parse_float(raw_lon, "longitude", line_no))
            lats.append(_parse_float(raw_lat, "latitude", line_no))

    if len(times) < 2:
        raise ParseError("need at least 2 records", line=None)

    times = np.asarray(times)
    lons = np.asarray(lons)
    lats = np.asarray(lats)
    if not np.all(np.diff(times) > 0):
        bad = int(np.argmin(np.diff(times) > 0))
        raise NonMonotoneTimestamps(
            f"timestamps not strictly increasing at record {bad + 1}")

    norm = fit_normalization(lons, lats) if normalization == "fit" \
        else dict(normalization)
    xs, ys = apply_normalization(lons, lats, norm)
    records = [TrackRecord(float(t), float(lo), float(la), float(x), float(y))
               for t, lo, la, x, y in zip(times, lons, lats, xs, ys)]
    return records, norm


def ingest_tracking_csv(path, columns=None, normalization="fit"):
    """Tracking CSV -> Trajectory in the unit-scale frame.

    The sampling step is the median inter-record gap.  Gaps larger than
    5x the median are flagged: their increments are excluded from drift
    estimation (via Trajectory.breaks) and listed in the metadata.
    """
    records, norm = read_track_records(path, columns, normalization)
    times = np.array([r.timestamp for r in records])
    pos = np.array([[r.x, r.y] for r in records])

    gaps = np.diff(times)
    median_gap = float(np.median(gaps))
    flagged = np.nonzero(gaps > GAP_FACTOR * median_gap)[0]

    meta = {
        "source": str(path),
        "n_records": len(records),
        "normalization": norm,
        "median_gap": median_gap,
        "flagged_gaps": [int(i) for i in flagged],
    }
    return Trajectory(pos, median_gap, seed=None, provenance="ingested",
                      timestamps=times, breaks=flagged, meta=meta)
