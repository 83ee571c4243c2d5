"""Deterministic file formats: CSVs with shortest round-trip floats and
canonical (sorted-key) JSON.  Identical inputs produce identical bytes;
nothing here writes timestamps or environment-dependent values.
"""

import json
import os

import numpy as np

from .dynamics import Trajectory
from .exceptions import ParseError


def fmt(v):
    """Shortest decimal that round-trips the float exactly."""
    return repr(float(v))


def dump_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text + "\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _write_rows(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_trajectory_csv(traj, path, manifest_path=None):
    """Rows "i,t,x,y"; t is i*delta for simulated paths and the source
    timestamp for ingested ones.  The sidecar manifest records seed,
    delta, step count and the domain/drift specs (or ingestion info)."""
    if traj.timestamps is not None:
        ts = traj.timestamps
    else:
        ts = np.arange(len(traj.positions)) * traj.delta
    rows = ((str(i), fmt(t), fmt(p[0]), fmt(p[1]))
            for i, (t, p) in enumerate(zip(ts, traj.positions)))
    _write_rows(path, "i,t,x,y", rows)

    if manifest_path is not None:
        manifest = {
            "seed": traj.seed,
            "delta": traj.delta,
            "n_steps": traj.n_steps,
            "provenance": traj.provenance,
            "domain": traj.meta.get("domain"),
            "drift": traj.meta.get("drift"),
            "breaks": sorted(traj.breaks),
        }
        for key in ("normalization", "median_gap", "flagged_gaps", "source"):
            if key in traj.meta:
                manifest[key] = traj.meta[key]
        dump_json(manifest, manifest_path)
    return path


def read_trajectory_csv(path, manifest_path=None):
    positions, ts = [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "i,t,x,y":
            raise ParseError(f"expected header 'i,t,x,y', got {header!r}",
                             line=1)
        for line_no, line in enumerate(fh, start=2):
            parts = line.strip().split(",")
            if len(parts) != 4:
                raise ParseError("expected 4 fields", line=line_no)
            try:
                ts.append(float(parts[1]))
                positions.append((float(parts[2]), float(parts[3])))
            except ValueError:
                raise ParseError("unreadable number", line=line_no) from None
    if not positions:
        raise ParseError("no data rows", line=2)

    manifest = load_json(manifest_path) if manifest_path else {}
    delta = manifest.get("delta")
    if delta is None:
        delta = ts[1] - ts[0] if len(ts) > 1 else 1.0
    provenance = manifest.get("provenance", "simulated")
    meta = {k: manifest[k] for k in ("domain", "drift", "normalization",
                                     "median_gap", "flagged_gaps", "source")
            if manifest.get(k) is not None}
    timestamps = np.asarray(ts) if provenance == "ingested" else None
    return Trajectory(positions, delta, seed=manifest.get("seed"),
                      provenance=provenance, timestamps=timestamps,
                      breaks=manifest.get("breaks", ()), meta=meta)


def write_density_grid_csv(grid, field, path, manifest=None,
                           manifest_path=None):
    """Rows "x,y,ghat" in row-major order (y outer, x inner)."""
    xs, ys = grid
    field = np.asarray(field)
    rows = ((fmt(x), fmt(y), fmt(field[j, i]))
            for j, y in enumerate(ys) for i, x in enumerate(xs))
    _write_rows(path, "x,y,ghat", rows)
    if manifest_path is not None:
        dump_json(manifest or {}, manifest_path)
    return path


def write_point_set_csv(points, path):
    points = np.asarray(points, dtype=float)
    rows = ((fmt(p[0]), fmt(p[1])) for p in points)
    _write_rows(path, "x,y", rows)
    return path


def read_point_set_csv(path):
    pts = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "x,y":
            raise ParseError(f"expected header 'x,y', got {header!r}", line=1)
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError("expected 2 fields", line=line_no)
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ParseError("unreadable number", line=line_no) from None
    return np.asarray(pts, dtype=float).reshape(-1, 2)


def write_drift_csv(field, path):
    """Rows "x,y,ux,uy,count,valid" (valid as 0/1; invalid vectors are nan)."""
    rows = ((fmt(n[0]), fmt(n[1]), fmt(v[0]), fmt(v[1]), str(int(c)),
             str(int(ok)))
            for n, v, c, ok in zip(field.nodes, field.vectors,
                                   field.counts, field.valid))
    _write_rows(path, "x,y,ux,uy,count,valid", rows)
    return path


def write_region_json(region, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(region.to_json() + "\n")
    return path


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
