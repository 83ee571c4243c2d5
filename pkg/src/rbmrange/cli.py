"""Command-line entry point.

Every subcommand is a thin wrapper over a library operation; parameters
come from a JSON config (--config), with --seed and --out overriding the
config's seed and output directory.  Exit codes: 0 success, 2 config
error, 3 data error, 4 numerical-guard error.
"""

import argparse
import os
import sys

import numpy as np

from . import exceptions as exc
from .config import RunConfig
from .density import DensityEstimate, default_bandwidth
from .domains import domain_from_spec
from .drift import drift_field_on_grid
from .dynamics import drift_from_spec, simulate_rbmd
from .io import (dump_json, ensure_dir, read_point_set_csv,
                 read_trajectory_csv, write_density_grid_csv,
                 write_drift_csv, write_region_json, write_trajectory_csv)
from .levelsets import fixed_content_threshold, plugin_level_set, \
    rconvex_level_estimator
from .pipeline import _grid_axes, default_start, run_pipeline
from .presets import REFERENCE_LEVELS, generate_oracle_fixture
from .regions import hausdorff_distance
from .tracking import ingest_tracking_csv

DATA_ERRORS = (exc.ParseError, exc.NonMonotoneTimestamps, exc.EmptySet,
               exc.EmptyLevelSample, exc.StartOutsideDomain,
               exc.DegenerateInput)
GUARD_ERRORS = (exc.QuadratureNotConverged, exc.DensityBelowFloor,
                exc.NoLocalSamples, exc.NoInteriorNodes, exc.EmptyLevelSet,
                exc.NonDifferentiablePoint, exc.AmbiguousProjection,
                exc.NonFiniteDrift)


def _load_config(args):
    if args.config is None:
        raise exc.ConfigError("this subcommand needs --config")
    cfg = RunConfig.from_file(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.out is not None:
        cfg = cfg.replace(out_dir=args.out)
    return cfg


def _acquire(cfg):
    """The config's data source: a fresh simulation or an ingested track."""
    if cfg.track is not None:
        traj = ingest_tracking_csv(cfg.track["path"],
                                   cfg.track.get("columns"),
                                   cfg.track.get("normalization", "fit"))
        return traj, None
    domain = domain_from_spec(cfg.domain)
    drift = drift_from_spec(cfg.drift)
    x0 = cfg.x0 if cfg.x0 is not None else default_start(domain)
    traj = simulate_rbmd(domain, drift, x0, cfg.delta, cfg.n_steps, cfg.seed)
    return traj, domain


def _trajectory(cfg, args):
    if getattr(args, "traj", None):
        traj = read_trajectory_csv(args.traj, args.traj_manifest)
        domain = domain_from_spec(cfg.domain) if cfg.domain else None
        return traj, domain
    return _acquire(cfg)


def _estimate(cfg, traj, domain):
    h = cfg.bandwidth if cfg.bandwidth is not None else \
        default_bandwidth(len(traj.positions), traj.dim,
                          cfg.bandwidth_mode or "rate_optimal")
    return DensityEstimate(traj.positions, h, cfg.kernel, mask=domain), h


def _axes(cfg, traj, domain, estimate):
    if domain is not None:
        return _grid_axes(domain.bbox, cfg.grid_resolution)
    pos = traj.positions
    bounds = (tuple(pos.min(axis=0)), tuple(pos.max(axis=0)))
    return _grid_axes(bounds, cfg.grid_resolution, pad=estimate.cutoff)


def cmd_simulate(args):
    cfg = _load_config(args)
    traj, _ = _acquire(cfg)
    out = ensure_dir(cfg.out_dir)
    write_trajectory_csv(traj, os.path.join(out, "trajectory.csv"),
                         os.path.join(out, "trajectory.json"))
    print(f"trajectory: {traj.n_steps} steps -> {out}/trajectory.csv")
    return 0


def cmd_density(args):
    cfg = _load_config(args)
    traj, domain = _trajectory(cfg, args)
    estimate, h = _estimate(cfg, traj, domain)
    axes = _axes(cfg, traj, domain, estimate)
    field = estimate.evaluate_on_grid(axes)
    out = ensure_dir(cfg.out_dir)
    write_density_grid_csv(
        axes, field, os.path.join(out, "density.csv"),
        manifest={"kernel": cfg.kernel, "h": h, "n": len(traj.positions),
                  "mask": cfg.domain},
        manifest_path=os.path.join(out, "density.json"))
    print(f"density grid {len(axes[0])}x{len(axes[1])} (h={h:g}) "
          f"-> {out}/density.csv")
    return 0


def cmd_levelset(args):
    cfg = _load_config(args)
    if cfg.levels is None:
        raise exc.ConfigError("levelset needs config.levels")
    traj, domain = _trajectory(cfg, args)
    estimate, h = _estimate(cfg, traj, domain)
    axes = _axes(cfg, traj, domain, estimate)
    out = ensure_dir(cfg.out_dir)
    for idx, lam in enumerate(cfg.levels):
        if cfg.r is not None:
            region = rconvex_level_estimator(estimate, None, lam, cfg.r)
        else:
            region = plugin_level_set(estimate, lam, axes)
        path = os.path.join(out, f"region_{idx:02d}.json")
        write_region_json(region, path)
        print(f"lambda={lam:g}: area={region.area:.6g} -> {path}")
    return 0


def cmd_fixed_content(args):
    cfg = _load_config(args)
    if cfg.tau is None:
        raise exc.ConfigError("fixed-content needs config.tau")
    traj, domain = _trajectory(cfg, args)
    estimate, h = _estimate(cfg, traj, domain)
    lam = fixed_content_threshold(estimate, None, cfg.tau)
    print(f"tau={cfg.tau:g}: threshold={lam!r}")
    if args.region:
        axes = _axes(cfg, traj, domain, estimate)
        region = plugin_level_set(estimate, lam, axes)
        out = ensure_dir(cfg.out_dir)
        path = os.path.join(out, "region_tau.json")
        write_region_json(region, path)
        print(f"region -> {path}")
    return 0


def cmd_drift(args):
    cfg = _load_config(args)
    traj, domain = _trajectory(cfg, args)
    estimate, h = _estimate(cfg, traj, domain)
    axes = _axes(cfg, traj, domain, estimate)
    stride = max(1, cfg.grid_resolution // 16)
    gx, gy = axes[0][::stride], axes[1][::stride]
    nodes = np.column_stack([a.ravel()
                             for a in np.meshgrid(gx, gy, indexing="xy")])
    if domain is not None:
        nodes = nodes[domain.contains_points(nodes)]
    field = drift_field_on_grid(traj, nodes, h_loc=cfg.drift_h_loc)
    out = ensure_dir(cfg.out_dir)
    path = os.path.join(out, "drift.csv")
    write_drift_csv(field, path)
    print(f"drift field: {int(field.valid.sum())}/{len(nodes)} valid nodes "
          f"-> {path}")
    return 0


def cmd_hausdorff(args):
    a = read_point_set_csv(args.a)
    b = read_point_set_csv(args.b)
    print(repr(hausdorff_distance(a, b)))
    return 0


def cmd_oracle(args):
    resolution = args.resolution
    levels = REFERENCE_LEVELS
    if args.config is not None:
        cfg = RunConfig.from_file(args.config)
        if cfg.levels is not None:
            levels = cfg.levels
        if cfg.oracle is not None and "resolution" in cfg.oracle:
            resolution = cfg.oracle["resolution"]
    fixture = generate_oracle_fixture(resolution=resolution, levels=levels)
    out = args.out or "."
    ensure_dir(out)
    path = os.path.join(out, "reference_oracle.json")
    dump_json(fixture, path)
    print(f"c={fixture['c']!r} -> {path}")
    return 0


def cmd_pipeline(args):
    cfg = _load_config(args)
    bundle = run_pipeline(cfg)
    print(f"bundle: {len(bundle['artifacts'])} artifacts "
          f"-> {bundle['out_dir']}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rbmrange",
        description="Reflected-diffusion home ranges: simulation, density, "
                    "level sets, and drift estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="override the output directory")
        p.set_defaults(func=func)
        return p

    add("simulate", cmd_simulate, help="simulate a reflected diffusion")
    for name, func in (("density", cmd_density),
                       ("levelset", cmd_levelset),
                       ("drift", cmd_drift)):
        p = add(name, func, help=f"estimate and export the {name} artifact")
        p.add_argument("--traj", help="reuse a trajectory CSV instead of "
                                      "simulating")
        p.add_argument("--traj-manifest", help="its sidecar manifest JSON")
    p = add("fixed-content", cmd_fixed_content,
            help="fixed-content threshold (and optional region)")
    p.add_argument("--traj", help="reuse a trajectory CSV")
    p.add_argument("--traj-manifest", help="its sidecar manifest JSON")
    p.add_argument("--region", action="store_true",
                   help="also export the plug-in region at the threshold")
    p = add("hausdorff", cmd_hausdorff,
            help="Hausdorff distance between two point-set CSVs")
    p.add_argument("a", help="first point-set CSV")
    p.add_argument("b", help="second point-set CSV")
    p = add("oracle", cmd_oracle, help="regenerate the quadrature oracle "
                                       "fixture")
    p.add_argument("--resolution", type=int, default=2000)
    add("pipeline", cmd_pipeline, help="run every configured stage")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except exc.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DATA_ERRORS as e:
        stage = getattr(e, "stage", None)
        tag = f" [stage: {stage}]" if stage else ""
        print(f"data error{tag}: {e}", file=sys.stderr)
        return 3
    except GUARD_ERRORS as e:
        stage = getattr(e, "stage", None)
        tag = f" [stage: {stage}]" if stage else ""
        print(f"numerical guard{tag}: {e}", file=sys.stderr)
        return 4
    except OSError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
