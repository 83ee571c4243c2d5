"""Reflected Brownian motion with drift on compact planar domains:
simulation, stationary-density estimation, level sets, and drift
recovery, with a quadrature oracle for the gradient case."""

from .domains import (Disk, DifferenceDomain, Ellipse, IntersectionDomain,
                      difference, disk, domain_from_spec, ellipse,
                      intersection, symmetric_point)
from .dynamics import (DriftFunction, Trajectory, gaussian_step, linear_drift,
                       make_rng, simulate_rbmd, spawn_rngs, subsample,
                       zero_drift)
from .density import (DensityEstimate, default_bandwidth, evaluate_density,
                      evaluate_on_grid, gradient_density)
from .drift import (DriftField, default_local_radius, drift_field_on_grid,
                    field_grid, local_increment_drift, plugin_gradient_drift)
from .kernels import EpanechnikovKernel, GaussianKernel, Kernel, kernel_by_name
from .levelsets import (LevelQuery, fixed_content_threshold,
                        level_set_with_content, plugin_level_set,
                        rconvex_level_estimator)
from .oracle import (AnalyticDensity, discretize_level_set,
                     hausdorff_to_oracle_set, normalization_constant,
                     occupation_fraction, region_measure, sup_norm_error)
from .regions import (Region2D, discretize_region, hausdorff_distance,
                      parallel_set_area, r_convex_hull)
from .dynamics import drift_from_spec
from .tracking import TrackRecord, ingest_tracking_csv
from .config import RunConfig
from .pipeline import run_pipeline
from .estimators import (IncrementDriftField, PluginDriftField,
                         PluginLevelSet, RConvexLevelSet,
                         StationaryDensityKDE)
from . import exceptions, io, presets

__version__ = "0.1.0"

__all__ = [
    "Disk", "DifferenceDomain", "Ellipse", "IntersectionDomain",
    "difference", "disk", "domain_from_spec", "ellipse", "intersection",
    "symmetric_point",
    "DriftFunction", "Trajectory", "gaussian_step", "linear_drift",
    "make_rng", "simulate_rbmd", "spawn_rngs", "subsample", "zero_drift",
    "DensityEstimate", "default_bandwidth", "evaluate_density",
    "evaluate_on_grid", "gradient_density",
    "DriftField", "default_local_radius", "drift_field_on_grid",
    "field_grid", "local_increment_drift", "plugin_gradient_drift",
    "EpanechnikovKernel", "GaussianKernel", "Kernel", "kernel_by_name",
    "LevelQuery", "fixed_content_threshold", "level_set_with_content",
    "plugin_level_set", "rconvex_level_estimator",
    "AnalyticDensity", "discretize_level_set", "hausdorff_to_oracle_set",
    "normalization_constant", "occupation_fraction", "region_measure",
    "sup_norm_error",
    "Region2D", "discretize_region", "hausdorff_distance",
    "parallel_set_area", "r_convex_hull",
    "drift_from_spec", "TrackRecord", "ingest_tracking_csv",
    "RunConfig", "run_pipeline",
    "IncrementDriftField", "PluginDriftField", "PluginLevelSet",
    "RConvexLevelSet", "StationaryDensityKDE",
    "exceptions", "io", "presets",
    "__version__",
]
