"""Level-set estimators over a density estimate.

Three routes: grid contouring of the estimated density (plug-in),
the r-convex hull of the sample points whose estimated density clears
the level (no grid pass at all), and thresholds chosen to capture a
prescribed fraction of the sample (fixed content).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from skimage import measure

from .exceptions import EmptyLevelSample, EmptyLevelSet
from .regions import Region2D, r_convex_hull
from ._validation import (check_grid_axes, check_in_open_unit_interval,
                          check_nonnegative, check_positive)


@dataclass(frozen=True)
class LevelQuery:
    """What to extract: a level lam, or a content tau, never both."""
    lam: Optional[float] = None
    tau: Optional[float] = None
    r: Optional[float] = None
    grid: Optional[int] = None

    def __post_init__(self):
        if (self.lam is None) == (self.tau is None):
            raise ValueError("set exactly one of lam and tau")
        if self.lam is not None:
            check_nonnegative(self.lam, "lam")
        if self.tau is not None:
            check_in_open_unit_interval(self.tau, "tau")
        if self.r is not None:
            check_positive(self.r, "r")


def _resolve_grid(estimate, grid):
    """Accept (xs, ys) axes or an integer resolution over the sample box
    padded by one kernel reach."""
    if isinstance(grid, (int, np.integer)):
        if grid < 2:
            raise ValueError("grid resolution must be at least 2")
        pad = estimate.h * min(estimate.kernel.cutoff_radius, 3.0)
        lo = estimate.samples.min(axis=0) - pad
        hi = estimate.samples.max(axis=0) + pad
        return (np.linspace(lo[0], hi[0], int(grid)),
                np.linspace(lo[1], hi[1], int(grid)))
    return check_grid_axes(grid)


def _contour_region(field, xs, ys, lam, meta):
    """Marching-squares region of {field > lam} on the given axes.

    The field is padded with a ring strictly below lam so every contour
    closes; grid nodes equal to lam count as not exceeding.
    """
    if not np.any(field > lam):
        raise EmptyLevelSet(f"no grid node exceeds level {lam}")
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    low = min(float(field.min()), lam) - max(abs(lam), 1.0)
    padded = np.pad(field, 1, constant_values=low)
    loops = []
    for contour in measure.find_contours(padded, lam):
        # rows are (row, col) = (y, x) in padded index space
        gx = xs[0] + (contour[:, 1] - 1.0) * dx
        gy = ys[0] + (contour[:, 0] - 1.0) * dy
        loop = np.column_stack([gx, gy])
        if len(loop) >= 3 and np.allclose(loop[0], loop[-1]):
            loop = loop[:-1]
        if len(loop) >= 3:
            loops.append(loop)
    if not loops:
        raise EmptyLevelSet(f"no closed contour found at level {lam}")
    meta = dict(meta, construction="grid_contour", level=float(lam),
                pitch=[float(dx), float(dy)])
    return Region2D(loops, None, meta)


def plugin_level_set(estimate, lam, grid):
    """Region {ghat > lam} extracted by marching squares on a grid.

    grid is either a pair of axis vectors or an integer resolution.
    Every grid node whose value exceeds lam lies inside the returned
    region.  Raises EmptyLevelSet when no node clears the level.
    """
    lam = check_nonnegative(lam, "lam")
    xs, ys = _resolve_grid(estimate, grid)
    field = estimate.evaluate_on_grid((xs, ys))
    meta = {"h": estimate.h, "kernel": estimate.kernel.name, "n": estimate.n}
    return _contour_region(field, xs, ys, lam, meta)


def _values_at(estimate, sample):
    if sample is None or sample is estimate.samples:
        return estimate.evaluate_at_samples(), estimate.samples
    sample = np.asarray(sample, dtype=float)
    return estimate.evaluate_points(sample), sample


def rconvex_level_estimator(estimate, sample, lam, r):
    """r-convex hull of the sample points with estimated density above lam.

    Filters the sample by pointwise evaluation only; the full level set
    of ghat is never materialized on a grid.
    """
    lam = check_nonnegative(lam, "lam")
    r = check_positive(r, "r")
    vals, sample = _values_at(estimate, sample)
    keep = vals > lam
    if not keep.any():
        raise EmptyLevelSample(f"no sample point has density above {lam}")
    region = r_convex_hull(sample[keep], r)
    region.meta.update(level=float(lam), h=estimate.h,
                       kernel=estimate.kernel.name,
                       n_kept=int(keep.sum()), n=int(len(sample)))
    return region


def fixed_content_threshold(estimate, sample, tau):
    """Smallest sample value lam with #{ghat(X_i) > lam} <= (1-tau)*n.

    With sorted values v_(1) <= ... <= v_(n) this is the order statistic
    v_(k), k = ceil(tau*n): strictly more than (1-tau)*n values exceed
    any smaller candidate, and ties are resolved by the order statistic
    itself.
    """
    tau = check_in_open_unit_interval(tau, "tau")
    vals, sample = _values_at(estimate, sample)
    n = len(vals)
    if n < 2:
        raise ValueError("fixed_content_threshold needs a sample of size >= 2")
    k = int(np.ceil(tau * n))
    return float(np.sort(vals, kind="stable")[k - 1])


def level_set_with_content(estimate, sample, tau, grid):
    """Plug-in region at the fixed-content threshold for tau."""
    lam = fixed_content_threshold(estimate, sample, tau)
    region = plugin_level_set(estimate, lam, grid)
    region.meta.update(tau=float(tau), level=float(lam))
    return region
