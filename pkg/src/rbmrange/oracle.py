"""Ground-truth oracles for the gradient case.

When the drift is half the gradient of a potential, the stationary
density is known in closed form up to a constant: g = exp(-f)/c on the
domain, zero outside.  This module computes c and region probabilities
by midpoint quadrature with domain masking (boundary cells weighted by
subsampled membership), guarded by a Richardson doubling check, and
provides the comparison metrics the acceptance suite uses.
"""

import numpy as np

from .exceptions import EmptySet, NoInteriorNodes, QuadratureNotConverged
from ._validation import check_count, check_grid_axes, check_nonnegative, \
    check_positive
from .regions import Region2D, hausdorff_distance

_SUB = 4  # straddle cells get SUB x SUB membership subsampling


def _cell_grid(domain, resolution):
    (x0, y0), (x1, y1) = domain.bbox
    hx = (x1 - x0) / resolution
    hy = (y1 - y0) / resolution
    cx = x0 + (np.arange(resolution) + 0.5) * hx
    cy = y0 + (np.arange(resolution) + 0.5) * hy
    XX, YY = np.meshgrid(cx, cy)
    centers = np.column_stack([XX.ravel(), YY.ravel()])
    return centers, hx, hy


def _subpoints(centers, hx, hy):
    off = (np.arange(_SUB) + 0.5) / _SUB - 0.5
    ox, oy = np.meshgrid(off * hx, off * hy)
    offsets = np.column_stack([ox.ravel(), oy.ravel()])
    return (centers[:, None, :] + offsets[None, :, :]).reshape(-1, 2)


def _domain_weights(domain, centers, hx, hy):
    """Per-cell membership weight: 1 inside, 0 outside, subsampled fraction
    on cells the boundary may cross."""
    sd = domain.signed_values(centers)
    diag = np.hypot(hx, hy)
    w = (sd < 0).astype(float)
    straddle = np.abs(sd) <= diag
    if straddle.any():
        sub = _subpoints(centers[straddle], hx, hy)
        frac = domain.contains_points(sub).reshape(-1, _SUB * _SUB).mean(axis=1)
        w[straddle] = frac
    return w


def _region_weights(indicator, centers, hx, hy, near_mask):
    """Like _domain_weights but for an arbitrary indicator; cells flagged in
    near_mask (boundary suspects) are subsampled."""
    w = indicator(centers).astype(float)
    if near_mask is not None and near_mask.any():
        sub = _subpoints(centers[near_mask], hx, hy)
        frac = indicator(sub).reshape(-1, _SUB * _SUB).mean(axis=1)
        w[near_mask] = frac
    return w


def _rasterize_loops(region, centers, hx, hy, resolution, bbox):
    """Cells within one cell of any region boundary polyline."""
    (x0, y0), _ = bbox
    mask = np.zeros(resolution * resolution, dtype=bool)
    for lp in region.loops:
        ring = np.vstack([lp, lp[:1]]) if len(lp) >= 3 else lp
        for k in range(len(ring) - (1 if len(ring) > 1 else 0)):
            a = ring[k]
            b = ring[(k + 1) % len(ring)] if len(ring) > 1 else ring[k]
            L = np.hypot(*(b - a))
            m = max(1, int(np.ceil(L / (0.5 * min(hx, hy)))))
            t = np.linspace(0.0, 1.0, m + 1)
            pts = a + t[:, None] * (b - a)
            ix = np.floor((pts[:, 0] - x0) / hx).astype(int)
            iy = np.floor((pts[:, 1] - y0) / hy).astype(int)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    jx = np.clip(ix + dx, 0, resolution - 1)
                    jy = np.clip(iy + dy, 0, resolution - 1)
                    mask[jy * resolution + jx] = True
    return mask


def _masked_integral(domain, integrand, resolution, indicator=None,
                     near_mask_fn=None):
    centers, hx, hy = _cell_grid(domain, resolution)
    w = _domain_weights(domain, centers, hx, hy)
    if indicator is not None:
        near = near_mask_fn(centers, hx, hy, resolution) if near_mask_fn else None
        w = w * _region_weights(indicator, centers, hx, hy, near)
    vals = integrand(centers)
    return float(np.sum(w * vals) * hx * hy)


def _with_richardson(compute, resolution, rel_tol=1e-3):
    v1 = compute(resolution)
    v2 = compute(2 * resolution)
    denom = max(abs(v2), 1e-300)
    if abs(v2 - v1) / denom >= rel_tol:
        raise QuadratureNotConverged(
            f"value moved {abs(v2 - v1) / denom:.2e} (rel) when doubling "
            f"resolution {resolution}; refine the grid")
    return v1


def normalization_constant(domain, f, resolution=2000):
    """Integral of exp(-f) over the domain, Richardson-verified.

    The returned value is the midpoint quadrature at the stated
    resolution; doubling it must move the value by less than 1e-3
    relative or QuadratureNotConverged is raised.
    """
    resolution = check_count(resolution, "resolution", minimum=2)

    def compute(res):
        return _masked_integral(domain, lambda P: np.exp(-f(P)), res)

    return _with_richardson(compute, resolution)


class AnalyticDensity:
    """Closed-form stationary density g = exp(-f)/c on a domain.

    Parameters
    ----------
    domain : Domain
    f : callable
        Potential, vectorized over (n, 2) arrays of points.
    grad_f : callable
        Gradient of f, (n, 2) -> (n, 2).
    c : float
        Normalization constant (integral of exp(-f) over the domain).
    """

    def __init__(self, domain, f, grad_f, c):
        self.domain = domain
        self.f = f
        self.grad_f = grad_f
        self.c = float(c)
        if self.c <= 0:
            raise ValueError("c must be positive")

    def evaluate(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        inside = self.domain.contains_points(P)
        out = np.zeros(len(P))
        if inside.any():
            out[inside] = np.exp(-self.f(P[inside])) / self.c
        return out

    def evaluate_one(self, p):
        return float(self.evaluate(np.asarray(p, dtype=float)[None, :])[0])

    def gradient(self, P):
        """Analytic gradient, grad g = -grad f * g (zero outside)."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        g = self.evaluate(P)
        return -self.grad_f(P) * g[:, None]

    @property
    def max_value(self):
        """Supremum of g, from exp(-f) at the domain's argmin of f found
        on a coarse grid (exact for the reference quadratic case)."""
        centers, _, _ = _cell_grid(self.domain, 400)
        vals = self.evaluate(centers)
        return float(vals.max())


def region_measure(density, region, resolution=1000):
    """Probability mass of a region under an analytic density.

    region may be a Region2D or a level value lam (measuring the
    super-level set {g > lam}).  Richardson-checked like the constant.
    """
    resolution = check_count(resolution, "resolution", minimum=2)
    domain = density.domain

    if isinstance(region, Region2D):
        indicator = region.contains_points

        def near_mask_fn(centers, hx, hy, res):
            return _rasterize_loops(region, centers, hx, hy, res, domain.bbox)
    else:
        lam = check_nonnegative(float(region), "lambda")
        if lam == 0.0:
            # {g > 0} is the whole domain support
            indicator = lambda P: density.evaluate(P) > 0.0
            near_mask_fn = None
        else:
            indicator = lambda P: density.evaluate(P) > lam

            def near_mask_fn(centers, hx, hy, res):
                gn = np.linalg.norm(density.gradient(centers), axis=1)
                g = density.evaluate(centers)
                M = gn.max()
                return np.abs(g - lam) <= M * np.hypot(hx, hy)

    def compute(res):
        return _masked_integral(domain, density.evaluate, res,
                                indicator, near_mask_fn)

    return _with_richardson(compute, resolution)


def sup_norm_error(estimate, density, grid, interior_margin=0.0):
    """Max |ghat - g| over grid nodes at least interior_margin inside.

    Node depth is measured by exact distance to the domain boundary.
    Raises NoInteriorNodes when the margin excludes every node.
    """
    interior_margin = check_nonnegative(interior_margin, "interior_margin")
    xs, ys = check_grid_axes(grid)
    XX, YY = np.meshgrid(xs, ys)
    nodes = np.column_stack([XX.ravel(), YY.ravel()])
    domain = density.domain
    inside = domain.contains_points(nodes)
    if interior_margin > 0:
        depth = np.full(len(nodes), -1.0)
        idx = np.nonzero(inside)[0]
        depth[idx] = [domain.boundary_distance(p) for p in nodes[idx]]
        qualify = depth > interior_margin
    else:
        qualify = inside
    if not qualify.any():
        raise NoInteriorNodes(
            f"no grid node lies deeper than {interior_margin}")
    P = nodes[qualify]
    ghat = estimate.evaluate_points(P)
    g = density.evaluate(P)
    return float(np.abs(ghat - g).max())


def discretize_level_set(density, lam, pitch):
    """Grid nodes (spacing = pitch, over the domain bbox) where g > lam."""
    pitch = check_positive(pitch, "pitch")
    (x0, y0), (x1, y1) = density.domain.bbox
    xs = np.arange(x0, x1 + pitch / 2, pitch)
    ys = np.arange(y0, y1 + pitch / 2, pitch)
    XX, YY = np.meshgrid(xs, ys)
    nodes = np.column_stack([XX.ravel(), YY.ravel()])
    vals = density.evaluate(nodes)
    pts = nodes[vals > lam]
    if len(pts) == 0:
        raise EmptySet(f"no grid node has density above {lam}")
    return pts


def hausdorff_to_oracle_set(points, density, lam, pitch):
    """Hausdorff distance from a point set to the discretized true
    super-level set {g > lam} (both at the same pitch)."""
    return hausdorff_distance(points, discretize_level_set(density, lam,
                                                           pitch))


def occupation_fraction(trajectory, region):
    """Fraction of trajectory positions falling in a region.

    region may be a Region2D, a Domain, or a boolean indicator over
    (n, 2) arrays.
    """
    P = trajectory.positions
    if isinstance(region, Region2D):
        mask = region.contains_points(P)
    elif hasattr(region, "contains_points"):
        mask = region.contains_points(P)
    elif callable(region):
        mask = np.asarray(region(P), dtype=bool)
    else:
        raise TypeError("region must be Region2D, Domain, or an indicator")
    return float(np.count_nonzero(mask) / len(P))
