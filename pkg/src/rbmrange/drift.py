"""Drift estimation from a trajectory or a density estimate.

Two estimators: the local-increment average (increments whose left
endpoint falls in a ball around the query point, divided by the time
step) and, for the gradient case, the plug-in rule half the gradient of
log ghat.  A gridded DriftField carries per-node counts and validity.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .density import default_bandwidth
from .exceptions import DensityBelowFloor, NoLocalSamples
from ._validation import check_count, check_point, check_positive


def default_local_radius(n, d=2):
    """Ball radius rule: three uniform-consistency bandwidths."""
    return 3.0 * default_bandwidth(n, d, "uniform_consistency")


DEFAULT_MIN_COUNT = 20


def local_increment_drift(trajectory, x, h_loc):
    """Average increment per unit time over the ball B(x, h_loc).

    Uses increments whose left endpoint lies in the closed ball; raises
    NoLocalSamples when none does.  Increments flagged invalid by the
    trajectory (ingestion gaps) are skipped.
    """
    x = check_point(x, "x")
    h_loc = check_positive(h_loc, "h_loc")
    if len(trajectory) < 2:
        raise ValueError("trajectory needs at least two positions")
    if trajectory.delta <= 0:
        raise ValueError("trajectory needs a positive time step")
    inc, valid = trajectory.increments()
    left = trajectory.positions[:-1]
    d = np.linalg.norm(left - x, axis=1)
    mask = (d <= h_loc) & valid
    n_x = int(np.count_nonzero(mask))
    if n_x == 0:
        raise NoLocalSamples(
            f"no trajectory point within {h_loc} of {tuple(x)}; enlarge "
            "h_loc or the trajectory")
    return inc[mask].sum(axis=0) / (trajectory.delta * n_x)


def plugin_gradient_drift(estimate, x, floor):
    """Gradient-case plug-in rule: half of grad log ghat at x.

    Raises DensityBelowFloor when ghat(x) < floor (guards the division).
    """
    x = check_point(x, "x")
    floor = check_positive(floor, "floor")
    g = estimate.evaluate(x)
    if g < floor:
        raise DensityBelowFloor(
            f"ghat({tuple(x)}) = {g:.3e} is below the floor {floor:.3e}")
    return 0.5 * estimate.gradient(x) / g


@dataclass
class DriftField:
    """Gridded drift estimate with per-node bookkeeping.

    vectors holds NaN rows at invalid nodes (a vector is absent there,
    never zero); counts is the number of local samples per node.
    """
    nodes: np.ndarray
    vectors: np.ndarray
    counts: np.ndarray
    valid: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.vectors = np.asarray(self.vectors, dtype=float)
        self.counts = np.asarray(self.counts, dtype=int)
        self.valid = np.asarray(self.valid, dtype=bool)

    def __len__(self):
        return len(self.nodes)

    def vector_at(self, i):
        """The node's vector, or None when the node is invalid."""
        if not self.valid[i]:
            return None
        return self.vectors[i]

    @property
    def valid_fraction(self):
        return float(self.valid.mean()) if len(self.valid) else 0.0


def _grid_nodes(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 2 and grid.shape[1] == 2:
        return grid
    raise ValueError("grid must be an (m, 2) array of node coordinates")


def drift_field_on_grid(trajectory, grid, h_loc=None, min_count=DEFAULT_MIN_COUNT,
                        method="increment", estimate=None, floor=None):
    """Drift estimates on grid nodes, invalid where data is too thin.

    method 'increment' averages local increments (needs the trajectory);
    method 'plugin' applies the gradient rule to a density estimate.
    Counts always report the number of trajectory left-endpoints within
    h_loc of each node.  A node is invalid when its count falls below
    min_count (increment) or its density falls below floor (plugin).
    """
    nodes = _grid_nodes(grid)
    min_count = check_count(min_count, "min_count", minimum=1)
    if h_loc is None:
        h_loc = default_local_radius(max(len(trajectory) - 1, 2))
    h_loc = check_positive(h_loc, "h_loc")

    inc, inc_valid = trajectory.increments()
    left = trajectory.positions[:-1]
    tree = cKDTree(left)
    neighborhoods = tree.query_ball_point(nodes, r=h_loc)

    m = len(nodes)
    vectors = np.full((m, 2), np.nan)
    counts = np.zeros(m, dtype=int)
    valid = np.zeros(m, dtype=bool)

    if method == "increment":
        for i, idx in enumerate(neighborhoods):
            idx = [j for j in idx if inc_valid[j]]
            counts[i] = len(idx)
            if counts[i] >= min_count:
                vectors[i] = inc[idx].sum(axis=0) / (trajectory.delta * counts[i])
                valid[i] = True
        meta = {"method": "increment", "h_loc": float(h_loc),
                "min_count": int(min_count), "delta": trajectory.delta}
    elif method == "plugin":
        if estimate is None:
            raise ValueError("plugin method needs a density estimate")
        counts[:] = [sum(1 for j in idx if inc_valid[j])
                     for idx in neighborhoods]
        g = estimate.evaluate_points(nodes)
        if floor is None:
            floor = 1e-3 * float(g.max()) if g.max() > 0 else 1e-300
        ok = g >= floor
        if ok.any():
            grad = estimate.gradient_points(nodes[ok])
            vectors[ok] = 0.5 * grad / g[ok, None]
            valid[ok] = True
        meta = {"method": "plugin", "h": estimate.h, "floor": float(floor),
                "h_loc": float(h_loc), "kernel": estimate.kernel.name}
    else:
        raise ValueError("method must be 'increment' or 'plugin'")

    return DriftField(nodes, vectors, counts, valid, meta)


def field_grid(domain, resolution):
    """Node lattice over a domain's bounding box, keeping interior nodes."""
    resolution = check_count(resolution, "resolution", minimum=2)
    (x0, y0), (x1, y1) = domain.bbox
    xs = np.linspace(x0, x1, resolution + 2)[1:-1]
    ys = np.linspace(y0, y1, resolution + 2)[1:-1]
    XX, YY = np.meshgrid(xs, ys)
    nodes = np.column_stack([XX.ravel(), YY.ravel()])
    return nodes[domain.contains_points(nodes)]
