"""Polygonal regions, r-convex hulls, and set metrics.

Region2D is the common currency for estimated sets: one or more closed
boundary loops with outer/hole flags, backed internally by shapely
geometry for membership, area, and distance queries.  Loops with fewer
than three vertices are degenerate features (isolated points, segments)
and are kept so that hulls always contain their generators.
"""

import json

import numpy as np
import shapely
from scipy.spatial import Delaunay, QhullError, cKDTree
from shapely.geometry import LineString, Point, Polygon
from shapely.geometry.polygon import orient
from shapely.ops import polygonize, unary_union

from .exceptions import EmptySet
from ._validation import check_points, check_positive


class Region2D:
    """A planar region given by closed boundary loops with hole flags.

    Parameters
    ----------
    loops : sequence of (k, 2) arrays
        Boundary vertex loops (closing edge implied).  Loops with one or
        two vertices are degenerate point/segment features.
    holes : sequence of bool, optional
        Per-loop hole flag.  When omitted, flags are inferred from loop
        nesting (odd depth means hole).
    meta : dict, optional
        Construction metadata carried along with the region.
    """

    def __init__(self, loops, holes=None, meta=None):
        self.loops = [check_points(lp, "loop") for lp in loops]
        self.meta = dict(meta or {})
        poly_loops = [lp for lp in self.loops if len(lp) >= 3]
        if holes is None:
            holes = _infer_holes(self.loops, poly_loops)
        holes = [bool(h) for h in holes]
        if len(holes) != len(self.loops):
            raise ValueError("holes must have one flag per loop")
        self.holes = holes
        self._geom = _build_geometry(self.loops, self.holes)
        shapely.prepare(self._geom)

    @classmethod
    def from_shapely(cls, geom, meta=None, extra_features=()):
        loops, holes = [], []
        polys = _polygons_of(geom)
        for poly in polys:
            poly = orient(poly)
            loops.append(np.asarray(poly.exterior.coords)[:-1])
            holes.append(False)
            for ring in poly.interiors:
                loops.append(np.asarray(ring.coords)[:-1])
                holes.append(True)
        for feat in extra_features:
            feat = np.atleast_2d(np.asarray(feat, dtype=float))
            loops.append(feat)
            holes.append(False)
        return cls(loops, holes, meta)

    @property
    def geometry(self):
        """The backing shapely geometry (polygons plus degenerate parts)."""
        return self._geom

    @property
    def area(self):
        return float(self._geom.area)

    @property
    def is_degenerate(self):
        return bool(self.meta.get("degenerate", False)) or self.area == 0.0

    def contains(self, p):
        """Closed-region membership (boundary points count as inside)."""
        return bool(shapely.covers(self._geom, Point(p)))

    def contains_points(self, P):
        P = np.asarray(P, dtype=float)
        if P.size == 0:
            return np.zeros(0, dtype=bool)
        return shapely.covers(self._geom, shapely.points(P))

    def distance(self, p):
        return float(self._geom.distance(Point(p)))

    def distances(self, P):
        P = np.asarray(P, dtype=float)
        return shapely.distance(self._geom, shapely.points(P))

    def to_json(self):
        doc = {
            "loops": [[[float(x), float(y)] for x, y in lp] for lp in self.loops],
            "holes": list(self.holes),
            "meta": self.meta,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        loops = [np.asarray(lp, dtype=float) for lp in doc["loops"]]
        return cls(loops, doc.get("holes"), doc.get("meta"))

    def __repr__(self):
        return (f"Region2D({len(self.loops)} loops, area={self.area:.6g}, "
                f"meta={self.meta})")


def _polygons_of(geom):
    if geom.is_empty:
        return []
    if geom.geom_type == "Polygon":
        return [geom]
    if geom.geom_type in ("MultiPolygon", "GeometryCollection"):
        out = []
        for part in geom.geoms:
            out.extend(_polygons_of(part))
        return out
    return []


def _build_geometry(loops, holes):
    shells, voids, extras = [], [], []
    for lp, hole in zip(loops, holes):
        if len(lp) >= 3:
            poly = Polygon(lp)
            if not poly.is_valid:
                poly = poly.buffer(0)
            (voids if hole else shells).append(poly)
        elif len(lp) == 2:
            extras.append(LineString(lp))
        else:
            extras.append(Point(lp[0]))
    geom = unary_union(shells) if shells else Polygon()
    if voids:
        geom = geom.difference(unary_union(voids))
    if extras:
        geom = unary_union([geom] + extras)
    return geom


def _infer_holes(loops, poly_loops):
    """Hole iff the loop is nested at odd depth among polygonal loops."""
    polys = [Polygon(lp) if len(lp) >= 3 else None for lp in loops]
    flags = []
    for i, lp in enumerate(loops):
        if polys[i] is None:
            flags.append(False)
            continue
        probe = Point(lp[0])
        depth = 0
        for j, other in enumerate(polys):
            if j == i or other is None:
                continue
            if other.contains(probe) or (
                    other.touches(probe) and other.covers(Point(np.mean(lp, axis=0)))):
                depth += 1
        flags.append(depth % 2 == 1)
    return flags


def _circumradii(points, simplices):
    """Circumradius of each triangle, vectorized (R = abc / 4K)."""
    p = points[simplices]
    a = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
    b = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
    c = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    cross = np.abs(
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    area2 = cross  # twice the triangle area
    with np.errstate(divide="ignore", invalid="ignore"):
        R = np.where(area2 > 0, a * b * c / (2.0 * area2), np.inf)
    return R


def _degenerate_hull(points, r, reason):
    """All-collinear (or single-point) fallback: the covering segment."""
    if len(points) == 1:
        loops = [points[:1]]
    else:
        # order along the dominant direction and keep the extreme pair
        d = points - points.mean(axis=0)
        _, _, vt = np.linalg.svd(d, full_matrices=False)
        t = d @ vt[0]
        lo, hi = points[int(np.argmin(t))], points[int(np.argmax(t))]
        if np.allclose(lo, hi):
            loops = [lo[None, :]]
        else:
            loops = [np.vstack([lo, hi])]
    meta = {"construction": "alpha_hull", "r": float(r),
            "degenerate": True, "reason": reason}
    return Region2D(loops, [False] * len(loops), meta)


def r_convex_hull(points, r):
    """r-convex hull of a point set, realized as a 2D alpha complex.

    Delaunay triangles with circumradius at most r form the region body;
    Delaunay edges no longer than 2r that are not covered by a kept
    triangle survive as segment features, and fully isolated input points
    as point features, so the hull always contains every generator.
    """
    P = check_points(points, "points")
    r = check_positive(r, "r")
    P = np.unique(P, axis=0)
    if len(P) < 3:
        if len(P) == 2 and np.linalg.norm(P[1] - P[0]) > 2 * r:
            meta = {"construction": "alpha_hull", "r": float(r),
                    "degenerate": True, "reason": "two distant points"}
            return Region2D([P[:1], P[1:2]], [False, False], meta)
        return _degenerate_hull(P, r, "fewer than three distinct points")
    try:
        tri = Delaunay(P)
    except QhullError:
        # qhull refuses flat input; all points lie on one line
        return _degenerate_hull(P, r, "collinear input")

    radii = _circumradii(P, tri.simplices)
    keep = radii <= r
    kept = tri.simplices[keep]

    covered = np.zeros(len(P), dtype=bool)
    covered[kept.ravel()] = True

    extra = _leftover_features(P, tri, keep, covered, r)

    meta = {"construction": "alpha_hull", "r": float(r),
            "n_points": int(len(P)), "n_triangles": int(keep.sum())}
    if kept.size:
        body = _triangle_union(P, tri, keep)
    else:
        body = Polygon()
        meta["degenerate"] = True
    return Region2D.from_shapely(body, meta, extra_features=extra)


def _triangle_union(P, tri, keep):
    """Union of the kept triangles via their once-seen boundary edges.

    Boundary edges (adjacent to exactly one kept triangle) are polygonized
    into faces, and each face is classified by locating a representative
    point in the triangulation.  Equivalent to unioning every kept
    triangle, but linear in the boundary size.
    """
    counts = {}
    for simplex in tri.simplices[keep]:
        for i in range(3):
            u, v = simplex[i], simplex[(i + 1) % 3]
            e = (u, v) if u < v else (v, u)
            counts[e] = counts.get(e, 0) + 1
    lines = [LineString(P[[u, v]]) for (u, v), c in counts.items() if c == 1]
    keep_mask = np.zeros(len(tri.simplices), dtype=bool)
    keep_mask[np.nonzero(keep)[0]] = True
    faces = []
    for face in polygonize(lines):
        rep = face.representative_point()
        s = int(tri.find_simplex(np.array([[rep.x, rep.y]]))[0])
        if s < 0:
            s = int(tri.find_simplex(np.array([[rep.x, rep.y]]),
                                     bruteforce=True)[0])
        if s >= 0 and keep_mask[s]:
            faces.append(face)
    return unary_union(faces)


def _leftover_features(P, tri, keep, covered, r):
    """Short Delaunay edges and points missed by every kept triangle."""
    edges = set()
    for simplex in tri.simplices[~keep]:
        for i in range(3):
            u, v = simplex[i], simplex[(i + 1) % 3]
            if covered[u] and covered[v]:
                continue
            edges.add((min(u, v), max(u, v)))
    extra = []
    edge_covered = np.zeros(len(P), dtype=bool)
    for i, j in sorted(edges):
        if np.linalg.norm(P[j] - P[i]) <= 2 * r:
            extra.append(P[[i, j]])
            edge_covered[i] = edge_covered[j] = True
    for k in np.nonzero(~covered & ~edge_covered)[0]:
        extra.append(P[k:k + 1])
    return extra


def hausdorff_distance(A, B):
    """Hausdorff distance between two finite point sets."""
    A = check_points(A, "A", allow_empty=True)
    B = check_points(B, "B", allow_empty=True)
    if len(A) == 0 or len(B) == 0:
        raise EmptySet("hausdorff_distance requires non-empty point sets")
    d_ab = cKDTree(B).query(A)[0].max()
    d_ba = cKDTree(A).query(B)[0].max()
    return float(max(d_ab, d_ba))


def discretize_region(region, pitch):
    """Sample a region's boundary and interior at spacing <= pitch.

    Returns points whose Hausdorff distance to the region is at most the
    pitch by construction, enabling set-to-set comparisons.
    """
    pitch = check_positive(pitch, "pitch")
    pts = []
    for lp in region.loops:
        if len(lp) == 1:
            pts.append(lp)
            continue
        closed = len(lp) >= 3
        ring = np.vstack([lp, lp[:1]]) if closed else lp
        for k in range(len(ring) - 1):
            seg = ring[k + 1] - ring[k]
            L = float(np.hypot(*seg))
            m = max(1, int(np.ceil(L / pitch)))
            t = np.arange(m) / m
            pts.append(ring[k] + t[:, None] * seg)
        if not closed:
            # open segment features never wrap, so emit the far endpoint
            pts.append(ring[-1:])
    if region.area > 0:
        (x0, y0, x1, y1) = region.geometry.bounds
        xs = np.arange(x0, x1 + pitch, pitch)
        ys = np.arange(y0, y1 + pitch, pitch)
        XX, YY = np.meshgrid(xs, ys)
        nodes = np.column_stack([XX.ravel(), YY.ravel()])
        inside = region.contains_points(nodes)
        if inside.any():
            pts.append(nodes[inside])
    return np.vstack(pts)


def parallel_set_area(region, eps, grid=800):
    """Area of the eps-collar around a region, by grid counting.

    Counts cells whose center lies within eps of the region but outside
    it, over the bounding box inflated by eps.  Error scales with the
    pitch times the boundary length.
    """
    eps = check_positive(eps, "eps")
    grid = int(grid)
    if grid < 2:
        raise ValueError("grid resolution must be at least 2")
    x0, y0, x1, y1 = region.geometry.bounds
    x0, y0, x1, y1 = x0 - eps, y0 - eps, x1 + eps, y1 + eps
    hx = (x1 - x0) / grid
    hy = (y1 - y0) / grid
    cx = x0 + (np.arange(grid) + 0.5) * hx
    cy = y0 + (np.arange(grid) + 0.5) * hy
    XX, YY = np.meshgrid(cx, cy)
    centers = shapely.points(np.column_stack([XX.ravel(), YY.ravel()]))
    near = shapely.dwithin(region.geometry, centers, eps)
    inside = shapely.covers(region.geometry, centers)
    return float(np.count_nonzero(near & ~inside) * hx * hy)
