"""Implicit compact planar domains with boundary projection and normals.

A domain is described by a signed scalar field: negative inside, positive
outside, approximately the Euclidean distance near the boundary.  That is
all the reflection scheme needs: membership classification, the nearest
boundary point xi(z), and the inner normal.

Constructors cover the shapes used throughout: disks, axis-aligned
ellipses, and set difference / intersection of two domains.
"""

import math

import numpy as np

from .exceptions import AmbiguousProjection
from ._validation import check_point, check_positive

TOL_PROJ = 1e-6   # candidates farther apart than this are distinct points
TOL_D = 1e-8      # candidate distances closer than this are indistinguishable

_NEWTON_MAX_ITER = 200
_FALLBACK_PITCH = 1e-4


class Domain:
    """Base class.  Subclasses provide _signed/_signed_many and projection."""

    @property
    def bbox(self):
        """((xmin, ymin), (xmax, ymax)) axis-aligned bounding box."""
        raise NotImplementedError

    @property
    def tol_b(self):
        """Boundary membership fuzz: 1e-9 times the bounding-box diameter."""
        (x0, y0), (x1, y1) = self.bbox
        return 1e-9 * float(np.hypot(x1 - x0, y1 - y0))

    def signed_value(self, p):
        """Signed boundary proximity at p: <0 inside, >0 outside."""
        return self._signed(check_point(p, "p"))

    def signed_xy(self, x, y):
        """Scalar fast path for signed_value((x, y)); same arithmetic."""
        return self._signed(np.array([x, y]))

    def signed_values(self, P):
        """Vectorized signed_value over an (n, 2) array."""
        P = np.asarray(P, dtype=float)
        return self._signed_many(P)

    def contains(self, p):
        """True when p is inside or on the boundary (within tol_b)."""
        return self.signed_value(p) <= self.tol_b

    def contains_points(self, P):
        return self.signed_values(P) <= self.tol_b

    def membership(self, p):
        """Classify p as 'inside', 'boundary', or 'outside'."""
        s = self.signed_value(p)
        t = self.tol_b
        if abs(s) <= t:
            return "boundary"
        return "inside" if s < 0 else "outside"

    def project_to_boundary(self, z):
        """Nearest boundary point xi(z).  Raises AmbiguousProjection on ties."""
        raise NotImplementedError

    def inner_normal(self, x):
        """Unit normal at a boundary point x, pointing into the domain."""
        raise NotImplementedError

    def boundary_points(self, pitch):
        """Boundary sample points with spacing at most pitch."""
        raise NotImplementedError

    def boundary_distance(self, p):
        """Euclidean distance from p to the domain boundary (either side)."""
        p = check_point(p, "p")
        xi = self.project_to_boundary(p)
        return float(np.hypot(*(xi - p)))

    @property
    def spec(self):
        """Serializable constructor description for manifests."""
        raise NotImplementedError

    def _signed(self, p):
        raise NotImplementedError

    def _signed_many(self, P):
        return np.array([self._signed(q) for q in P])


class Disk(Domain):
    """Closed disk of given center and radius.  Signed value is exact."""

    def __init__(self, center, radius):
        self.center = check_point(center, "center")
        self.radius = check_positive(radius, "radius")
        self._cx, self._cy = float(self.center[0]), float(self.center[1])

    @property
    def bbox(self):
        r = self.radius
        return (tuple(self.center - r), tuple(self.center + r))

    @property
    def spec(self):
        return {"name": "disk", "center": [self._cx, self._cy],
                "radius": self.radius}

    def boundary_distance(self, p):
        p = check_point(p, "p")
        return abs(math.hypot(p[0] - self._cx, p[1] - self._cy) - self.radius)

    def _signed(self, p):
        return self.signed_xy(p[0], p[1])

    def signed_xy(self, x, y):
        return math.hypot(x - self._cx, y - self._cy) - self.radius

    def _signed_many(self, P):
        d = P - self.center
        return np.hypot(d[:, 0], d[:, 1]) - self.radius

    def project_to_boundary(self, z):
        z = check_point(z, "z")
        v = z - self.center
        d = float(np.hypot(*v))
        if d < TOL_D:
            raise AmbiguousProjection(
                "projection from the disk center is not unique")
        return self.center + v * (self.radius / d)

    def inner_normal(self, x):
        x = check_point(x, "x")
        v = self.center - x
        d = float(np.hypot(*v))
        if d == 0.0:
            raise ValueError("inner_normal requires a boundary point")
        return v / d

    def boundary_points(self, pitch):
        n = max(8, int(np.ceil(2 * np.pi * self.radius / pitch)))
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])


class Ellipse(Domain):
    """Axis-aligned ellipse (x/a)^2 + (y/b)^2 <= 1 translated to a center.

    The signed value is the first-order normalization phi/|grad phi| of the
    implicit function, which approximates distance near the boundary; the
    sign (and hence membership) is exact.  Projection solves the
    one-dimensional Lagrange condition by damped Newton with a dense
    boundary-sampling fallback.
    """

    def __init__(self, center, semi_axes):
        self.center = check_point(center, "center")
        axes = check_point(semi_axes, "semi_axes")
        if axes.size != 2 or np.any(axes <= 0):
            raise ValueError("semi_axes must be two positive lengths")
        self.semi_axes = axes
        self._cx, self._cy = float(self.center[0]), float(self.center[1])
        self._ab = (float(axes[0]), float(axes[1]))

    @property
    def bbox(self):
        return (tuple(self.center - self.semi_axes),
                tuple(self.center + self.semi_axes))

    @property
    def spec(self):
        return {"name": "ellipse", "center": [self._cx, self._cy],
                "semi_axes": [self._ab[0], self._ab[1]]}

    def _phi_grad(self, p):
        a, b = self.semi_axes
        u = (p - self.center) / (a, b)
        phi = u[0] * u[0] + u[1] * u[1] - 1.0
        grad = 2.0 * u / (a, b)
        return phi, grad

    def _signed(self, p):
        return self.signed_xy(p[0], p[1])

    def signed_xy(self, x, y):
        a, b = self._ab
        ux = (x - self._cx) / a
        uy = (y - self._cy) / b
        phi = ux * ux + uy * uy - 1.0
        gn = 2.0 * math.hypot(ux / a, uy / b)
        if gn == 0.0:
            # domain center; report distance to the nearest vertex instead
            return -min(a, b)
        return phi / gn

    def _signed_many(self, P):
        a, b = self.semi_axes
        ux = (P[:, 0] - self.center[0]) / a
        uy = (P[:, 1] - self.center[1]) / b
        phi = ux * ux + uy * uy - 1.0
        gn = 2.0 * np.hypot(ux / a, uy / b)
        out = np.where(gn > 0, phi / np.where(gn > 0, gn, 1.0),
                       -min(self.semi_axes))
        return out

    def project_to_boundary(self, z):
        z = check_point(z, "z")
        w = z - self.center
        a, b = self.semi_axes
        sx = 1.0 if w[0] >= 0 else -1.0
        sy = 1.0 if w[1] >= 0 else -1.0
        p = self._project_quadrant(abs(w[0]), abs(w[1]), a, b)
        return self.center + np.array([sx * p[0], sy * p[1]])

    def _project_quadrant(self, z1, z2, a, b):
        # Nearest point on the first-quadrant arc for z1, z2 >= 0.
        scale = max(a, b)
        axis_tol = 1e-14 * scale
        if z1 <= axis_tol and z2 <= axis_tol:
            raise AmbiguousProjection(
                "projection from the ellipse center is not unique")
        if z2 <= axis_tol:
            return self._project_on_major(z1, a, b)
        if z1 <= axis_tol:
            return self._project_on_major(z2, b, a)[::-1]
        t = self._lagrange_root(z1, z2, a, b)
        return np.array([a * a * z1 / (t + a * a), b * b * z2 / (t + b * b)])

    @staticmethod
    def _project_on_major(z1, a, b):
        # z on the positive a-axis at distance z1 from the center.
        if a <= b:
            # axis of the smaller (or equal) semi-axis: vertex is nearest
            if a == b and z1 == 0.0:
                raise AmbiguousProjection("center of a circle")
            return np.array([a, 0.0])
        c2 = a * a - b * b
        if z1 >= c2 / a:
            return np.array([a, 0.0])
        # inside the evolute: two symmetric off-axis points are equally near
        raise AmbiguousProjection(
            "point on the major axis inside the evolute has two nearest "
            "boundary points")

    @staticmethod
    def _lagrange_root(z1, z2, a, b):
        # Solve F(t) = (a z1/(t+a^2))^2 + (b z2/(t+b^2))^2 = 1 for the
        # largest root t > -min(a,b)^2.  F is decreasing and convex there,
        # so Newton started right of the root overshoots once and then
        # converges monotonically; steps are damped if they cross the pole.
        lo = -min(a, b) ** 2
        n1, n2 = a * z1, b * z2
        t = np.hypot(n1, n2) - min(a, b) ** 2  # classical start, F(t0) <= 1
        scale = max(a, b) ** 2 + t
        for _ in range(_NEWTON_MAX_ITER):
            d1, d2 = t + a * a, t + b * b
            f = (n1 / d1) ** 2 + (n2 / d2) ** 2 - 1.0
            if abs(f) < 1e-14:
                return t
            fp = -2.0 * ((n1 * n1) / d1 ** 3 + (n2 * n2) / d2 ** 3)
            step = -f / fp
            t_new = t + step
            damp = 0
            while t_new <= lo and damp < 60:
                step *= 0.5
                t_new = t + step
                damp += 1
            if t_new == t:
                break
            t = t_new
            if abs(step) < 1e-17 * max(1.0, abs(scale)):
                d1, d2 = t + a * a, t + b * b
                if abs((n1 / d1) ** 2 + (n2 / d2) ** 2 - 1.0) < 1e-11:
                    return t
                break
        return Ellipse._dense_root(z1, z2, a, b)

    @staticmethod
    def _dense_root(z1, z2, a, b):
        # Fallback: scan a dense boundary sampling and convert the nearest
        # sample back to the Lagrange parameter.
        n = int(np.ceil(0.5 * np.pi * max(a, b) / _FALLBACK_PITCH))
        th = np.linspace(0.0, 0.5 * np.pi, n)
        bx, by = a * np.cos(th), b * np.sin(th)
        k = int(np.argmin((bx - z1) ** 2 + (by - z2) ** 2))
        x = max(bx[k], 1e-300)
        return a * a * z1 / x - a * a

    def inner_normal(self, x):
        x = check_point(x, "x")
        _, grad = self._phi_grad(x)
        gn = float(np.hypot(*grad))
        if gn == 0.0:
            raise ValueError("inner_normal requires a boundary point")
        return -grad / gn

    def boundary_points(self, pitch):
        # parameter speed is at most max(a, b), so this spacing bound holds
        n = max(8, int(np.ceil(2 * np.pi * max(self.semi_axes) / pitch)))
        t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        a, b = self.semi_axes
        return self.center + np.column_stack([a * np.cos(t), b * np.sin(t)])


class _Composite(Domain):
    """Shared plumbing for two-operand constructive domains."""

    def __init__(self, a, b):
        if not isinstance(a, Domain) or not isinstance(b, Domain):
            raise TypeError("operands must be Domain instances")
        self.a = a
        self.b = b

    def _candidates(self, z):
        """Projections onto each constituent boundary that lie on the
        composite boundary, as (distance, point, ambiguous) triples.

        A constituent whose own projection is ambiguous still contributes a
        distance estimate (from dense sampling) so that the other
        constituent can win outright when it is strictly nearer.
        """
        out = []
        for part in (self.a, self.b):
            try:
                q = part.project_to_boundary(z)
                amb = False
            except AmbiguousProjection:
                q = self._nearest_on_part(part, z)
                amb = True
            if q is not None and self._on_boundary(q):
                out.append((float(np.hypot(*(q - z))), q, amb))
        return out

    def _nearest_on_part(self, part, z):
        pts = part.boundary_points(_FALLBACK_PITCH)
        valid = np.abs(self.signed_values(pts)) <= 10 * self.tol_b
        if not valid.any():
            return None
        pts = pts[valid]
        d = np.hypot(pts[:, 0] - z[0], pts[:, 1] - z[1])
        return pts[int(np.argmin(d))]

    def _on_boundary(self, q):
        return abs(self.signed_value(q)) <= 10 * self.tol_b

    def boundary_distance(self, p):
        p = check_point(p, "p")
        best = None
        for part in (self.a, self.b):
            try:
                q = part.project_to_boundary(p)
                cands = [q]
            except AmbiguousProjection:
                qq = self._nearest_on_part(part, p)
                cands = [] if qq is None else [qq]
            for q in cands:
                if self._on_boundary(q):
                    d = float(np.hypot(*(q - p)))
                    if best is None or d < best:
                        best = d
        if best is None:
            pts = self.boundary_points(_FALLBACK_PITCH)
            if len(pts) == 0:
                raise ValueError("composite domain has no boundary")
            best = float(np.hypot(pts[:, 0] - p[0], pts[:, 1] - p[1]).min())
        return best

    def project_to_boundary(self, z):
        z = check_point(z, "z")
        cands = self._candidates(z)
        if not cands:
            cands = self._dense_candidates(z)
        if not cands:
            raise AmbiguousProjection("no valid boundary projection found")
        cands.sort(key=lambda c: c[0])
        d0, q0, amb0 = cands[0]
        if amb0:
            raise AmbiguousProjection(
                "nearest constituent boundary has a non-unique projection")
        if len(cands) > 1:
            d1, q1, _ = cands[1]
            if d1 - d0 < TOL_D and np.hypot(*(q1 - q0)) > TOL_PROJ:
                raise AmbiguousProjection(
                    "two boundary points at indistinguishable distance")
        return q0

    def _dense_candidates(self, z):
        pts = self.boundary_points(_FALLBACK_PITCH)
        if len(pts) == 0:
            return []
        d = np.hypot(pts[:, 0] - z[0], pts[:, 1] - z[1])
        k = int(np.argmin(d))
        return [(float(d[k]), pts[k], False)]

    def inner_normal(self, x):
        x = check_point(x, "x")
        sa = abs(self.a.signed_value(x))
        sb = abs(self.b.signed_value(x))
        if sa <= sb:
            return self._normal_from_a(x)
        return self._normal_from_b(x)

    def boundary_points(self, pitch):
        keep = []
        for part in (self.a, self.b):
            pts = part.boundary_points(pitch)
            on = np.abs(self.signed_values(pts)) <= 10 * self.tol_b
            if on.any():
                keep.append(pts[on])
        if not keep:
            return np.empty((0, 2))
        return np.vstack(keep)


class DifferenceDomain(_Composite):
    """Set difference A minus the open interior of B."""

    @property
    def bbox(self):
        return self.a.bbox

    @property
    def spec(self):
        return {"name": "difference", "a": self.a.spec, "b": self.b.spec}

    def _signed(self, p):
        return max(self.a._signed(p), -self.b._signed(p))

    def signed_xy(self, x, y):
        return max(self.a.signed_xy(x, y), -self.b.signed_xy(x, y))

    def _signed_many(self, P):
        return np.maximum(self.a._signed_many(P), -self.b._signed_many(P))

    def _normal_from_a(self, x):
        return self.a.inner_normal(x)

    def _normal_from_b(self, x):
        return -self.b.inner_normal(x)


class IntersectionDomain(_Composite):
    """Set intersection of A and B."""

    @property
    def bbox(self):
        (ax0, ay0), (ax1, ay1) = self.a.bbox
        (bx0, by0), (bx1, by1) = self.b.bbox
        lo = (max(ax0, bx0), max(ay0, by0))
        hi = (min(ax1, bx1), min(ay1, by1))
        if lo[0] > hi[0] or lo[1] > hi[1]:
            raise ValueError("intersection bounding boxes do not overlap")
        return (lo, hi)

    @property
    def spec(self):
        return {"name": "intersection", "a": self.a.spec, "b": self.b.spec}

    def _signed(self, p):
        return max(self.a._signed(p), self.b._signed(p))

    def signed_xy(self, x, y):
        return max(self.a.signed_xy(x, y), self.b.signed_xy(x, y))

    def _signed_many(self, P):
        return np.maximum(self.a._signed_many(P), self.b._signed_many(P))

    def _normal_from_a(self, x):
        return self.a.inner_normal(x)

    def _normal_from_b(self, x):
        return self.b.inner_normal(x)


def disk(center, radius):
    return Disk(center, radius)


def ellipse(center, semi_axes):
    return Ellipse(center, semi_axes)


def difference(a, b):
    return DifferenceDomain(a, b)


def intersection(a, b):
    return IntersectionDomain(a, b)


def symmetric_point(domain, z):
    """Mirror image of z across the nearest boundary point.

    Returns sym(z) = 2 xi(z) - z where xi(z) is the boundary projection.
    Raises AmbiguousProjection when the projection is not unique; the
    simulator treats that as a rejected move.
    """
    z = check_point(z, "z")
    xi = domain.project_to_boundary(z)
    return 2.0 * xi - z


def domain_from_spec(spec):
    """Rebuild a domain from its serializable spec dict."""
    kind = spec.get("name")
    if kind == "disk":
        return Disk(spec["center"], spec["radius"])
    if kind == "ellipse":
        return Ellipse(spec["center"], spec["semi_axes"])
    if kind == "difference":
        return DifferenceDomain(domain_from_spec(spec["a"]),
                                domain_from_spec(spec["b"]))
    if kind == "intersection":
        return IntersectionDomain(domain_from_spec(spec["a"]),
                                  domain_from_spec(spec["b"]))
    raise ValueError(f"unknown domain spec {spec!r}")
