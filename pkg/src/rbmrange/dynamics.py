"""Seeded simulation of reflected Brownian motion with drift.

The discrete scheme advances Y = X + Z + delta*mu(X) with Z a centred
Gaussian of covariance delta*I, then applies one of three cases: accept Y
if it lies in the domain; otherwise mirror Y across the nearest boundary
point and accept the mirror image if that lies in the domain; otherwise
stay put.  Membership uses the domain's signed value with its boundary
tolerance, and an ambiguous projection counts as a rejected mirror.

Randomness comes from a named, seedable generator (PCG64) consumed
scalar-by-scalar through the polar method, so trajectories are
bit-reproducible for a given seed on any platform.
"""

import math

import numpy as np

from .domains import Domain
from .exceptions import AmbiguousProjection, NonFiniteDrift, StartOutsideDomain
from ._validation import check_count, check_point, check_positive


class DriftFunction:
    """A drift field with a declared Lipschitz bound.

    Parameters
    ----------
    func : callable
        Maps an (d,) array to an (d,) array.
    lipschitz : float
        Declared Lipschitz constant (checked by the test suite, not here).
    potential : callable, optional
        Scalar potential with mu = grad(potential)/2.  When set, the drift
        is the gradient case and the stationary density is proportional to
        exp(potential) on the domain.
    scalar_func : callable, optional
        Fast two-argument form (x, y) -> (ux, uy) used by the simulator.
    spec : dict, optional
        Serializable description for manifests, e.g. {"name": ..., ...}.
    """

    def __init__(self, func, lipschitz, potential=None, scalar_func=None,
                 spec=None):
        self.func = func
        self.lipschitz = float(lipschitz)
        self.potential = potential
        self.scalar_func = scalar_func
        self.spec = dict(spec) if spec else {"name": "custom"}

    @property
    def is_gradient_case(self):
        return self.potential is not None

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def zero_drift():
    """No drift; the stationary law is uniform on the domain."""
    return DriftFunction(
        lambda x: np.zeros_like(x), 0.0,
        potential=lambda x: 0.0,
        scalar_func=lambda x, y: (0.0, 0.0),
        spec={"name": "none"})


def linear_drift(center=(0.0, 0.0), rate=1.0):
    """Restoring drift mu(x) = -rate * (x - center).

    Gradient case with potential -rate*|x - center|^2, so the stationary
    density is proportional to exp(-rate*|x - center|^2) on the domain.
    """
    c = np.asarray(center, dtype=float)
    rate = float(rate)
    cx, cy = float(c[0]), float(c[1])
    return DriftFunction(
        lambda x: -rate * (x - c), abs(rate),
        potential=lambda x: -rate * float(np.dot(x - c, x - c)),
        scalar_func=lambda x, y: (-rate * (x - cx), -rate * (y - cy)),
        spec={"name": "linear", "center": [cx, cy], "rate": rate})


def drift_from_spec(spec):
    """Rebuild a drift from its serialized spec dict (inverse of .spec)."""
    if spec is None:
        return zero_drift()
    kind = spec.get("name")
    if kind == "none":
        return zero_drift()
    if kind == "linear":
        return linear_drift(spec.get("center", (0.0, 0.0)),
                            spec.get("rate", 1.0))
    raise ValueError(f"unknown drift spec {spec!r}")


def make_rng(seed):
    """The package's named generator: PCG64 seeded via SeedSequence."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed, n):
    """Split one seed into n independent child generators (documented
    stream-splitting rule: SeedSequence.spawn order is the child index)."""
    return [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(seed).spawn(n)]


def _polar_pair(rng):
    # Marsaglia polar method, fixed consumption: uniform pairs in (-1,1)^2
    # are drawn until one lands in the open unit disk (excluding the
    # origin); each uniform is one scalar rng.random() call.
    while True:
        u = 2.0 * rng.random() - 1.0
        v = 2.0 * rng.random() - 1.0
        s = u * u + v * v
        if 0.0 < s < 1.0:
            m = math.sqrt(-2.0 * math.log(s) / s)
            return u * m, v * m


def gaussian_step(delta, rng, d=2):
    """One centred Gaussian vector with covariance delta * I_d."""
    delta = check_positive(delta, "delta")
    sd = math.sqrt(delta)
    out = np.empty(d)
    i = 0
    while i < d:
        g1, g2 = _polar_pair(rng)
        out[i] = sd * g1
        if i + 1 < d:
            out[i + 1] = sd * g2
        i += 2
    return out


class Trajectory:
    """Time-stamped in-domain positions from simulation or ingestion.

    positions has shape (N+1, d) for N steps.  delta is the (uniform)
    sampling step.  breaks lists left indices i whose increment (i, i+1)
    must not feed drift estimation (ingested gap flags).
    """

    def __init__(self, positions, delta, seed=None, provenance="simulated",
                 timestamps=None, breaks=(), meta=None):
        self.positions = np.asarray(positions, dtype=float)
        if self.positions.ndim != 2 or len(self.positions) < 1:
            raise ValueError("positions must be a non-empty (n, d) array")
        self.delta = float(delta)
        if provenance == "simulated" and self.delta <= 0:
            raise ValueError("simulated trajectories need delta > 0")
        self.seed = seed
        self.provenance = provenance
        self.timestamps = (None if timestamps is None
                           else np.asarray(timestamps, dtype=float))
        self.breaks = frozenset(int(b) for b in breaks)
        self.meta = dict(meta or {})

    @property
    def n_steps(self):
        return len(self.positions) - 1

    @property
    def dim(self):
        return self.positions.shape[1]

    def __len__(self):
        return len(self.positions)

    def increments(self):
        """Position increments with a validity mask (False across breaks)."""
        inc = np.diff(self.positions, axis=0)
        valid = np.ones(len(inc), dtype=bool)
        for b in self.breaks:
            if 0 <= b < len(inc):
                valid[b] = False
        return inc, valid

    def prefix(self, n_steps):
        """The trajectory's own first n_steps steps (same law, same seed)."""
        n_steps = check_count(n_steps, "n_steps")
        if n_steps > self.n_steps:
            raise ValueError("prefix longer than the trajectory")
        ts = None if self.timestamps is None else self.timestamps[:n_steps + 1]
        return Trajectory(self.positions[:n_steps + 1], self.delta, self.seed,
                          self.provenance, ts,
                          {b for b in self.breaks if b < n_steps},
                          dict(self.meta, prefix_of=self.n_steps))


def subsample(trajectory, stride):
    """Thin a trajectory to every stride-th position, scaling delta.

    Weakens serial dependence ahead of density estimation; stride 1 is the
    identity (a copy).
    """
    stride = check_count(stride, "stride", minimum=1)
    pos = trajectory.positions[::stride]
    ts = (None if trajectory.timestamps is None
          else trajectory.timestamps[::stride])
    breaks = set()
    if trajectory.breaks:
        for j in range(len(pos) - 1):
            lo, hi = j * stride, (j + 1) * stride
            if any(lo <= b < hi for b in trajectory.breaks):
                breaks.add(j)
    meta = dict(trajectory.meta)
    if stride > 1:
        meta["subsample_stride"] = int(meta.get("subsample_stride", 1)) * stride
    return Trajectory(pos, trajectory.delta * stride, trajectory.seed,
                      trajectory.provenance, ts, breaks, meta)


def simulate_rbmd(domain, drift, x0, delta, n_steps, seed):
    """Simulate the reflected scheme and return the Trajectory.

    Each step records which case fired; counts are stored in the meta
    dict under case1/case2/case3 (accept, mirror, stay).
    """
    if not isinstance(domain, Domain):
        raise TypeError("domain must be a Domain")
    if not isinstance(drift, DriftFunction):
        drift = DriftFunction(drift, lipschitz=float("nan"))
    x0 = check_point(x0, "x0")
    delta = check_positive(delta, "delta")
    n_steps = check_count(n_steps, "n_steps")

    tol = domain.tol_b
    if domain.signed_value(x0) > tol:
        raise StartOutsideDomain(f"x0={tuple(x0)} is outside the domain")

    d = x0.size
    rng = make_rng(seed)
    pos = np.empty((n_steps + 1, d))
    pos[0] = x0
    counts = [0, 0, 0]

    scalar = drift.scalar_func if (drift.scalar_func and d == 2) else None
    signed = domain._signed
    sd = math.sqrt(delta)

    if scalar is not None:
        signed_xy = domain.signed_xy
        x, y = float(x0[0]), float(x0[1])
        for i in range(n_steps):
            g1, g2 = _polar_pair(rng)
            ux, uy = scalar(x, y)
            if not (math.isfinite(ux) and math.isfinite(uy)):
                raise NonFiniteDrift(f"drift not finite at step {i}")
            yx = x + sd * g1 + delta * ux
            yy = y + sd * g2 + delta * uy
            if signed_xy(yx, yy) <= tol:
                x, y = yx, yy
                counts[0] += 1
            else:
                mirror = _try_mirror(domain, signed_xy, tol, yx, yy)
                if mirror is not None:
                    x, y = mirror
                    counts[1] += 1
                else:
                    counts[2] += 1
            pos[i + 1, 0] = x
            pos[i + 1, 1] = y
    else:
        x = x0.copy()
        for i in range(n_steps):
            z = gaussian_step(delta, rng, d)
            mu = drift(x)
            if not np.all(np.isfinite(mu)):
                raise NonFiniteDrift(f"drift not finite at step {i}")
            ycand = x + z + delta * mu
            if signed(ycand) <= tol:
                x = ycand
                counts[0] += 1
            else:
                accepted = False
                try:
                    xi = domain.project_to_boundary(ycand)
                    mirror = 2.0 * xi - ycand
                    if signed(mirror) <= tol:
                        x = mirror
                        accepted = True
                except AmbiguousProjection:
                    pass
                counts[1 if accepted else 2] += 1
            pos[i + 1] = x

    meta = {"case1": counts[0], "case2": counts[1], "case3": counts[2],
            "domain": getattr(domain, "spec", None) or repr(domain),
            "drift": drift.spec}
    return Trajectory(pos, delta, seed=seed, provenance="simulated", meta=meta)


def _try_mirror(domain, signed_xy, tol, yx, yy):
    """Mirror of (yx, yy) across the nearest boundary point, or None when
    the projection is ambiguous or the mirror lands outside."""
    try:
        xi = domain.project_to_boundary(np.array([yx, yy]))
    except AmbiguousProjection:
        return None
    mx, my = 2.0 * xi[0] - yx, 2.0 * xi[1] - yy
    if signed_xy(mx, my) <= tol:
        return mx, my
    return None
