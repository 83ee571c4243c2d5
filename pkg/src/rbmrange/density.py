"""Kernel density estimation from trajectory samples.

The estimate is the plain finite sum ghat(x) = (1/n) sum K_h(x - X_i)
with K_h(x) = K(x/h) / h^d, evaluated by compiled direct summation over
a cell-binned sample layout in d = 2 (see _fastsum).  Pointwise, grid,
and at-sample evaluation share one accumulation order and agree bit for
bit.  An optional support mask forces the estimate to zero outside an
estimated support region; masked estimates are deliberately not
renormalized, so level thresholds keep their meaning.
"""

import numpy as np

from . import _fastsum
from .exceptions import NonDifferentiablePoint
from .kernels import kernel_by_name
from ._validation import (check_count, check_grid_axes, check_point,
                          check_points, check_positive)

_EPAN_EDGE = 1e-8  # relative half-width of the non-differentiable shell


BANDWIDTH_MODES = ("rate_optimal", "uniform_consistency")


def default_bandwidth(n, d, mode="rate_optimal", c_h=1.0):
    """Bandwidth rules tied to the two consistency regimes.

    rate_optimal gives h = c_h * n^(-1/(d+2)) (the regime attaining the
    best sup-norm rate); uniform_consistency gives the slower-shrinking
    h = c_h * n^(-1/(d+1)) under which uniform convergence needs the
    least regularity.
    """
    n = check_count(n, "n", minimum=2)
    d = check_count(d, "d", minimum=1)
    c_h = check_positive(c_h, "c_h")
    if mode == "rate_optimal":
        return c_h * n ** (-1.0 / (d + 2))
    if mode == "uniform_consistency":
        return c_h * n ** (-1.0 / (d + 1))
    raise ValueError("mode must be 'rate_optimal' or 'uniform_consistency'")


class DensityEstimate:
    """Sample points + kernel + bandwidth, evaluable anywhere.

    Parameters
    ----------
    samples : (n, d) array
        Observation points (typically trajectory positions).
    bandwidth : float
        Kernel bandwidth h > 0.
    kernel : str or Kernel
        'gaussian' or 'epanechnikov' (resolved for the sample dimension).
    mask : Region2D, optional
        Support mask; evaluations outside it return exactly 0 (d=2 only).
    """

    def __init__(self, samples, bandwidth, kernel="gaussian", mask=None):
        self.samples = check_points(samples, "samples")
        self.h = check_positive(bandwidth, "bandwidth")
        self.n, self.d = self.samples.shape
        self.kernel = kernel_by_name(kernel, self.d)
        if mask is not None and self.d != 2:
            raise ValueError("support masks are only supported for d = 2")
        self.mask = mask
        self._layout = self._build_layout() if self.d == 2 else None

    @property
    def bandwidth(self):
        return self.h

    @property
    def cutoff(self):
        """Radius beyond which samples cannot influence an evaluation."""
        return self.kernel.cutoff_radius * self.h

    def _build_layout(self):
        cutoff = self.kernel.cutoff_radius * self.h
        sx = np.ascontiguousarray(self.samples[:, 0])
        sy = np.ascontiguousarray(self.samples[:, 1])
        x0, x1 = float(sx.min()), float(sx.max())
        y0, y1 = float(sy.min()), float(sy.max())
        extent = max(x1 - x0, y1 - y0, 1e-300)
        cell = max(cutoff / 2.0, extent / 2048.0)
        inv_cell = 1.0 / cell
        ncx = int(np.floor((x1 - x0) * inv_cell)) + 1
        ncy = int(np.floor((y1 - y0) * inv_cell)) + 1
        cx = np.floor((sx - x0) * inv_cell).astype(np.int64)
        cy = np.floor((sy - y0) * inv_cell).astype(np.int64)
        np.clip(cx, 0, ncx - 1, out=cx)
        np.clip(cy, 0, ncy - 1, out=cy)
        lin = cy * ncx + cx
        order = np.argsort(lin, kind="stable")
        starts = np.zeros(ncx * ncy + 1, dtype=np.int64)
        np.cumsum(np.bincount(lin, minlength=ncx * ncy), out=starts[1:])
        return {
            "sx": np.ascontiguousarray(sx[order]),
            "sy": np.ascontiguousarray(sy[order]),
            "starts": starts, "order": order,
            "x0": x0, "y0": y0, "inv_cell": inv_cell,
            "ncx": ncx, "ncy": ncy, "cutoff": cutoff,
        }

    # evaluation -----------------------------------------------------------

    @property
    def _scale(self):
        return self.kernel.c_norm / (self.n * self.h ** self.d)

    def _raw_sums(self, Q):
        L = self._layout
        qx = np.ascontiguousarray(Q[:, 0])
        qy = np.ascontiguousarray(Q[:, 1])
        cut = L["cutoff"]
        return _fastsum._sum_points(
            qx, qy, L["sx"], L["sy"], L["starts"], L["x0"], L["y0"],
            L["inv_cell"], L["ncx"], L["ncy"], 1.0 / self.h ** 2,
            cut * cut, self.kernel.prof_id, cut)

    def evaluate_points(self, X):
        """Density values at each row of X."""
        X = check_points(np.atleast_2d(np.asarray(X, dtype=float)), "X",
                         allow_empty=True)
        if X.shape[1] != self.d:
            raise ValueError(f"query dimension {X.shape[1]} != sample "
                             f"dimension {self.d}")
        if self.mask is not None:
            inside = self.mask.contains_points(X)
            out = np.zeros(len(X))
            if inside.any():
                out[inside] = self._eval_unmasked(X[inside])
            return out
        return self._eval_unmasked(X)

    def _eval_unmasked(self, X):
        if self.d == 2:
            return self._raw_sums(X) * self._scale
        # generic-dimension direct sum (no binning)
        diff = (X[:, None, :] - self.samples[None, :, :]) / self.h
        s = np.einsum("ijk,ijk->ij", diff, diff)
        return self.kernel.profile(s).sum(axis=1) * self._scale

    def evaluate(self, x):
        """Density value at a single point."""
        x = check_point(x, "x")
        return float(self.evaluate_points(x[None, :])[0])

    def evaluate_at_samples(self):
        """Density at the estimate's own sample points.

        Exploits symmetry (each pair enters two sums) at half the cost of
        evaluate_points(samples); results are bit-identical to it.
        """
        if self.d != 2:
            return self.evaluate_points(self.samples)
        L = self._layout
        cut = L["cutoff"]
        raw = _fastsum._sum_self(
            L["sx"], L["sy"], L["starts"], L["x0"], L["y0"],
            L["inv_cell"], L["ncx"], L["ncy"], 1.0 / self.h ** 2,
            cut * cut, self.kernel.prof_id, cut)
        out = np.empty(self.n)
        out[L["order"]] = raw
        vals = out * self._scale
        if self.mask is not None:
            vals = np.where(self.mask.contains_points(self.samples), vals, 0.0)
        return vals

    def evaluate_on_grid(self, grid):
        """Field of density values over (xs, ys) axes; field[i, j] is the
        value at (xs[j], ys[i]).  Bit-equal to pointwise evaluation."""
        xs, ys = check_grid_axes(grid)
        XX, YY = np.meshgrid(xs, ys)
        Q = np.column_stack([XX.ravel(), YY.ravel()])
        return self.evaluate_points(Q).reshape(len(ys), len(xs))

    # gradient -------------------------------------------------------------

    def gradient_points(self, X):
        """Analytic gradient of the finite sum at each row of X.

        The support mask is ignored here: the gradient refers to the
        unmasked sum (the masked function is not differentiable at the
        mask boundary).
        """
        X = check_points(np.atleast_2d(np.asarray(X, dtype=float)), "X",
                         allow_empty=True)
        if self.d != 2:
            diff = (X[:, None, :] - self.samples[None, :, :]) / self.h
            s = np.einsum("ijk,ijk->ij", diff, diff)
            fac = self.kernel.profile_grad_factor(s)
            if self.kernel.prof_id == 1:
                r = np.sqrt(s)
                if np.any(np.abs(r - 1.0) <= _EPAN_EDGE):
                    raise NonDifferentiablePoint(
                        "a sample lies on the kernel support sphere")
            raw = np.einsum("ij,ijk->ik", fac, diff * self.h)
            return raw * (2.0 * self.kernel.c_norm
                          / (self.n * self.h ** (self.d + 2)))
        L = self._layout
        cut = L["cutoff"]
        if self.kernel.prof_id == 1:
            cut = cut * (1.0 + 10.0 * _EPAN_EDGE)  # keep the edge shell visible
        qx = np.ascontiguousarray(X[:, 0])
        qy = np.ascontiguousarray(X[:, 1])
        edge_lo = (1.0 - _EPAN_EDGE) ** 2
        edge_hi = (1.0 + _EPAN_EDGE) ** 2
        gx, gy, edge = _fastsum._grad_points(
            qx, qy, L["sx"], L["sy"], L["starts"], L["x0"], L["y0"],
            L["inv_cell"], L["ncx"], L["ncy"], 1.0 / self.h ** 2,
            cut * cut, self.kernel.prof_id, cut, edge_lo, edge_hi)
        if self.kernel.prof_id == 1 and edge.any():
            k = int(np.nonzero(edge)[0][0])
            raise NonDifferentiablePoint(
                f"query {k} has a sample on the kernel support sphere")
        scale = 2.0 * self.kernel.c_norm / (self.n * self.h ** (self.d + 2))
        return np.column_stack([gx, gy]) * scale

    def gradient(self, x):
        x = check_point(x, "x")
        return self.gradient_points(x[None, :])[0]

    def __repr__(self):
        masked = "masked" if self.mask is not None else "unmasked"
        return (f"DensityEstimate(n={self.n}, d={self.d}, "
                f"h={self.h:.6g}, kernel={self.kernel.name}, {masked})")


# free-function forms of the operations

def evaluate_density(estimate, x):
    return estimate.evaluate(x)


def evaluate_on_grid(estimate, grid):
    return estimate.evaluate_on_grid(grid)


def gradient_density(estimate, x):
    return estimate.gradient(x)
