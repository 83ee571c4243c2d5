"""Smoothing kernels with quadrature-computed constants.

Each kernel is radially symmetric: K(u) = c_norm * profile(|u|^2).  The
constants an estimator's error analysis needs (sup value k1, Lipschitz
constant, first absolute moment kappa) are measured on a reference grid
at construction rather than hard-coded, so a new kernel only has to
supply its profile and normalization.
"""

import math

import numpy as np

_GRID_N = 801  # odd, so the origin is a node


def _unit_ball_volume(d):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


class Kernel:
    """Base kernel.  Subclasses set name, c_norm, support/cutoff radii and
    the profile (a function of squared radius)."""

    name = None
    prof_id = None  # dispatch tag for the compiled summation kernels

    def __init__(self, d=2):
        self.d = int(d)
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        self._constants = None

    # profile and normalization ------------------------------------------

    def profile(self, s):
        """Shape factor as a function of s = |u|^2, before normalization."""
        raise NotImplementedError

    def profile_grad_factor(self, s):
        """d/ds of the profile (used by the analytic kernel gradient)."""
        raise NotImplementedError

    @property
    def c_norm(self):
        raise NotImplementedError

    @property
    def support_radius(self):
        """Radius beyond which K vanishes (inf for the gaussian)."""
        raise NotImplementedError

    @property
    def cutoff_radius(self):
        """Summation cutoff in u-units; equals support for compact kernels,
        and 8 for the gaussian (per-sample truncation error below
        1e-13 * k1)."""
        raise NotImplementedError

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return float(self.c_norm * self.profile(float(np.dot(u, u))))
        s = np.einsum("ij,ij->i", u, u)
        return self.c_norm * self.profile(s)

    def gradient(self, u):
        """Analytic grad K(u) = c_norm * profile'(|u|^2) * 2u."""
        u = np.asarray(u, dtype=float)
        s = float(np.dot(u, u)) if u.ndim == 1 else np.einsum("ij,ij->i", u, u)
        fac = self.c_norm * self.profile_grad_factor(s) * 2.0
        if u.ndim == 1:
            return fac * u
        return fac[:, None] * u

    # measured constants ---------------------------------------------------

    def _measure(self):
        if self.d > 3:
            raise NotImplementedError(
                "kernel constants are measured only for d <= 3")
        L = min(self.cutoff_radius, 40.0)
        n = _GRID_N if self.d < 3 else 201
        ax = np.linspace(-L, L, n)
        w = (ax[1] - ax[0]) ** self.d
        grids = np.meshgrid(*([ax] * self.d), indexing="ij")
        U = np.column_stack([g.ravel() for g in grids])
        vals = self(U)
        grads = self.gradient(U)
        self._constants = {
            "integral": float(vals.sum() * w),
            "k1": float(vals.max()),
            "kappa": float((np.linalg.norm(U, axis=1) * vals).sum() * w),
            "lipschitz": float(np.linalg.norm(grads, axis=1).max()),
        }

    def _const(self, key):
        if self._constants is None:
            self._measure()
        return self._constants[key]

    @property
    def k1(self):
        """Sup of K, from the measurement grid."""
        return self._const("k1")

    @property
    def kappa(self):
        """First absolute moment, integral of |u| K(u) du."""
        return self._const("kappa")

    @property
    def lipschitz(self):
        """Max gradient norm of K over the measurement grid."""
        return self._const("lipschitz")

    @property
    def integral(self):
        return self._const("integral")

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d})"


class GaussianKernel(Kernel):
    name = "gaussian"
    prof_id = 0

    def profile(self, s):
        return np.exp(-0.5 * s)

    def profile_grad_factor(self, s):
        return -0.5 * np.exp(-0.5 * s)

    @property
    def c_norm(self):
        return (2.0 * math.pi) ** (-self.d / 2)

    @property
    def support_radius(self):
        return math.inf

    @property
    def cutoff_radius(self):
        return 8.0


class EpanechnikovKernel(Kernel):
    name = "epanechnikov"
    prof_id = 1

    def profile(self, s):
        return np.maximum(1.0 - s, 0.0)

    def profile_grad_factor(self, s):
        return np.where(np.asarray(s) < 1.0, -1.0, 0.0)

    @property
    def c_norm(self):
        return (self.d + 2) / (2.0 * _unit_ball_volume(self.d))

    @property
    def support_radius(self):
        return 1.0

    @property
    def cutoff_radius(self):
        return 1.0


_KERNELS = {k.name: k for k in (GaussianKernel, EpanechnikovKernel)}
KERNEL_NAMES = tuple(sorted(_KERNELS))


def kernel_by_name(name, d=2):
    if isinstance(name, Kernel):
        return name
    try:
        return _KERNELS[name](d)
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; choose from {sorted(_KERNELS)}") from None
