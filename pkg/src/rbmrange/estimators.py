"""Estimator-style wrappers over the functional core.

These follow the scikit-learn conventions: constructor stores
hyperparameters untouched, fit() learns state into trailing-underscore
attributes and returns self, get_params/set_params/clone work as usual.
The functional API underneath stays the source of truth; these classes
exist for pipeline composition and grid searches.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_points
from .density import DensityEstimate, default_bandwidth
from .drift import (DEFAULT_MIN_COUNT, default_local_radius,
                    local_increment_drift, plugin_gradient_drift)
from .dynamics import Trajectory
from .exceptions import DensityBelowFloor
from .levelsets import fixed_content_threshold, plugin_level_set, \
    rconvex_level_estimator


def _require_fitted(obj, attr):
    if not hasattr(obj, attr):
        raise NotFittedError(
            f"{type(obj).__name__} is not fitted yet; call fit() first")


class StationaryDensityKDE(BaseEstimator):
    """Kernel density estimate of the stationary law of a confined
    diffusion, fit on trajectory positions.

    bandwidth=None picks the default rule for the chosen mode; mask
    restricts the estimate to a domain (zero outside).
    """

    def __init__(self, bandwidth=None, bandwidth_mode="rate_optimal",
                 c_h=1.0, kernel="gaussian", mask=None):
        self.bandwidth = bandwidth
        self.bandwidth_mode = bandwidth_mode
        self.c_h = c_h
        self.kernel = kernel
        self.mask = mask

    def fit(self, X, y=None):
        X = check_points(np.asarray(X, dtype=float), "X")
        if self.bandwidth is not None:
            h = float(self.bandwidth)
        else:
            h = default_bandwidth(len(X), X.shape[1], self.bandwidth_mode,
                                  self.c_h)
        self.bandwidth_ = h
        self.estimate_ = DensityEstimate(X, h, self.kernel, mask=self.mask)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        """Estimated density values at the query points."""
        _require_fitted(self, "estimate_")
        return self.estimate_.evaluate_points(np.asarray(X, dtype=float))

    def score_samples(self, X):
        """Log of the estimated density (-inf where it vanishes)."""
        vals = self.predict(X)
        with np.errstate(divide="ignore"):
            return np.log(vals)

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))


class _LevelSetBase(BaseEstimator):
    """Shared fit/predict plumbing for the two level-set estimators."""

    def _threshold(self, estimate, X):
        if (self.level is None) == (self.tau is None):
            raise ValueError("set exactly one of level and tau")
        if self.level is not None:
            return float(self.level)
        return fixed_content_threshold(estimate, X, self.tau)

    def _fit_density(self, X):
        X = check_points(np.asarray(X, dtype=float), "X")
        kde = StationaryDensityKDE(self.bandwidth, self.bandwidth_mode,
                                   kernel=self.kernel, mask=self.mask).fit(X)
        self.density_ = kde.estimate_
        self.bandwidth_ = kde.bandwidth_
        self.level_ = self._threshold(self.density_, X)
        self.n_features_in_ = X.shape[1]
        return X

    def predict(self, X):
        """Boolean membership of the query points in the fitted region."""
        _require_fitted(self, "region_")
        return self.region_.contains_points(np.asarray(X, dtype=float))

    def transform(self, X):
        return self.predict(X).reshape(-1, 1)


class PluginLevelSet(_LevelSetBase):
    """Super-level set of the KDE, extracted as grid contours.

    The threshold is either a fixed level or the fixed-content rule
    (tau); grid is an integer resolution or explicit (xs, ys) axes.
    """

    def __init__(self, level=None, tau=None, bandwidth=None,
                 bandwidth_mode="rate_optimal", kernel="gaussian",
                 mask=None, grid=256):
        self.level = level
        self.tau = tau
        self.bandwidth = bandwidth
        self.bandwidth_mode = bandwidth_mode
        self.kernel = kernel
        self.mask = mask
        self.grid = grid

    def fit(self, X, y=None):
        self._fit_density(X)
        self.region_ = plugin_level_set(self.density_, self.level_,
                                        self.grid)
        return self


class RConvexLevelSet(_LevelSetBase):
    """r-convex hull of the sample points whose KDE value exceeds the
    threshold; the shape parameter r sets the allowed concavity scale."""

    def __init__(self, r=0.4, level=None, tau=None, bandwidth=None,
                 bandwidth_mode="rate_optimal", kernel="gaussian",
                 mask=None):
        self.r = r
        self.level = level
        self.tau = tau
        self.bandwidth = bandwidth
        self.bandwidth_mode = bandwidth_mode
        self.kernel = kernel
        self.mask = mask

    def fit(self, X, y=None):
        X = self._fit_density(X)
        self.region_ = rconvex_level_estimator(self.density_, X,
                                               self.level_, self.r)
        return self


class IncrementDriftField(BaseEstimator):
    """Drift estimator from local trajectory increments.

    fit() takes a Trajectory (or an (n, d) position array plus delta=);
    predict() averages increments whose left endpoint lies within h_loc
    of each query point.  Points with fewer than min_count neighbors
    get nan rows.
    """

    def __init__(self, h_loc=None, min_count=DEFAULT_MIN_COUNT):
        self.h_loc = h_loc
        self.min_count = min_count

    def fit(self, X, y=None, delta=None):
        if isinstance(X, Trajectory):
            self.trajectory_ = X
        else:
            if delta is None:
                raise ValueError("array input needs delta=")
            X = check_points(np.asarray(X, dtype=float), "X")
            self.trajectory_ = Trajectory(X, delta)
        n, d = self.trajectory_.positions.shape
        self.h_loc_ = (self.h_loc if self.h_loc is not None
                       else default_local_radius(n, d))
        self.n_features_in_ = d
        return self

    def predict(self, X):
        _require_fitted(self, "trajectory_")
        X = check_points(np.asarray(X, dtype=float), "X")
        left = self.trajectory_.positions[:-1]
        _, valid = self.trajectory_.increments()
        out = np.full_like(X, np.nan)
        for i, x in enumerate(X):
            near = np.linalg.norm(left - x, axis=1) <= self.h_loc_
            if np.count_nonzero(near & valid) < self.min_count:
                continue
            out[i] = local_increment_drift(self.trajectory_, x, self.h_loc_)
        return out


class PluginDriftField(BaseEstimator):
    """Gradient-case plug-in drift: half the gradient of log KDE.

    Query points where the estimated density falls below floor (default:
    1e-3 of the fitted sample's peak value) get nan rows.
    """

    def __init__(self, bandwidth=None, bandwidth_mode="uniform_consistency",
                 kernel="gaussian", floor=None):
        self.bandwidth = bandwidth
        self.bandwidth_mode = bandwidth_mode
        self.kernel = kernel
        self.floor = floor

    def fit(self, X, y=None):
        if isinstance(X, Trajectory):
            X = X.positions
        kde = StationaryDensityKDE(self.bandwidth, self.bandwidth_mode,
                                   kernel=self.kernel).fit(X)
        self.density_ = kde.estimate_
        self.bandwidth_ = kde.bandwidth_
        self.floor_ = (self.floor if self.floor is not None else
                       1e-3 * float(self.density_.evaluate_at_samples().max()))
        self.n_features_in_ = kde.n_features_in_
        return self

    def predict(self, X):
        _require_fitted(self, "density_")
        X = check_points(np.asarray(X, dtype=float), "X")
        out = np.full_like(X, np.nan)
        for i, x in enumerate(X):
            try:
                out[i] = plugin_gradient_drift(self.density_, x, self.floor_)
            except DensityBelowFloor:
                pass
        return out
