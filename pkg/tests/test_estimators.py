"""Estimator wrappers: scikit-learn API conventions over the core."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rbmrange.density import DensityEstimate
from rbmrange.domains import Disk
from rbmrange.dynamics import linear_drift, simulate_rbmd
from rbmrange.estimators import (IncrementDriftField, PluginDriftField,
                                 PluginLevelSet, RConvexLevelSet,
                                 StationaryDensityKDE)

RNG = np.random.default_rng(99)
CLOUD = RNG.normal(size=(500, 2)) * 0.5


def test_get_set_params_and_clone():
    est = StationaryDensityKDE(bandwidth=0.2, kernel="epanechnikov")
    params = est.get_params()
    assert params["bandwidth"] == 0.2
    assert params["kernel"] == "epanechnikov"
    est.set_params(bandwidth=0.3)
    assert est.bandwidth == 0.3
    dup = clone(est)
    assert dup.get_params() == est.get_params()

    lvl = RConvexLevelSet(r=0.5, tau=0.3)
    assert clone(lvl).get_params()["r"] == 0.5


def test_fit_returns_self_and_sets_state():
    est = StationaryDensityKDE(bandwidth=0.25)
    assert est.fit(CLOUD) is est
    assert est.bandwidth_ == 0.25
    assert est.n_features_in_ == 2


def test_not_fitted_errors():
    with pytest.raises(NotFittedError):
        StationaryDensityKDE().predict(CLOUD)
    with pytest.raises(NotFittedError):
        PluginLevelSet(level=0.1).predict(CLOUD)
    with pytest.raises(NotFittedError):
        IncrementDriftField().predict(CLOUD[:3])


def test_kde_predict_matches_functional_core():
    est = StationaryDensityKDE(bandwidth=0.25).fit(CLOUD)
    direct = DensityEstimate(CLOUD, 0.25, "gaussian")
    q = np.array([[0.0, 0.0], [0.5, -0.2], [3.0, 3.0]])
    np.testing.assert_array_equal(est.predict(q), direct.evaluate_points(q))


def test_kde_default_bandwidth_rule():
    est = StationaryDensityKDE().fit(CLOUD)
    assert est.bandwidth_ == pytest.approx(len(CLOUD) ** -0.25)
    est = StationaryDensityKDE(bandwidth_mode="uniform_consistency")
    assert est.fit(CLOUD).bandwidth_ == pytest.approx(len(CLOUD) ** (-1 / 3))


def test_kde_score_samples_handles_zeros():
    mask = Disk((0, 0), 1.0)
    est = StationaryDensityKDE(bandwidth=0.25, mask=mask).fit(CLOUD)
    scores = est.score_samples([[0.0, 0.0], [5.0, 5.0]])
    assert np.isfinite(scores[0])
    assert scores[1] == -np.inf


def test_plugin_level_set_estimator():
    est = PluginLevelSet(level=0.1, bandwidth=0.25, grid=80).fit(CLOUD)
    assert est.level_ == 0.1
    inside = est.predict([[0.0, 0.0]])
    outside = est.predict([[4.0, 4.0]])
    assert inside.dtype == bool
    assert inside[0] and not outside[0]
    assert est.transform(CLOUD).shape == (len(CLOUD), 1)


def test_level_xor_tau():
    with pytest.raises(ValueError, match="exactly one"):
        PluginLevelSet(level=0.1, tau=0.5, bandwidth=0.25).fit(CLOUD)
    with pytest.raises(ValueError, match="exactly one"):
        PluginLevelSet(bandwidth=0.25).fit(CLOUD)


def test_tau_threshold_path():
    est = PluginLevelSet(tau=0.5, bandwidth=0.25, grid=80).fit(CLOUD)
    vals = DensityEstimate(CLOUD, 0.25, "gaussian").evaluate_at_samples()
    # half the sample sits at or above the fitted threshold
    frac = float((vals >= est.level_).mean())
    assert abs(frac - 0.5) <= 0.01


def test_rconvex_level_set_estimator():
    est = RConvexLevelSet(r=0.6, level=0.1, bandwidth=0.25).fit(CLOUD)
    assert est.region_.area > 0.1
    assert est.predict([[0.0, 0.0]])[0]


def test_increment_drift_field():
    traj = simulate_rbmd(Disk((0, 0), 1.0), linear_drift(), (0.0, 0.0),
                         0.01, 20000, seed=4)
    est = IncrementDriftField(h_loc=0.3).fit(traj)
    out = est.predict([[0.4, 0.0], [50.0, 50.0]])
    # drift points inward at (0.4, 0); the far node has no neighbors
    assert out[0, 0] < 0
    assert np.isnan(out[1]).all()


def test_increment_drift_array_input():
    with pytest.raises(ValueError, match="delta"):
        IncrementDriftField().fit(CLOUD)
    est = IncrementDriftField(h_loc=0.5).fit(CLOUD, delta=0.1)
    assert est.trajectory_.delta == 0.1
    assert est.h_loc_ == 0.5


def test_increment_drift_default_radius():
    est = IncrementDriftField().fit(CLOUD, delta=0.1)
    assert est.h_loc_ == pytest.approx(3.0 * len(CLOUD) ** (-1 / 3))


def test_plugin_drift_field():
    big = np.random.default_rng(1).normal(size=(50000, 2)) * 0.7
    est = PluginDriftField(bandwidth=0.15).fit(big)
    out = est.predict([[0.5, 0.0], [40.0, 0.0]])
    want = -0.5 / (2 * 0.7 ** 2)
    assert out[0, 0] == pytest.approx(want, abs=0.12)
    assert np.isnan(out[1]).all()
    assert est.floor_ > 0
