import math

import numpy as np
import pytest

from rbmrange import (DriftFunction, Trajectory, drift_from_spec,
                      gaussian_step, linear_drift, simulate_rbmd, subsample,
                      zero_drift)
from rbmrange.domains import disk, ellipse
from rbmrange.dynamics import make_rng, spawn_rngs
from rbmrange.exceptions import NonFiniteDrift, StartOutsideDomain
from rbmrange.presets import reference_domain


# generator regression and step-noise law ----------------------------------

def test_first_draw_regression_locked():
    got = gaussian_step(1.0, make_rng(7))
    np.testing.assert_allclose(got, [0.25689756, 0.81572307], atol=5e-9)


def test_gaussian_step_mean_clt_bound():
    rng = make_rng(11)
    acc = np.zeros(2)
    n = 1_000_000
    for _ in range(n):
        acc += gaussian_step(1.0, rng)
    assert np.abs(acc / n).max() < 4e-3


def test_gaussian_step_variance():
    rng = make_rng(12)
    n = 1_000_000
    draws = np.empty((n, 2))
    for i in range(n):
        draws[i] = gaussian_step(0.25, rng)
    var = draws.var(axis=0)
    assert np.abs(var - 0.25).max() < 0.01 * 0.25


def test_gaussian_step_odd_dimension():
    v = gaussian_step(1.0, make_rng(3), d=3)
    assert v.shape == (3,)
    assert np.isfinite(v).all()


def test_spawned_streams_differ():
    a, b = spawn_rngs(0, 2)
    assert a.random() != b.random()


# simulate_rbmd -------------------------------------------------------------

def test_zero_steps_returns_start_only():
    traj = simulate_rbmd(disk((0, 0), 1.0), zero_drift(), (0.1, 0.2),
                         0.01, 0, seed=1)
    assert traj.n_steps == 0
    np.testing.assert_array_equal(traj.positions, [[0.1, 0.2]])


def test_every_position_stays_in_domain():
    dom = reference_domain()
    traj = simulate_rbmd(dom, linear_drift(), (0.0, 0.0), 0.003, 5000, seed=3)
    assert (dom.signed_values(traj.positions) <= dom.tol_b).all()


def test_same_seed_bitwise_identical():
    dom = disk((0, 0), 1.0)
    a = simulate_rbmd(dom, linear_drift(), (0.0, 0.0), 0.01, 2000, seed=9)
    b = simulate_rbmd(dom, linear_drift(), (0.0, 0.0), 0.01, 2000, seed=9)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert a.meta["case1"] == b.meta["case1"]
    assert a.positions.tobytes() == b.positions.tobytes()


def test_different_seeds_differ():
    dom = disk((0, 0), 1.0)
    a = simulate_rbmd(dom, zero_drift(), (0.0, 0.0), 0.01, 100, seed=1)
    b = simulate_rbmd(dom, zero_drift(), (0.0, 0.0), 0.01, 100, seed=2)
    assert not np.array_equal(a.positions, b.positions)


def test_case_counts_partition_steps():
    dom = reference_domain()
    traj = simulate_rbmd(dom, linear_drift(), (0.0, 0.0), 0.003, 20000, seed=5)
    m = traj.meta
    assert m["case1"] + m["case2"] + m["case3"] == 20000
    assert m["case2"] > 0          # reflections do happen at this delta
    assert m["case1"] > m["case2"]


def test_scalar_and_vector_drift_paths_agree():
    # the generic path consumes noise in the same order as the fast path
    dom = disk((0, 0), 1.0)
    fast = simulate_rbmd(dom, linear_drift(), (0.2, -0.1), 0.02, 800, seed=21)
    slow_drift = DriftFunction(lambda x: -x, lipschitz=1.0)
    slow = simulate_rbmd(dom, slow_drift, (0.2, -0.1), 0.02, 800, seed=21)
    np.testing.assert_array_equal(fast.positions, slow.positions)


def test_start_outside_raises():
    with pytest.raises(StartOutsideDomain):
        simulate_rbmd(disk((0, 0), 1.0), zero_drift(), (2.0, 0.0),
                      0.01, 10, seed=0)


def test_non_finite_drift_raises():
    bad = DriftFunction(lambda x: x * np.nan, lipschitz=0.0,
                        scalar_func=lambda x, y: (math.nan, 0.0))
    with pytest.raises(NonFiniteDrift):
        simulate_rbmd(disk((0, 0), 1.0), bad, (0.0, 0.0), 0.01, 5, seed=0)


def test_callable_drift_is_wrapped():
    traj = simulate_rbmd(disk((0, 0), 1.0), lambda x: -x, (0.0, 0.0),
                         0.01, 50, seed=4)
    assert traj.n_steps == 50


def test_reflection_preserves_step_length_distribution():
    # mirrored steps must not shrink: |X_{k+1} - Y| == |Y - xi| style check
    # is internal; externally, increments stay bounded by |Z| + delta at
    # this Lipschitz constant, i.e. no blow-up at the boundary
    dom = ellipse((0, 0), (1.5, 1.0))
    traj = simulate_rbmd(dom, linear_drift(), (1.45, 0.0), 0.01, 3000, seed=8)
    inc = np.linalg.norm(np.diff(traj.positions, axis=0), axis=1)
    assert inc.max() < 6 * math.sqrt(2 * 0.01)


# Trajectory plumbing --------------------------------------------------------

def test_prefix_matches_shorter_run():
    dom = reference_domain()
    long = simulate_rbmd(dom, linear_drift(), (0.0, 0.0), 0.003, 400, seed=6)
    short = simulate_rbmd(dom, linear_drift(), (0.0, 0.0), 0.003, 150, seed=6)
    np.testing.assert_array_equal(long.positions[:151], short.positions)
    pre = long.prefix(150)
    np.testing.assert_array_equal(pre.positions, short.positions)
    assert pre.n_steps == 150
    assert pre.meta["prefix_of"] == 400


def test_prefix_too_long_raises():
    traj = simulate_rbmd(disk((0, 0), 1.0), zero_drift(), (0, 0), 0.01, 10,
                         seed=0)
    with pytest.raises(ValueError):
        traj.prefix(11)


def test_subsample_thins_and_scales_delta():
    pos = np.column_stack([np.arange(10.0), np.zeros(10)])
    traj = Trajectory(pos, 0.5)
    out = subsample(traj, 3)
    np.testing.assert_array_equal(out.positions[:, 0], [0, 3, 6, 9])
    assert out.delta == 1.5
    assert subsample(traj, 1).positions.shape == pos.shape


def test_subsample_remaps_breaks():
    pos = np.zeros((10, 2))
    traj = Trajectory(pos, 1.0, provenance="ingested", breaks={4})
    out = subsample(traj, 3)
    # old increment (4,5) falls inside coarse increment (1,2)
    assert out.breaks == frozenset({1})


def test_increment_mask_blocks_breaks():
    pos = np.column_stack([np.arange(5.0), np.zeros(5)])
    traj = Trajectory(pos, 1.0, provenance="ingested", breaks={2})
    inc, valid = traj.increments()
    assert inc.shape == (4, 2)
    np.testing.assert_array_equal(valid, [True, True, False, True])


# drift specs ----------------------------------------------------------------

def test_drift_spec_roundtrip():
    mu = linear_drift((0.5, -0.25), 2.0)
    back = drift_from_spec(mu.spec)
    x = np.array([0.3, 0.4])
    np.testing.assert_allclose(back(x), mu(x))
    assert drift_from_spec(None).spec == {"name": "none"}
    assert drift_from_spec({"name": "none"})(x).tolist() == [0.0, 0.0]
    with pytest.raises(ValueError):
        drift_from_spec({"name": "spiral"})


def test_gradient_case_flags():
    assert zero_drift().is_gradient_case
    assert linear_drift().is_gradient_case
    assert not DriftFunction(lambda x: -x, 1.0).is_gradient_case


def test_linear_drift_values():
    mu = linear_drift((1.0, 0.0), 0.5)
    np.testing.assert_allclose(mu(np.array([2.0, 2.0])), [-0.5, -1.0])
    assert mu.scalar_func(2.0, 2.0) == (-0.5, -1.0)
    assert mu.lipschitz == 0.5
