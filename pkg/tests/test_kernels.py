import math

import numpy as np
import pytest

from rbmrange.kernels import (KERNEL_NAMES, EpanechnikovKernel,
                              GaussianKernel, kernel_by_name)

from _oracles import epanechnikov_profile, fd_gradient, gaussian_profile


def test_registry():
    assert KERNEL_NAMES == ("epanechnikov", "gaussian")
    assert isinstance(kernel_by_name("gaussian"), GaussianKernel)
    k = GaussianKernel()
    assert kernel_by_name(k) is k
    with pytest.raises(ValueError):
        kernel_by_name("triweight")


def test_gaussian_closed_form_constants():
    k = GaussianKernel(d=2)
    # sup at the origin: (2 pi)^{-1}
    assert k.k1 == pytest.approx(1.0 / (2 * math.pi), rel=1e-12)
    assert k(np.zeros(2)) == pytest.approx(k.k1, rel=1e-12)
    # first absolute moment: integral r^2 e^{-r^2/2} dr / ... = sqrt(pi/2)
    assert k.kappa == pytest.approx(math.sqrt(math.pi / 2), rel=1e-3)
    assert k.integral == pytest.approx(1.0, rel=1e-6)
    # max |grad| at r=1: (2 pi)^{-1} e^{-1/2}
    assert k.lipschitz == pytest.approx(math.exp(-0.5) / (2 * math.pi),
                                        rel=1e-3)


def test_epanechnikov_closed_form_constants():
    k = EpanechnikovKernel(d=2)
    assert k.c_norm == pytest.approx(2.0 / math.pi, rel=1e-12)
    assert k.k1 == pytest.approx(2.0 / math.pi, rel=1e-9)
    assert k.integral == pytest.approx(1.0, rel=1e-3)
    # int |u| K du = c int_0^1 r (1-r^2) 2 pi r dr = 2 pi c (1/3 - 1/5)
    want = 2 * math.pi * (2 / math.pi) * (1 / 3 - 1 / 5)
    assert k.kappa == pytest.approx(want, rel=1e-3)
    assert k(np.array([1.0, 0.0])) == 0.0
    assert k(np.array([2.0, 0.0])) == 0.0


def test_values_match_profile_oracles():
    pts = np.random.default_rng(1).normal(size=(50, 2))
    s = (pts ** 2).sum(axis=1)
    g = GaussianKernel()
    np.testing.assert_allclose(g(pts), g.c_norm * gaussian_profile(s),
                               rtol=1e-12)
    e = EpanechnikovKernel()
    np.testing.assert_allclose(e(pts), e.c_norm * epanechnikov_profile(s),
                               rtol=1e-12)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(2)
    for k in (GaussianKernel(), EpanechnikovKernel()):
        pts = rng.uniform(-0.9, 0.9, size=(40, 2))
        got = k.gradient(pts)
        want = np.array([fd_gradient(k, p) for p in pts])
        np.testing.assert_allclose(got, want, atol=1e-6)


def test_scalar_and_batch_paths_agree():
    for k in (GaussianKernel(), EpanechnikovKernel()):
        pts = np.random.default_rng(3).normal(size=(20, 2)) * 0.5
        batch = k(pts)
        single = np.array([k(p) for p in pts])
        np.testing.assert_array_equal(batch, single)


def test_one_dimensional_kernels():
    g = GaussianKernel(d=1)
    assert g.integral == pytest.approx(1.0, rel=1e-6)
    e = EpanechnikovKernel(d=1)
    assert e.c_norm == pytest.approx(0.75, rel=1e-12)
