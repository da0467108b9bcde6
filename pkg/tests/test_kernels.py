"""Compiled and numpy kernels must agree."""

import numpy as np
import pytest

from atomchip import _kernels_py, kernels


def _random_nodes(rng, n):
    return np.ascontiguousarray(rng.uniform(-1, 1, n)), np.ascontiguousarray(rng.uniform(0.1, 1, n))


def test_backend_is_known():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")
def test_geometry_tensor_backends_agree():
    rng = np.random.default_rng(1)
    xs, wx = _random_nodes(rng, 17)
    ys, wy = _random_nodes(rng, 5)
    zs, wz = _random_nodes(rng, 4)
    p1 = np.array([0.1, 0.2, 3.0])
    p2 = np.array([-0.3, 0.1, 2.5])
    a = kernels.geometry_tensor(p1, p2, xs, wx, ys, wy, zs, wz)
    b = _kernels_py.geometry_tensor(p1, p2, xs, wx, ys, wy, zs, wz)
    np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")
def test_transverse_field_backends_agree():
    rng = np.random.default_rng(2)
    xobs = np.linspace(-1, 1, 7)
    xs, wx = _random_nodes(rng, 30)
    ys = np.ascontiguousarray(rng.uniform(-0.1, 0.1, (30, 4)))
    wy = np.ascontiguousarray(rng.uniform(0, 0.05, (30, 4)))
    zs, wz = _random_nodes(rng, 3)
    jy = np.ascontiguousarray(rng.normal(size=(30, 4)))
    a = kernels.transverse_field(xobs, 2.0, xs, wx, ys, wy, zs * 0.1, wz, jy)
    b = _kernels_py.transverse_field(xobs, 2.0, xs, wx, ys, wy, zs * 0.1, wz, jy)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_geometry_tensor_symmetric_in_points():
    rng = np.random.default_rng(3)
    xs, wx = _random_nodes(rng, 9)
    ys, wy = _random_nodes(rng, 3)
    zs, wz = _random_nodes(rng, 3)
    p1 = np.array([0.0, 0.0, 2.0])
    p2 = np.array([0.5, 0.2, 2.2])
    a = kernels.geometry_tensor(p1, p2, xs, wx, ys, wy, zs, wz)
    b = kernels.geometry_tensor(p2, p1, xs, wx, ys, wy, zs, wz)
    np.testing.assert_allclose(a, b.T, rtol=1e-13)
