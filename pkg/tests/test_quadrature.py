import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udwghost.errors import ConfigError
from udwghost.quadrature import (
    QuadratureSpec,
    angular_rule,
    build_grid,
    partition_weights,
    radial_rule,
    resolve_centers,
)

PUMP = (0.0, 0.0, -2 * math.pi)


def integrate(grid, f):
    return sum(w @ f(p) for p, w in grid.chunks())


def test_radial_rule_moments():
    r, w = radial_rule(3.0, 20)
    # weights already carry r^2
    assert w.sum() == pytest.approx(9.0, rel=1e-13)
    assert w @ r**2 == pytest.approx(3.0**5 / 5, rel=1e-13)


def test_angular_rule_sphere():
    dirs, w = angular_rule(12, 24)
    assert w.sum() == pytest.approx(4 * math.pi, rel=1e-14)
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    assert w @ dirs[:, 2] ** 2 == pytest.approx(4 * math.pi / 3, rel=1e-13)
    assert abs(w @ dirs[:, 0]) < 1e-13


@settings(max_examples=40)
@given(st.lists(st.floats(-20, 20), min_size=3, max_size=3))
def test_partition_of_unity(p):
    centers = np.array([[0.0, 0.0, 0.0], PUMP, [1.0, 2.0, 3.0]])
    pts = np.array([p])
    total = sum(partition_weights(pts, centers, i, 3)[0] for i in range(3))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_partition_at_centres():
    centers = np.array([[0.0, 0.0, 0.0], PUMP])
    w0 = partition_weights(centers, centers, 0, 3)
    assert w0[0] == 1.0 and w0[1] == 0.0


def test_gaussians_at_both_centres():
    grid = build_grid(QuadratureSpec(), PUMP, 0.1)
    pump = np.asarray(PUMP)

    def f(p):
        a = np.einsum("ni,ni->n", p, p)
        b = np.einsum("ni,ni->n", p - pump, p - pump)
        return np.exp(-0.01 * a) + 2 * np.exp(-0.01 * b)

    exact = 3 * (math.pi / 0.01) ** 1.5
    assert integrate(grid, f) == pytest.approx(exact, rel=1e-11)


def test_massless_singularity_integrable():
    # int exp(-s^2 |p|^2) / |p| d^3p = 2 pi / s^2
    grid = build_grid(QuadratureSpec(), PUMP, 0.1)

    def f(p):
        r = np.sqrt(np.einsum("ni,ni->n", p, p))
        return np.exp(-0.01 * r * r) / r

    assert integrate(grid, f) == pytest.approx(2 * math.pi / 0.01, rel=1e-11)


def test_spec_validation():
    with pytest.raises(ConfigError):
        QuadratureSpec(radial_nodes=3)
    with pytest.raises(ConfigError):
        QuadratureSpec(cutoff_sigmas=4.0)
    with pytest.raises(ConfigError):
        QuadratureSpec(scheme="cartesian")
    with pytest.raises(ConfigError):
        build_grid(QuadratureSpec(radial_cutoff=10.0), PUMP, 0.1)
    with pytest.raises(ConfigError):
        resolve_centers(QuadratureSpec(centers=((0.0, 0.0, 0.0),)), PUMP)
    with pytest.raises(ConfigError):
        build_grid(QuadratureSpec(), (0.0, 1.0), 0.1)


def test_refined_and_companion():
    q = QuadratureSpec()
    r = q.refined()
    assert (r.radial_nodes, r.angular_nodes, r.n_azimuthal) == (384, 160, 320)
    c = q.companion()
    assert (c.radial_nodes, c.angular_nodes, c.n_azimuthal) == (144, 60, 120)
    assert not c.error_estimate


def test_chunks_cover_grid():
    grid = build_grid(QuadratureSpec(radial_nodes=10, angular_nodes=6), PUMP, 0.1)
    assert sum(len(w) for _, w in grid.chunks(size=100)) == grid.size
