import numpy as np
import pytest

from entrofilt.basis import make_basis
from entrofilt.mesh import build_mesh


def test_1d_periodic_wraparound():
    m = build_mesh((0.0, 1.0), 4, periodic_x=True)
    assert m.neighbors[0, 0] == 3  # west neighbor of element 0
    assert m.neighbors[0, 1] == 1
    assert m.neighbors[3, 1] == 0


def test_2d_walled_corner_adjacency():
    m = build_mesh((0.0, 1.0), 3, (0.0, 1.0), 3)
    corner = 0
    assert np.count_nonzero(m.neighbors[corner] < 0) == 2
    assert m.adjacency_with_self(corner) == {0, 1, 3}
    center = 4
    assert m.adjacency_with_self(center) == {1, 3, 4, 5, 7}


def test_element_size_and_jacobian():
    m = build_mesh((-5.0, 5.0), 100)
    assert m.hx == pytest.approx(0.1)
    assert m.jacobian == pytest.approx(0.05)
    m2 = build_mesh((0.0, 2.0), 4, (0.0, 1.0), 2)
    assert (m2.hx, m2.hy) == (pytest.approx(0.5), pytest.approx(0.5))
    assert m2.jacobian == pytest.approx(0.0625)


def test_neighbor_involution():
    m = build_mesh((0.0, 1.0), 5, (0.0, 1.0), 4, periodic_x=True)
    opposite = {0: 1, 1: 0, 2: 3, 3: 2}
    for k in range(m.n_elements):
        for f, nb in enumerate(m.neighbors[k]):
            if nb >= 0:
                assert m.neighbors[nb, opposite[f]] == k


def test_fully_periodic_neighbor_count():
    m = build_mesh((0.0, 1.0), 4, (0.0, 1.0), 4, periodic_x=True, periodic_y=True)
    assert np.all(m.neighbors >= 0)
    for k in range(m.n_elements):
        assert len(m.adjacency_with_self(k)) == 5


def test_volumes_sum_to_domain():
    m = build_mesh((-1.0, 3.0), 7, (0.5, 2.5), 5)
    vol = m.n_elements * m.hx * m.hy
    assert vol == pytest.approx(4.0 * 2.0, rel=1e-12)
    b = make_basis(3, 2)
    quad_vol = m.n_elements * m.jacobian * b.quad_weights.sum()
    assert quad_vol == pytest.approx(8.0, rel=1e-12)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        build_mesh((0.0, 1.0), 0)
    with pytest.raises(ValueError):
        build_mesh((1.0, 1.0), 4)
    with pytest.raises(ValueError):
        build_mesh((0.0, 1.0), 4, (2.0, 1.0), 4)


def test_node_coords_cover_elements():
    m = build_mesh((0.0, 1.0), 4, (0.0, 2.0), 2)
    b = make_basis(2, 2)
    c = m.node_coords(b)
    assert c.shape == (8, 9, 2)
    np.testing.assert_allclose(c[0, 0], [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(c[-1, -1], [1.0, 2.0], atol=1e-15)
