import numpy as np
import pytest

from gridanimal import _kernels
from gridanimal.topology import link_table

from oracles import boundary_chi

pytestmark = pytest.mark.skipif("cython" not in _kernels.available(), reason="compiled kernels not built")

py = _kernels.load("python")
cy = _kernels.load("cython")


def random_grid(rng, shape=(9, 8, 7), density=0.45):
    g = (rng.random(shape) < density).astype(np.uint8)
    g[:2] = g[-2:] = 0
    g[:, :2] = g[:, -2:] = 0
    g[:, :, :2] = g[:, :, -2:] = 0
    return g


@pytest.mark.parametrize("seed", range(8))
def test_vertex_masks_agree(seed):
    g = random_grid(np.random.default_rng(seed))
    assert np.array_equal(py.vertex_masks(g), cy.vertex_masks(g))


@pytest.mark.parametrize("seed", range(8))
def test_boundary_counts_agree(seed):
    g = random_grid(np.random.default_rng(seed))
    v, e, f = cy.boundary_counts(g)
    assert (v, e, f) == tuple(py.boundary_counts(g))
    cubes = [tuple(int(x) for x in q) for q in np.argwhere(g)]
    assert v - e + f == boundary_chi(cubes)


@pytest.mark.parametrize("seed", range(8))
def test_toggle_scan_agrees(seed):
    rng = np.random.default_rng(seed)
    g = random_grid(rng)
    cands = np.argwhere(np.ones_like(g[2:-2, 2:-2, 2:-2])) + 2
    table = link_table()
    ok_p, d_p = py.toggle_scan(g, table, cands)
    ok_c, d_c = cy.toggle_scan(g, table, cands)
    assert np.array_equal(np.asarray(ok_p, bool), np.asarray(ok_c, bool))
    assert np.array_equal(np.asarray(d_p), np.asarray(d_c))
    # the chi change matches a recount after the flip
    v, e, f = py.boundary_counts(g)
    for idx in cands[rng.choice(len(cands), 20, replace=False)]:
        h = g.copy()
        h[tuple(idx)] ^= 1
        v2, e2, f2 = py.boundary_counts(h)
        k = int(np.flatnonzero((cands == idx).all(axis=1))[0])
        assert (v2 - e2 + f2) - (v - e + f) == int(d_p[k])


def test_selected_backend():
    assert _kernels.BACKEND in _kernels.available()
    with pytest.raises(ValueError):
        _kernels.load("fortran")
