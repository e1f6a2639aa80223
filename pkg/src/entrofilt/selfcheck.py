"""Fast in-package property probes backing the `selftest` CLI command."""

from __future__ import annotations

import numpy as np

from . import euler, filtering
from .basis import make_basis
from .cases import SOD_QL, SOD_QR
from .exact_riemann import exact_riemann, riemann_star
from .euler import GasModel
from .mesh import build_mesh
from .solver import EulerSolver


def _random_admissible(rng, n, dim):
    q = np.empty((dim + 2, n))
    q[0] = rng.uniform(0.1, 5.0, n)
    q[1 : 1 + dim] = rng.uniform(-3.0, 3.0, (dim, n))
    q[-1] = rng.uniform(0.1, 5.0, n)
    return q


def check_gll_weights():
    for p in range(1, 8):
        for dim in (1, 2):
            b = make_basis(p, dim)
            assert abs(b.quad_weights.sum() - 2.0**dim) < 1e-12


def check_modal_roundtrip():
    rng = np.random.default_rng(0)
    for dim in (1, 2):
        b = make_basis(4, dim)
        f = rng.standard_normal(b.n_nodes)
        assert np.max(np.abs(b.modal_inv @ (b.modal_fwd @ f) - f)) < 1e-12


def check_correction_endpoints():
    for p in range(1, 7):
        b = make_basis(p, 1)
        # integral of g' recovers the endpoint difference g(1) - g(-1)
        assert abs(b.weights_1d @ b.dgl - (-1.0)) < 1e-12
        assert abs(b.weights_1d @ b.dgr - 1.0) < 1e-12
        assert np.max(np.abs(b.dgr + b.dgl[::-1])) < 1e-12


def check_divergence_exactness():
    b = make_basis(3, 1)
    coeff = np.array([0.3, -1.2, 0.8, 0.05])
    f = np.polyval(coeff, b.nodes_1d)
    df = np.polyval(np.polyder(coeff), b.nodes_1d)
    assert np.max(np.abs(b.diff_matrix @ f - df)) < 1e-10


def check_riemann_properties():
    rng = np.random.default_rng(1)
    gas = GasModel()
    qa = _random_admissible(rng, 64, 1)
    qb = _random_admissible(rng, 64, 1)
    ua, ub = euler.prim_to_cons(qa, gas), euler.prim_to_cons(qb, gas)
    for fn in (euler.rusanov_flux, euler.hllc_flux):
        f1 = fn(ua, ub, (1.0,), gas)
        f2 = fn(ub, ua, (-1.0,), gas)
        assert np.max(np.abs(f1 + f2)) < 1e-11 * max(1.0, np.max(np.abs(f1)))
        fc = fn(ua, ua, (1.0,), gas)
        fe = euler.euler_flux(ua, gas)[0]
        assert np.max(np.abs(fc - fe)) < 1e-11 * max(1.0, np.max(np.abs(fe)))


def check_sod_star_pressure():
    ps, _ = riemann_star(np.array(SOD_QL), np.array(SOD_QR), GasModel())
    assert abs(float(ps) - 0.30313) < 1e-4


def check_filter_invariants():
    rng = np.random.default_rng(2)
    gas = GasModel()
    b = make_basis(3, 1)
    mean = euler.prim_to_cons(np.array([1.0, 0.0, 1.0]), gas)
    u = np.repeat(mean[:, None], b.n_nodes, axis=1)
    u[0] += 1.4 * b.nodes_1d  # nodal density dips negative; mean kept
    filtered, out = filtering.filter_element(u, b, -10.0, gas)
    assert out.activated and out.zeta > 0.0
    w = b.quad_weights / 2.0
    assert np.max(np.abs(filtered @ w - u @ w)) < 1e-12
    assert np.min(filtered[0]) >= gas.rho_min
    again, out2 = filtering.filter_element(filtered, b, -10.0, gas)
    assert not out2.activated


def check_free_stream():
    gas = GasModel()
    b = make_basis(3, 1)
    m = build_mesh((0.0, 1.0), 8, periodic_x=True)
    s = EulerSolver(b, m, gas)
    fld = s.init_field(lambda x: np.stack([np.ones_like(x), np.zeros_like(x), np.ones_like(x)]))
    u0 = fld.u.copy()
    for _ in range(5):
        s.step(fld, s.stable_dt(fld.u, 0.5))
    assert np.max(np.abs(fld.u - u0)) < 1e-12


CHECKS = [
    check_gll_weights,
    check_modal_roundtrip,
    check_correction_endpoints,
    check_divergence_exactness,
    check_riemann_properties,
    check_sod_star_pressure,
    check_filter_invariants,
    check_free_stream,
]


def run_selftest(out=print) -> bool:
    ok = True
    for fn in CHECKS:
        name = fn.__name__.removeprefix("check_")
        try:
            fn()
            out(f"PASS {name}")
        except AssertionError as err:
            ok = False
            out(f"FAIL {name}: {err}")
    return ok
