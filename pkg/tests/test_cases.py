import numpy as np
import pytest

from entrofilt.basis import make_basis
from entrofilt.cases import (
    CASES,
    dmr_case,
    get_case,
    jet_case,
    kh_case,
    shu_osher_case,
    sod_case,
    vortex_case,
    vortex_exact,
)
from entrofilt.euler import GasModel, prim_to_cons
from entrofilt.mesh import build_mesh

GAS = GasModel()


class TestSod:
    def test_left_right_states(self):
        case = sod_case()
        np.testing.assert_allclose(case.ic(np.array([0.25])).ravel(), [1.0, 0.0, 1.0])
        np.testing.assert_allclose(case.ic(np.array([0.75])).ravel(), [0.125, 0.0, 0.1])

    def test_jump_point_takes_left_state(self):
        case = sod_case()
        np.testing.assert_allclose(case.ic(np.array([0.5])).ravel(), [1.0, 0.0, 1.0])

    def test_metadata(self):
        case = sod_case()
        assert case.xlim == (0.0, 1.0) and case.t_end == 0.2
        assert case.oracle == "exact-riemann"


class TestShuOsher:
    def test_left_state(self):
        case = shu_osher_case()
        np.testing.assert_allclose(
            case.ic(np.array([-4.5])).ravel(), [3.857143, 2.629369, 10.333333]
        )

    def test_origin_state(self):
        case = shu_osher_case()
        np.testing.assert_allclose(case.ic(np.array([0.0])).ravel(), [1.0, 0.0, 1.0])

    def test_sine_density(self):
        case = shu_osher_case()
        q = case.ic(np.array([np.pi / 10.0]))
        assert q[0, 0] == pytest.approx(1.2, rel=1e-12)

    def test_reference_cells(self):
        assert shu_osher_case().reference_cells == 20000


class TestVortex:
    def test_center_velocity(self):
        q = vortex_exact(np.array([0.0]), np.array([0.0]), 0.0)
        assert q[1][0] == pytest.approx(0.0, abs=1e-14)
        assert q[2][0] == pytest.approx(1.0, rel=1e-14)

    def test_far_field_free_stream(self):
        q = vortex_exact(np.array([-9.9]), np.array([-9.9]), 0.0)
        # phi ~ e^{(1-2*9.9^2)/4.5} ~ 0: unit density, unit vertical speed
        assert q[0][0] == pytest.approx(1.0, rel=1e-8)
        assert q[1][0] == pytest.approx(0.0, abs=1e-8)
        assert q[2][0] == pytest.approx(1.0, rel=1e-8)
        assert q[3][0] == pytest.approx(1.0 / (1.4 * 0.16), rel=1e-8)

    def test_periodic_pass_through(self):
        xs = np.linspace(-10, 10, 23)
        ys = np.linspace(-10, 10, 23)
        np.testing.assert_allclose(
            vortex_exact(xs, ys, 20.0), vortex_exact(xs, ys, 0.0), rtol=1e-12, atol=1e-12
        )

    def test_swirl_balances_pressure_gradient(self):
        # radial momentum balance dP/dr = rho * v_theta^2 / r
        r = np.linspace(0.3, 4.0, 200)
        q = vortex_exact(r, np.zeros_like(r), 0.0)
        vtheta = q[2] - 1.0 * 0.0 - (q[2] - q[2])  # v_y at y=0 minus advection
        vtheta = -(q[2] - 1.0)  # swirl component at (r, 0): vy = Vy - s*phi*r
        dpdr = np.gradient(q[3], r)
        np.testing.assert_allclose(dpdr[5:-5], (q[0] * vtheta**2 / r)[5:-5], rtol=2e-3)

    def test_case_is_smooth_and_periodic(self):
        case = vortex_case()
        assert case.periodic == (True, True)
        assert not case.discontinuous
        assert case.t_end == 20.0


class TestDmr:
    def test_post_shock_state_at_origin(self):
        case = dmr_case()
        q = case.ic(np.array([0.0]), np.array([0.0]))
        np.testing.assert_allclose(q.ravel(), [8.0, 7.14471, -4.125, 116.5])

    def test_pre_shock_state(self):
        case = dmr_case()
        q = case.ic(np.array([3.0]), np.array([0.0]))
        np.testing.assert_allclose(q.ravel(), [1.4, 0.0, 0.0, 1.0])

    def test_initial_front_slope(self):
        case = dmr_case()
        y = 0.5
        x_front = 1.0 / 6.0 + np.tan(np.radians(30.0)) * y
        ql = case.ic(np.array([x_front - 1e-9]), np.array([y]))
        qr = case.ic(np.array([x_front + 1e-9]), np.array([y]))
        assert ql[0, 0] == 8.0 and qr[0, 0] == 1.4

    def test_top_boundary_locus_arithmetic(self):
        case = dmr_case()
        bc = case.bcs["ymax"]
        t = 0.2
        x_front = 1.0 / 6.0 + np.tan(np.radians(30.0)) + (10.0 / np.cos(np.radians(30.0))) * t
        from entrofilt.solver import apply_boundary_conditions

        u_int = np.repeat(prim_to_cons(np.array([1.4, 0.0, 0.0, 1.0]), GAS)[:, None], 2, axis=1)
        coords = np.array([[x_front - 0.01, 1.0], [x_front + 0.01, 1.0]])
        ghost = apply_boundary_conditions(u_int, coords, t, 1, bc, GAS)
        np.testing.assert_allclose(ghost[:, 0], prim_to_cons(np.array([8.0, 7.14471, -4.125, 116.5]), GAS), rtol=1e-12)
        np.testing.assert_allclose(ghost[:, 1], prim_to_cons(np.array([1.4, 0.0, 0.0, 1.0]), GAS), rtol=1e-12)


class TestKh:
    def test_inner_outer_states(self):
        case = kh_case()
        np.testing.assert_allclose(case.ic(np.array([0.0]), np.array([0.0])).ravel(), [2.0, 0.5, 0.0, 2.5])
        np.testing.assert_allclose(case.ic(np.array([0.0]), np.array([0.4])).ravel(), [1.0, -0.5, 0.0, 2.5])

    def test_uniform_pressure(self):
        case = kh_case()
        ys = np.linspace(-0.5, 0.5, 41)
        q = case.ic(np.zeros_like(ys), ys)
        np.testing.assert_allclose(q[3], 2.5)

    def test_fully_periodic(self):
        assert kh_case().periodic == (True, True)


class TestJet:
    def test_ambient_state(self):
        case = jet_case()
        q = case.ic(np.array([0.3]), np.array([1.0]))
        np.testing.assert_allclose(q.ravel(), [0.14, 0.0, 0.0, 1.0], rtol=1e-12)

    def test_inflow_mach_800(self):
        inflow = np.array([1.4, 0.0, 800.0, 1.0])
        c = np.sqrt(GAS.gamma * inflow[3] / inflow[0])
        assert 800.0 / c == pytest.approx(800.0, rel=1e-12)

    def test_inlet_region_boundary_map(self):
        case = jet_case()
        bc = case.bcs["ymin"]
        assert bc.kind == "piecewise-x"
        assert bc.x_split == pytest.approx(0.05)
        assert bc.left.kind == "fixed" and bc.right.kind == "transmissive"
        from entrofilt.solver import apply_boundary_conditions

        u_int = np.repeat(prim_to_cons(np.array([0.14, 0.0, 0.0, 1.0]), GAS)[:, None], 2, axis=1)
        coords = np.array([[0.2, 0.0], [0.04, 0.0]])
        ghost = apply_boundary_conditions(u_int, coords, 0.0, 1, bc, GAS)
        np.testing.assert_array_equal(ghost[:, 0], u_int[:, 0])  # transmissive at x=0.2
        np.testing.assert_allclose(ghost[:, 1], prim_to_cons(np.array([1.4, 0.0, 800.0, 1.0]), GAS), rtol=1e-12)


@pytest.mark.parametrize("name", sorted(CASES))
def test_initial_conditions_admissible_on_meshes(name):
    case = get_case(name)
    gas = GAS
    for p in (2, 4):
        basis = make_basis(p, case.dim)
        if case.dim == 1:
            mesh = build_mesh(case.xlim, 17, periodic_x=case.periodic[0])
        else:
            mesh = build_mesh(case.xlim, 13, case.ylim, 11, periodic_x=case.periodic[0], periodic_y=case.periodic[1])
        coords = mesh.node_coords(basis)
        args = (coords[..., 0],) if case.dim == 1 else (coords[..., 0], coords[..., 1])
        q = np.asarray(case.ic(*args))
        assert np.all(q[0] > gas.rho_min)
        assert np.all(q[-1] > gas.p_min)


def test_unknown_case_rejected():
    with pytest.raises(KeyError):
        get_case("nope")
