"""Benchmark case definitions and their reference solutions.

Each constructor returns a declarative CaseSpec; initial conditions are
sampled pointwise at the solution nodes (no sub-cell projection), so a
jump landing inside an element is handled by the first filter pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import exact_riemann
from .euler import GasModel
from .solver import bc_fixed, bc_piecewise_x, bc_shock_locus, bc_slip_wall, bc_transmissive

GAMMA = 1.4

SOD_QL = (1.0, 0.0, 1.0)
SOD_QR = (0.125, 0.0, 0.1)
SHU_OSHER_QL = (3.857143, 2.629369, 10.333333)
DMR_QL = (8.0, 7.14471, -4.125, 116.5)
DMR_QR = (1.4, 0.0, 0.0, 1.0)
DMR_SLOPE = math.tan(math.radians(30.0))
DMR_SHOCK_SPEED = 10.0 / math.cos(math.radians(30.0))
KH_QL = (2.0, 0.5, 0.0, 2.5)
KH_QR = (1.0, -0.5, 0.0, 2.5)
JET_AMBIENT = (0.1 * GAMMA, 0.0, 0.0, 1.0)
JET_INFLOW = (GAMMA, 0.0, 800.0, 1.0)
JET_INLET_X = 0.05

VORTEX_STRENGTH = 13.5
VORTEX_RADIUS = 1.5
VORTEX_VX = 0.0
VORTEX_VY = 1.0
VORTEX_MACH = 0.4


@dataclass(frozen=True)
class CaseSpec:
    """Declarative description of one benchmark problem."""

    name: str
    dim: int
    xlim: tuple
    ylim: tuple | None
    default_mesh: tuple
    t_end: float
    ic: callable
    bcs: dict = field(default_factory=dict)
    periodic: tuple = (False, False)
    oracle: str = "none"  # exact-riemann | analytic | reference-run | none
    oracle_fn: callable | None = None
    reference_cells: int = 0
    recommended_orders: tuple = (3,)
    discontinuous: bool = True
    cfl: float = 0.5


def _two_state_ic(mask_fn, q_in, q_out):
    q_in = np.asarray(q_in, dtype=float)
    q_out = np.asarray(q_out, dtype=float)

    def ic(*coords):
        m = mask_fn(*coords)
        shape = (len(q_in),) + m.shape
        return np.where(m[None], q_in.reshape((-1,) + (1,) * m.ndim), q_out.reshape((-1,) + (1,) * m.ndim)).reshape(shape)

    return ic


def sod_case() -> CaseSpec:
    return CaseSpec(
        name="sod",
        dim=1,
        xlim=(0.0, 1.0),
        ylim=None,
        default_mesh=(100,),
        t_end=0.2,
        ic=_two_state_ic(lambda x: np.asarray(x) <= 0.5, SOD_QL, SOD_QR),
        bcs={"xmin": bc_transmissive(), "xmax": bc_transmissive()},
        oracle="exact-riemann",
        oracle_fn=lambda x, t: exact_riemann.exact_riemann(SOD_QL, SOD_QR, (np.asarray(x) - 0.5) / t, GasModel()),
        recommended_orders=(2, 3, 4, 5, 6, 7),
    )


def shu_osher_case() -> CaseSpec:
    def ic(x):
        x = np.asarray(x, dtype=float)
        left = x <= -4.0
        rho = np.where(left, SHU_OSHER_QL[0], 1.0 + 0.2 * np.sin(5.0 * x))
        v = np.where(left, SHU_OSHER_QL[1], 0.0)
        p = np.where(left, SHU_OSHER_QL[2], 1.0)
        return np.stack([rho, v, p])

    return CaseSpec(
        name="shu-osher",
        dim=1,
        xlim=(-5.0, 5.0),
        ylim=None,
        default_mesh=(200,),
        t_end=1.8,
        ic=ic,
        bcs={"xmin": bc_transmissive(), "xmax": bc_transmissive()},
        oracle="reference-run",
        reference_cells=20000,
    )


def vortex_primitive(x, y, t: float = 0.0):
    """Analytic isentropic-vortex state, advected with periodic wrapping.

    Unit free-stream density normalization: rho and P share the factor
    (1 - A phi^2) raised to 1/(gamma-1) and gamma/(gamma-1), the unique
    scaling for which the swirl balances the radial pressure gradient.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lx = 20.0
    xr = (x - VORTEX_VX * t + 10.0) % lx - 10.0
    yr = (y - VORTEX_VY * t + 10.0) % lx - 10.0
    r2 = xr**2 + yr**2
    phi = np.exp((1.0 - r2) / (2.0 * VORTEX_RADIUS**2))
    s_fac = VORTEX_STRENGTH / (2.0 * np.pi * VORTEX_RADIUS)
    vx = VORTEX_VX + s_fac * yr * phi
    vy = VORTEX_VY - s_fac * xr * phi
    m2 = VORTEX_MACH**2
    base = 1.0 - VORTEX_STRENGTH**2 * m2 * (GAMMA - 1.0) / (8.0 * np.pi**2) * phi**2
    pres = (1.0 / (GAMMA * m2)) * base ** (GAMMA / (GAMMA - 1.0))
    rho = base ** (1.0 / (GAMMA - 1.0))
    return np.stack([rho, vx, vy, pres])


def vortex_exact(x, y, t: float):
    return vortex_primitive(x, y, t)


def vortex_case() -> CaseSpec:
    # one pass-through of the periodic box at |V| = 1
    return CaseSpec(
        name="vortex",
        dim=2,
        xlim=(-10.0, 10.0),
        ylim=(-10.0, 10.0),
        default_mesh=(40, 40),
        t_end=20.0,
        ic=lambda x, y: vortex_primitive(x, y, 0.0),
        periodic=(True, True),
        oracle="analytic",
        oracle_fn=vortex_exact,
        recommended_orders=(2, 3, 4, 5),
        discontinuous=False,
    )


def dmr_case() -> CaseSpec:
    return CaseSpec(
        name="dmr",
        dim=2,
        xlim=(0.0, 4.0),
        ylim=(0.0, 1.0),
        default_mesh=(240, 60),
        t_end=0.2,
        ic=_two_state_ic(
            lambda x, y: np.asarray(x) < 1.0 / 6.0 + DMR_SLOPE * np.asarray(y),
            DMR_QL,
            DMR_QR,
        ),
        bcs={
            "xmin": bc_fixed(DMR_QL),
            "xmax": bc_fixed(DMR_QR),
            "ymin": bc_piecewise_x(1.0 / 6.0, bc_fixed(DMR_QL), bc_slip_wall()),
            "ymax": bc_shock_locus(DMR_QL, DMR_QR, 1.0 / 6.0, DMR_SLOPE, DMR_SHOCK_SPEED),
        },
    )


def kh_case() -> CaseSpec:
    return CaseSpec(
        name="kh",
        dim=2,
        xlim=(-0.5, 0.5),
        ylim=(-0.5, 0.5),
        default_mesh=(64, 64),
        t_end=2.0,
        ic=_two_state_ic(lambda x, y: np.abs(np.asarray(y)) <= 0.25, KH_QL, KH_QR),
        periodic=(True, True),
        recommended_orders=(4,),
    )


def jet_case() -> CaseSpec:
    def ic(x, y):
        q = np.asarray(JET_AMBIENT, dtype=float)
        shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
        return np.broadcast_to(q.reshape((-1,) + (1,) * len(shape)), (4,) + shape).copy()

    return CaseSpec(
        name="jet",
        dim=2,
        xlim=(0.0, 0.5),
        ylim=(0.0, 1.5),
        default_mesh=(100, 300),
        t_end=0.002,
        ic=ic,
        bcs={
            "xmin": bc_slip_wall(),
            "xmax": bc_transmissive(),
            "ymin": bc_piecewise_x(JET_INLET_X, bc_fixed(JET_INFLOW), bc_transmissive()),
            "ymax": bc_transmissive(),
        },
    )


CASES = {
    "sod": sod_case,
    "shu-osher": shu_osher_case,
    "vortex": vortex_case,
    "dmr": dmr_case,
    "kh": kh_case,
    "jet": jet_case,
}


def get_case(name: str) -> CaseSpec:
    try:
        return CASES[name]()
    except KeyError:
        raise KeyError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None


def shu_osher_reference(case: CaseSpec, gas: GasModel, n_cells: int | None = None):
    """First-order exact-Godunov reference profile for the Shu-Osher case."""
    n = n_cells or case.reference_cells
    return exact_riemann.godunov_reference(case.ic, case.xlim, n, case.t_end, gas)
