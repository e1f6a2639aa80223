"""Flux reconstruction discretization of the Euler equations on Cartesian
meshes, with SSP-RK3 time stepping and per-stage constraint filtering.

The spatial scheme uses collocation divergence of the nodal fluxes plus
correction-gradient spreading of the interface flux jumps, with the
DG-recovering correction functions; on the affine elements used here the
physical divergence is the reference one scaled by 2/h per direction.
Interface fluxes are computed once per face and shared by both sides, so
element-mean updates telescope and the scheme is discretely conservative.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dfield

import numpy as np

from . import euler
from .basis import ReferenceBasis
from .euler import GasModel
from .filtering import FieldFilterStats, MeanViolationError, compute_sigma_min, field_min_entropy, filter_field
from .mesh import MeshTopology

log = logging.getLogger(__name__)


class FluxNaNError(RuntimeError):
    """A non-finite flux divergence was produced; reports the location."""


@dataclass
class SolutionField:
    """Nodal conservative solution (nvar, ne, nn) at a point in time."""

    u: np.ndarray
    time: float


# ---------------------------------------------------------------------------
# boundary conditions


@dataclass(frozen=True)
class BoundaryCondition:
    """One resolved boundary condition.

    kind is one of "fixed" (prescribed state, e.g. supersonic inflow),
    "transmissive" (free outflow), "slip-wall" (reflective), "shock-locus"
    (time-dependent exact two-state front), or "piecewise-x" (different
    conditions either side of a split abscissa).
    """

    kind: str
    q_fixed: tuple | None = None
    x_split: float | None = None
    left: "BoundaryCondition | None" = None
    right: "BoundaryCondition | None" = None
    locus: dict | None = None


def bc_fixed(q) -> BoundaryCondition:
    return BoundaryCondition(kind="fixed", q_fixed=tuple(float(v) for v in q))


def bc_transmissive() -> BoundaryCondition:
    return BoundaryCondition(kind="transmissive")


def bc_slip_wall() -> BoundaryCondition:
    return BoundaryCondition(kind="slip-wall")


def bc_shock_locus(q_post, q_pre, x0: float, slope: float, speed: float) -> BoundaryCondition:
    """Ghost state q_post behind the front x = x0 + slope*y + speed*t, q_pre ahead."""
    return BoundaryCondition(
        kind="shock-locus",
        locus={
            "q_post": tuple(float(v) for v in q_post),
            "q_pre": tuple(float(v) for v in q_pre),
            "x0": x0,
            "slope": slope,
            "speed": speed,
        },
    )


def bc_piecewise_x(x_split: float, left: BoundaryCondition, right: BoundaryCondition) -> BoundaryCondition:
    return BoundaryCondition(kind="piecewise-x", x_split=x_split, left=left, right=right)


def apply_boundary_conditions(u_face, coords, t, axis, bc: BoundaryCondition, gas: GasModel):
    """Exterior ghost states for one boundary.

    u_face holds the interior trace (nvar, ...); coords the face-node
    physical coordinates (..., dim).  The ghost is fed to the Riemann
    solver as the exterior state; no weak special cases.
    """
    if bc.kind == "transmissive":
        return u_face.copy()
    if bc.kind == "slip-wall":
        ghost = u_face.copy()
        ghost[1 + axis] = -ghost[1 + axis]
        return ghost
    if bc.kind == "fixed":
        q = np.asarray(bc.q_fixed, dtype=float)
        uc = euler.prim_to_cons(q, gas)
        return np.broadcast_to(uc.reshape((len(uc),) + (1,) * (u_face.ndim - 1)), u_face.shape).copy()
    if bc.kind == "shock-locus":
        p = bc.locus
        x = coords[..., 0]
        y = coords[..., 1] if coords.shape[-1] > 1 else 0.0
        behind = x <= p["x0"] + p["slope"] * y + p["speed"] * t
        u_post = euler.prim_to_cons(np.asarray(p["q_post"], dtype=float), gas)
        u_pre = euler.prim_to_cons(np.asarray(p["q_pre"], dtype=float), gas)
        ghost = np.where(behind[None], u_post.reshape((-1,) + (1,) * behind.ndim), u_pre.reshape((-1,) + (1,) * behind.ndim))
        return ghost
    if bc.kind == "piecewise-x":
        gl = apply_boundary_conditions(u_face, coords, t, axis, bc.left, gas)
        gr = apply_boundary_conditions(u_face, coords, t, axis, bc.right, gas)
        mask = coords[..., 0] <= bc.x_split
        return np.where(mask[None], gl, gr)
    raise ValueError(f"unknown boundary condition kind {bc.kind!r}")


# ---------------------------------------------------------------------------
# time-integration bookkeeping


@dataclass
class StepStats:
    dt: float
    evaluations: int          # element-stage filter evaluations (3 * ne)
    activations: int
    max_zeta: float
    boundary_flux: np.ndarray  # time-integrated boundary flux of the step


@dataclass
class RunStats:
    steps: int = 0
    dts: list = dfield(default_factory=list)
    activation_fractions: list = dfield(default_factory=list)
    max_zetas: list = dfield(default_factory=list)

    def record(self, s: StepStats):
        self.steps += 1
        self.dts.append(s.dt)
        self.activation_fractions.append(s.activations / s.evaluations)
        self.max_zetas.append(s.max_zeta)


def ssp_rk3(y, t, dt, f, post_stage):
    """Shu-Osher three-stage SSP-RK3 convex combination.

    post_stage(candidate, stage_time, stage_index) may transform each
    stage result (the solver filters there); pass an identity for plain
    ODE integration.
    """
    y1 = post_stage(y + dt * f(y, t), t + dt, 0)
    y2 = post_stage(0.75 * y + 0.25 * y1 + 0.25 * dt * f(y1, t + dt), t + 0.5 * dt, 1)
    return post_stage(y / 3.0 + (2.0 / 3.0) * y2 + (2.0 / 3.0) * dt * f(y2, t + 0.5 * dt), t + dt, 2)


def domain_integrals(u: np.ndarray, basis: ReferenceBasis, mesh: MeshTopology) -> np.ndarray:
    """Domain integral of each conserved variable."""
    return (u @ basis.quad_weights).sum(axis=1) * mesh.jacobian


# ---------------------------------------------------------------------------
# the solver


class EulerSolver:
    """FR Euler solver bound to one basis/mesh/gas/boundary configuration.

    compute_rhs is parallel over elements after the face-flux exchange;
    here both phases are whole-field vectorized numpy passes.
    """

    def __init__(
        self,
        basis: ReferenceBasis,
        mesh: MeshTopology,
        gas: GasModel,
        bcs: dict | None = None,
        riemann: str = "hllc",
        filter_mode: str = "entropy",
    ):
        if basis.dim != mesh.dim:
            raise ValueError("basis and mesh dimensionality disagree")
        self.basis = basis
        self.mesh = mesh
        self.gas = gas
        self.bcs = dict(bcs or {})
        if riemann not in ("hllc", "rusanov"):
            raise ValueError(f"unknown Riemann solver {riemann!r}")
        if filter_mode not in ("entropy", "linear", "off"):
            raise ValueError(f"unknown filter mode {filter_mode!r}")
        self.riemann = riemann
        self.filter_mode = filter_mode
        self._check_bcs()
        self._coords = mesh.node_coords(basis)  # (ne, nn, dim)
        self._bcoords = self._boundary_coords()
        self._sig_star = None  # per-element min entropy of the current field
        self._ic_coords = self._sampling_coords()
        self._scratch = {}
        # per-direction operators with the affine 2/h scaling folded in
        self._dx_t = basis.diff_matrix.T * (2.0 / mesh.hx)
        self._dy = basis.diff_matrix * (2.0 / mesh.hy) if mesh.dim == 2 else None
        self._corr_x = np.stack([basis.dgl, basis.dgr]) * (2.0 / mesh.hx)  # (2, p1)
        self._corr_y = np.stack([basis.dgl, basis.dgr]) * (2.0 / mesh.hy) if mesh.dim == 2 else None

    def _buf(self, key, shape):
        buf = self._scratch.get(key)
        if buf is None or buf.shape != shape:
            buf = np.empty(shape)
            self._scratch[key] = buf
        return buf

    def _check_bcs(self):
        mesh = self.mesh
        needed = []
        if not mesh.periodic_x:
            needed += ["xmin", "xmax"]
        if mesh.dim == 2 and not mesh.periodic_y:
            needed += ["ymin", "ymax"]
        for tag in needed:
            if tag not in self.bcs:
                raise ValueError(f"missing boundary condition for {tag!r}")

    def _boundary_coords(self):
        """Physical face-node coordinates per boundary tag."""
        mesh, basis = self.mesh, self.basis
        p1 = basis.order + 1
        out = {}
        if mesh.dim == 1:
            out["xmin"] = np.array([[mesh.xlim[0]]])
            out["xmax"] = np.array([[mesh.xlim[1]]])
            return out
        xs = mesh.xlim[0] + (np.arange(mesh.nx)[:, None] + 0.5 * (basis.nodes_1d[None, :] + 1.0)) * mesh.hx
        ys = mesh.ylim[0] + (np.arange(mesh.ny)[:, None] + 0.5 * (basis.nodes_1d[None, :] + 1.0)) * mesh.hy
        out["xmin"] = np.stack([np.full((mesh.ny, p1), mesh.xlim[0]), ys], axis=-1)
        out["xmax"] = np.stack([np.full((mesh.ny, p1), mesh.xlim[1]), ys], axis=-1)
        out["ymin"] = np.stack([xs, np.full((mesh.nx, p1), mesh.ylim[0])], axis=-1)
        out["ymax"] = np.stack([xs, np.full((mesh.nx, p1), mesh.ylim[1])], axis=-1)
        return out

    # -- field setup -------------------------------------------------------

    def _sampling_coords(self):
        """Node coordinates for IC sampling, with the closed face nodes
        nudged 1e-10*h into the element interior.

        Sampling a piecewise initial state at its exact jump abscissa
        would hand one element a nodal value from across the interface
        and bias its mean by O(h) -- a conserved startup error.  The
        nudge makes face nodes take their one-sided, element-interior
        limits; smooth states change below roundoff interest.
        """
        basis, mesh = self.basis, self.mesh
        nudged = basis.nodes_1d.copy()
        nudged[0] += 2e-10
        nudged[-1] -= 2e-10
        p1 = basis.order + 1
        ne, nn = mesh.n_elements, basis.n_nodes
        coords = np.empty((ne, nn, mesh.dim))
        ex = np.arange(ne) % mesh.nx
        x0 = mesh.xlim[0] + ex * mesh.hx
        if mesh.dim == 1:
            coords[:, :, 0] = x0[:, None] + 0.5 * mesh.hx * (nudged + 1.0)[None, :]
            return coords
        ey = np.arange(ne) // mesh.nx
        y0 = mesh.ylim[0] + ey * mesh.hy
        nx_nodes = np.tile(nudged, p1)
        ny_nodes = np.repeat(nudged, p1)
        coords[:, :, 0] = x0[:, None] + 0.5 * mesh.hx * (nx_nodes + 1.0)[None, :]
        coords[:, :, 1] = y0[:, None] + 0.5 * mesh.hy * (ny_nodes + 1.0)[None, :]
        return coords

    def init_field(self, ic_primitive, t0: float = 0.0) -> SolutionField:
        """Sample a primitive-variable initial condition at the GLL nodes."""
        c = self._ic_coords
        args = (c[..., 0],) if self.mesh.dim == 1 else (c[..., 0], c[..., 1])
        q = np.asarray(ic_primitive(*args), dtype=float)
        u = euler.prim_to_cons(q, self.gas)
        self._sig_star = None
        return SolutionField(u=np.ascontiguousarray(u), time=t0)

    # -- spatial scheme ----------------------------------------------------

    def _interface_flux(self, um, up, axis):
        n = np.zeros(self.mesh.dim)
        n[axis] = 1.0
        fn = euler.hllc_flux if self.riemann == "hllc" else euler.rusanov_flux
        return fn(um, up, n, self.gas)

    def _ghost(self, tag, u_face, t):
        bc = self.bcs[tag]
        axis = 0 if tag[0] == "x" else 1
        return apply_boundary_conditions(u_face, self._bcoords[tag], t, axis, bc, self.gas)

    def compute_rhs(self, u: np.ndarray, t: float):
        """Semidiscrete time derivative and boundary-flux diagnostics.

        Returns (dudt, boundary_flux) where boundary_flux[v] is the
        instantaneous outward flux integral of variable v over the
        physical (non-periodic) boundary.
        """
        if self.mesh.dim == 1:
            return self._rhs_1d(u, t)
        return self._rhs_2d(u, t)

    def _point_fluxes(self, u):
        g = self.gas.gamma
        rho = u[0]
        inv_rho = 1.0 / rho
        vx = u[1] * inv_rho
        if self.mesh.dim == 1:
            pres = (g - 1.0) * (u[2] - 0.5 * u[1] * vx)
            Fx = self._buf("Fx", u.shape)
            Fx[0] = u[1]
            Fx[1] = u[1] * vx + pres
            Fx[2] = (u[2] + pres) * vx
            return (Fx,)
        vy = u[2] * inv_rho
        pres = (g - 1.0) * (u[3] - 0.5 * (u[1] * vx + u[2] * vy))
        Fx = self._buf("Fx", u.shape)
        Fy = self._buf("Fy", u.shape)
        Fx[0] = u[1]
        np.multiply(u[1], vx, out=Fx[1])
        Fx[1] += pres
        np.multiply(u[2], vx, out=Fx[2])
        np.add(u[3], pres, out=Fx[3])
        Fx[3] *= vx
        Fy[0] = u[2]
        np.multiply(u[1], vy, out=Fy[1])
        np.multiply(u[2], vy, out=Fy[2])
        Fy[2] += pres
        np.add(u[3], pres, out=Fy[3])
        Fy[3] *= vy
        return Fx, Fy

    def _rhs_1d(self, u, t):
        basis, mesh = self.basis, self.mesh
        (Fx,) = self._point_fluxes(u)
        div = Fx @ basis.diff_matrix.T

        uW = u[:, :, 0]
        uE = u[:, :, -1]
        if mesh.periodic_x:
            gW, gE = uE[:, -1:], uW[:, :1]
        else:
            gW = self._ghost("xmin", uW[:, 0], t)[:, None]
            gE = self._ghost("xmax", uE[:, -1], t)[:, None]
        um = np.concatenate([gW, uE], axis=1)
        up = np.concatenate([uW, gE], axis=1)
        fbar = self._interface_flux(um, up, 0)

        FxW, FxE = Fx[:, :, 0], Fx[:, :, -1]
        div += (fbar[:, :-1] - FxW)[:, :, None] * basis.dgl[None, None, :]
        div += (fbar[:, 1:] - FxE)[:, :, None] * basis.dgr[None, None, :]
        div *= 2.0 / mesh.hx

        if not np.isfinite(div).all():
            self._raise_nan(div)
        bflux = np.zeros(u.shape[0]) if mesh.periodic_x else fbar[:, -1] - fbar[:, 0]
        return -div, bflux

    def _rhs_2d(self, u, t):
        basis, mesh = self.basis, self.mesh
        nv = u.shape[0]
        p1 = basis.order + 1
        nx, ny = mesh.nx, mesh.ny

        Fx, Fy = self._point_fluxes(u)
        F5x = Fx.reshape(nv, ny, nx, p1, p1)
        F5y = Fy.reshape(nv, ny, nx, p1, p1)

        # interior collocation divergence (2/h scaling folded into the operators)
        div = self._buf("div", F5x.shape)
        np.matmul(F5x, self._dx_t, out=div)
        tmp = self._buf("tmp", F5x.shape)
        np.matmul(self._dy, F5y, out=tmp)
        div += tmp

        u5 = u.reshape(nv, ny, nx, p1, p1)
        bflux = np.zeros(nv)

        # x-direction interfaces: (nv, ny, nx+1, p1_iy)
        uW = u5[..., 0]
        uE = u5[..., p1 - 1]
        if mesh.periodic_x:
            gW, gE = uE[:, :, -1:, :], uW[:, :, :1, :]
        else:
            gW = self._ghost("xmin", uW[:, :, 0, :], t)[:, :, None, :]
            gE = self._ghost("xmax", uE[:, :, -1, :], t)[:, :, None, :]
        um = np.concatenate([gW, uE], axis=2)
        up = np.concatenate([uW, gE], axis=2)
        fbar = self._interface_flux(um, up, 0)
        # stack (jump_W, jump_E) and contract with the two correction rows
        jumps = self._buf("jx", (nv, ny, nx, p1, 2))
        np.subtract(fbar[:, :, :-1, :], F5x[..., 0], out=jumps[..., 0])
        np.subtract(fbar[:, :, 1:, :], F5x[..., p1 - 1], out=jumps[..., 1])
        np.matmul(jumps, self._corr_x, out=tmp)
        div += tmp
        if not mesh.periodic_x:
            w_face = 0.5 * basis.weights_1d * mesh.hy
            bflux += (fbar[:, :, -1, :] @ w_face).sum(axis=1)
            bflux -= (fbar[:, :, 0, :] @ w_face).sum(axis=1)

        # y-direction interfaces: (nv, ny+1, nx, p1_ix)
        uS = u5[..., 0, :]
        uN = u5[..., p1 - 1, :]
        if mesh.periodic_y:
            gS, gN = uN[:, -1:, :, :], uS[:, :1, :, :]
        else:
            gS = self._ghost("ymin", uS[:, 0, :, :], t)[:, None, :, :]
            gN = self._ghost("ymax", uN[:, -1, :, :], t)[:, None, :, :]
        um = np.concatenate([gS, uN], axis=1)
        up = np.concatenate([uS, gN], axis=1)
        fbar = self._interface_flux(um, up, 1)
        jumps = self._buf("jy", (nv, ny, nx, 2, p1))
        np.subtract(fbar[:, :-1, :, :], F5y[..., 0, :], out=jumps[..., 0, :])
        np.subtract(fbar[:, 1:, :, :], F5y[..., p1 - 1, :], out=jumps[..., 1, :])
        np.matmul(self._corr_y.T, jumps, out=tmp)
        div += tmp
        if not mesh.periodic_y:
            w_face = 0.5 * basis.weights_1d * mesh.hx
            bflux += (fbar[:, -1, :, :] @ w_face).sum(axis=1)
            bflux -= (fbar[:, 0, :, :] @ w_face).sum(axis=1)

        div = div.reshape(u.shape)
        if not np.isfinite(div).all():
            self._raise_nan(div)
        return -div, bflux

    def _raise_nan(self, div):
        bad = ~np.isfinite(div)
        v, e, n = (int(i[0]) for i in np.nonzero(bad.reshape(div.shape[0], self.mesh.n_elements, -1)))
        raise FluxNaNError(
            f"non-finite flux divergence in variable {v}, element {e}, node {n}"
        )

    # -- time stepping -----------------------------------------------------

    def stable_dt(self, u: np.ndarray, cfl: float, t: float = 0.0) -> float:
        """dt = cfl * h_min / ((2p+1) lambda_max).

        lambda_max covers the boundary ghost states as well; a supersonic
        inflow must restrict the step before it enters the domain.
        """
        lam = float(np.max(euler.max_wavespeed(u, self.gas)))
        for ghost, _, _ in self._boundary_ghosts(u, t):
            lam = max(lam, float(np.max(euler.max_wavespeed(ghost, self.gas))))
        h = self.mesh.hx if self.mesh.dim == 1 else min(self.mesh.hx, self.mesh.hy)
        dt = cfl * h / ((2 * self.basis.order + 1) * lam)
        if dt <= 0.0:
            raise ValueError("nonpositive time step")
        return dt

    def _ghost_sigma(self, ghost):
        from .euler import _pressure, specific_entropy_from_rho_p

        return specific_entropy_from_rho_p(ghost[0], _pressure(ghost, self.gas), self.gas.gamma)

    def _boundary_ghosts(self, u, t):
        """Yield (ghost states, boundary element ids, face slot) per side."""
        mesh = self.mesh
        if mesh.dim == 1:
            if not mesh.periodic_x:
                yield self._ghost("xmin", u[:, 0, 0], t), np.array([0]), 0
                yield self._ghost("xmax", u[:, -1, -1], t), np.array([mesh.nx - 1]), 1
            return
        nv = u.shape[0]
        p1 = self.basis.order + 1
        u5 = u.reshape(nv, mesh.ny, mesh.nx, p1, p1)
        e = np.arange(mesh.n_elements).reshape(mesh.ny, mesh.nx)
        if not mesh.periodic_x:
            yield self._ghost("xmin", u5[:, :, 0, :, 0], t), e[:, 0], 0
            yield self._ghost("xmax", u5[:, :, -1, :, p1 - 1], t), e[:, -1], 1
        if not mesh.periodic_y:
            yield self._ghost("ymin", u5[:, 0, :, 0, :], t), e[0, :], 2
            yield self._ghost("ymax", u5[:, -1, :, p1 - 1, :], t), e[-1, :], 3

    def _boundary_face_sigma(self, u, t):
        """Min ghost-state entropy per (element, face slot), +inf elsewhere."""
        mesh = self.mesh
        out = np.full((mesh.n_elements, 2 * mesh.dim), np.inf)
        for ghost, elems, slot in self._boundary_ghosts(u, t):
            sig = self._ghost_sigma(ghost)
            out[elems, slot] = sig.reshape(len(elems), -1).min(axis=-1)
        return out

    def step(self, field: SolutionField, dt: float, on_stage=None) -> StepStats:
        """Advance one SSP-RK3 step in place, filtering after every stage.

        The minimum-entropy bound for each stage is assembled from the
        previous stage's (filtered) solution, boundary states included.
        """
        mesh = self.mesh
        t0 = field.time
        if self._sig_star is None:
            self._sig_star = field_min_entropy(field.u, self.gas)
        bflux_parts = []
        stats_parts: list[FieldFilterStats] = []

        def rhs(y, ts):
            dudt, bf = self.compute_rhs(y, ts)
            bflux_parts.append(bf)
            return dudt

        def post_stage(y, ts, stage):
            if self.filter_mode != "off":
                sig_min = compute_sigma_min(mesh, self._sig_star, self._boundary_face_sigma_prev)
                try:
                    st, sig_star = filter_field(
                        y, self.basis, mesh, self.gas, sig_min,
                        mode=self.filter_mode, return_sigma_star=True,
                    )
                except MeanViolationError as err:
                    raise MeanViolationError(
                        err.element, err.constraint, f" (t={ts:.6g}, stage {stage + 1})"
                    ) from err
                stats_parts.append(st)
                self._sig_star = sig_star
            self._boundary_face_sigma_prev = self._boundary_face_sigma(y, ts)
            if on_stage is not None:
                on_stage(stage, ts, y)
            return y

        self._boundary_face_sigma_prev = self._boundary_face_sigma(field.u, t0)
        field.u = ssp_rk3(field.u, t0, dt, rhs, post_stage)
        field.time = t0 + dt

        w = np.array([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0])
        bflux = dt * sum(wi * bi for wi, bi in zip(w, bflux_parts))
        ne = mesh.n_elements
        activations = sum(s.n_activated for s in stats_parts)
        max_zeta = max((s.max_zeta for s in stats_parts), default=0.0)
        return StepStats(
            dt=dt,
            evaluations=3 * ne,
            activations=activations,
            max_zeta=max_zeta,
            boundary_flux=bflux,
        )

    def advance(
        self,
        field: SolutionField,
        t_end: float,
        cfl: float = 0.5,
        max_steps: int = 10_000_000,
        on_step=None,
        on_stage=None,
    ) -> RunStats:
        """March to t_end, clipping the final step to land exactly."""
        if t_end < field.time:
            raise ValueError("t_end precedes the current time")
        run = RunStats()
        while field.time < t_end and run.steps < max_steps:
            dt = min(self.stable_dt(field.u, cfl, field.time), t_end - field.time)
            st = self.step(field, dt, on_stage=on_stage)
            run.record(st)
            if on_step is not None:
                on_step(run.steps, field, st)
        return run
