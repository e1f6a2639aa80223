"""Run orchestration: configuration, error norms, convergence tables, CSV output.

All output files use fixed column orders and 17-significant-digit decimal
formatting, so identical configurations reproduce byte-identical files
(wall time is kept out of the comparison-relevant files unless asked for).
"""

from __future__ import annotations

import csv
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss

from .basis import make_basis
from .cases import CaseSpec, get_case, shu_osher_reference
from .euler import GasModel
from .mesh import build_mesh
from .solver import EulerSolver, SolutionField, domain_integrals

log = logging.getLogger(__name__)

FMT = "{:.16e}"  # 17 significant digits; round-trips float64 exactly


@dataclass(frozen=True)
class RunConfig:
    """One solver run, fully determined."""

    case: str
    order: int = 3
    mesh: tuple | None = None
    cfl: float | None = None
    riemann: str = "hllc"
    filter_mode: str = "entropy"
    rho_min: float = 1e-8
    p_min: float = 1e-8
    eps_sigma: float = 1e-4
    compute_error: bool = True
    report_every: int = 100
    max_steps: int = 10_000_000


@dataclass
class RunReport:
    case: str
    order: int
    mesh: tuple
    cfl: float
    riemann: str
    filter_mode: str
    steps: int
    t_end: float
    dts: list
    activation_fractions: list
    max_zetas: list
    eps_l1: float
    eps_l2: float
    drift: np.ndarray
    wall_time: float


@dataclass
class RunResult:
    config: RunConfig
    case: CaseSpec
    field: SolutionField
    report: RunReport
    solver: EulerSolver


def resolve_config(cfg: RunConfig):
    """Expand a RunConfig against its case's defaults; validate."""
    case = get_case(cfg.case)
    mesh_dims = tuple(cfg.mesh) if cfg.mesh else case.default_mesh
    if len(mesh_dims) != case.dim:
        raise ValueError(
            f"case {case.name!r} is {case.dim}D but mesh {mesh_dims} has {len(mesh_dims)} extents"
        )
    cfl = cfg.cfl if cfg.cfl is not None else case.cfl
    if cfg.filter_mode == "off" and case.discontinuous:
        log.warning(
            "*** filter disabled on the discontinuous case %r: expect unphysical "
            "states or solver failure ***",
            case.name,
        )
    return case, mesh_dims, cfl


def build_solver(cfg: RunConfig):
    case, mesh_dims, cfl = resolve_config(cfg)
    gas = GasModel(rho_min=cfg.rho_min, p_min=cfg.p_min, eps_sigma=cfg.eps_sigma)
    basis = make_basis(cfg.order, case.dim)
    if case.dim == 1:
        mesh = build_mesh(case.xlim, mesh_dims[0], periodic_x=case.periodic[0])
    else:
        mesh = build_mesh(
            case.xlim,
            mesh_dims[0],
            case.ylim,
            mesh_dims[1],
            periodic_x=case.periodic[0],
            periodic_y=case.periodic[1],
        )
    solver = EulerSolver(
        basis, mesh, gas, bcs=case.bcs, riemann=cfg.riemann, filter_mode=cfg.filter_mode
    )
    return case, mesh, solver, cfl


# ---------------------------------------------------------------------------
# error norms


def point_error_norms(values: np.ndarray, exact: np.ndarray):
    """Point-mean L1 and root-mean-square L2 norms of values - exact."""
    diff = np.abs(np.ravel(values) - np.ravel(exact))
    m = diff.size
    return float(diff.sum() / m), float(np.sqrt((diff**2).sum() / m))


def error_norms_pointwise(field: SolutionField, solver: EulerSolver, case: CaseSpec):
    """Density error norms at the solution points against the case oracle."""
    if case.oracle_fn is None:
        raise ValueError(f"case {case.name!r} has no pointwise oracle")
    coords = solver._coords
    if case.dim == 1:
        q_exact = case.oracle_fn(coords[..., 0], field.time)
    else:
        q_exact = case.oracle_fn(coords[..., 0], coords[..., 1], field.time)
    return point_error_norms(field.u[0], q_exact[0])


def error_norm_l2_integral(field: SolutionField, solver: EulerSolver, case: CaseSpec) -> float:
    """Volume-normalized L2 density error on (2p)^2 Gauss-Legendre nodes."""
    basis, mesh = solver.basis, solver.mesh
    if mesh.dim != 2:
        raise ValueError("integral L2 norm is defined for 2D fields")
    p = basis.order
    gl_nodes, gl_w = leggauss(2 * p)
    M1 = basis.interp_matrix_1d(gl_nodes)
    p1 = p + 1
    rho = field.u[0].reshape(mesh.n_elements, p1, p1)
    rho_q = np.matmul(M1, rho @ M1.T)  # (ne, 2p, 2p) values at GL points

    ex = np.arange(mesh.n_elements) % mesh.nx
    ey = np.arange(mesh.n_elements) // mesh.nx
    x0 = mesh.xlim[0] + ex * mesh.hx
    y0 = mesh.ylim[0] + ey * mesh.hy
    xq = x0[:, None] + 0.5 * mesh.hx * (gl_nodes + 1.0)[None, :]
    yq = y0[:, None] + 0.5 * mesh.hy * (gl_nodes + 1.0)[None, :]
    q_exact = case.oracle_fn(xq[:, None, :], yq[:, :, None], field.time)
    w2 = np.outer(gl_w, gl_w)
    err2 = ((rho_q - q_exact[0]) ** 2 * w2[None]).sum() * mesh.jacobian
    vol = (mesh.xlim[1] - mesh.xlim[0]) * (mesh.ylim[1] - mesh.ylim[0])
    return float(np.sqrt(err2 / vol))


def _reference_error(field: SolutionField, solver: EulerSolver, case: CaseSpec, gas: GasModel):
    """Point-mean L1/L2 against the in-repo first-order Godunov reference."""
    x_ref, q_ref = shu_osher_reference(case, gas)
    dx = (case.xlim[1] - case.xlim[0]) / len(x_ref)
    xs = solver._coords[..., 0].ravel()
    idx = np.clip(((xs - case.xlim[0]) / dx).astype(int), 0, len(x_ref) - 1)
    return point_error_norms(field.u[0].ravel(), q_ref[0][idx])


def conservation_drift(u0_int: np.ndarray, u1_int: np.ndarray) -> np.ndarray:
    """Relative drift of the domain integrals, normalized per component by
    max(|initial component|, initial mass) so zero-valued components stay
    meaningful."""
    scale = np.maximum(np.abs(u0_int), abs(u0_int[0]))
    return np.abs(u1_int - u0_int) / scale


# ---------------------------------------------------------------------------
# runs


def run_config(cfg: RunConfig, on_step=None, on_stage=None) -> RunResult:
    """Execute one configured run and assemble its report."""
    case, mesh, solver, cfl = build_solver(cfg)
    field = solver.init_field(case.ic)
    u0_int = domain_integrals(field.u, solver.basis, mesh)

    t_start = time.perf_counter()

    def progress(step_idx, fld, st):
        if (step_idx % cfg.report_every) == 0:
            log.info(
                "%s: step %d t=%.6g dt=%.3e act=%.4f max_zeta=%.3g",
                case.name,
                step_idx,
                fld.time,
                st.dt,
                st.activations / st.evaluations,
                st.max_zeta,
            )
        if on_step is not None:
            on_step(step_idx, fld, st)

    stats = solver.advance(
        field, case.t_end, cfl=cfl, max_steps=cfg.max_steps, on_step=progress, on_stage=on_stage
    )
    wall = time.perf_counter() - t_start
    u1_int = domain_integrals(field.u, solver.basis, mesh)

    eps_l1 = eps_l2 = float("nan")
    if cfg.compute_error and case.oracle != "none":
        if case.oracle == "reference-run":
            eps_l1, eps_l2 = _reference_error(field, solver, case, solver.gas)
        elif case.oracle == "analytic" and case.dim == 2:
            eps_l1, _ = error_norms_pointwise(field, solver, case)
            eps_l2 = error_norm_l2_integral(field, solver, case)
        else:
            eps_l1, eps_l2 = error_norms_pointwise(field, solver, case)

    report = RunReport(
        case=case.name,
        order=cfg.order,
        mesh=(mesh.nx,) if case.dim == 1 else (mesh.nx, mesh.ny),
        cfl=cfl,
        riemann=cfg.riemann,
        filter_mode=cfg.filter_mode,
        steps=stats.steps,
        t_end=field.time,
        dts=stats.dts,
        activation_fractions=stats.activation_fractions,
        max_zetas=stats.max_zetas,
        eps_l1=eps_l1,
        eps_l2=eps_l2,
        drift=conservation_drift(u0_int, u1_int),
        wall_time=wall,
    )
    return RunResult(config=cfg, case=case, field=field, report=report, solver=solver)


# ---------------------------------------------------------------------------
# convergence studies


def fit_rate(ns, errs) -> float:
    """Least-squares convergence rate: -slope of log(err) vs log(N)."""
    ln = np.log(np.asarray(ns, dtype=float))
    le = np.log(np.asarray(errs, dtype=float))
    slope = np.polyfit(ln, le, 1)[0]
    return float(-slope)


@dataclass
class ConvergenceResult:
    case: str
    order: int
    ns: list
    eps_l1: list
    eps_l2: list
    rate_running_l1: list
    rate_running_l2: list
    rate_l1: float
    rate_l2: float
    reports: list


def _worker(cfg: RunConfig) -> tuple:
    res = run_config(cfg)
    return res.report


def max_workers() -> int:
    env = os.environ.get("ENTROFILT_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, cap)


def convergence_study(case_name: str, order: int, mesh_list, base: RunConfig | None = None) -> ConvergenceResult:
    """Run each resolution, tabulate density error norms, fit rates.

    mesh_list entries are per-direction element counts N (square meshes
    for 2D cases).  Runs execute in parallel processes when
    ENTROFILT_THREADS (or the CPU count) allows.
    """
    if len(mesh_list) < 2:
        raise ValueError("need at least two resolutions for a convergence study")
    base = base or RunConfig(case=case_name, order=order)
    case = get_case(case_name)
    cfgs = []
    for n in mesh_list:
        mesh = (int(n),) if case.dim == 1 else (int(n), int(n))
        cfgs.append(replace(base, case=case_name, order=order, mesh=mesh))

    workers = min(len(cfgs), max_workers())
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_worker, cfgs))
    else:
        reports = [_worker(c) for c in cfgs]

    ns = [int(n) for n in mesh_list]
    e1 = [r.eps_l1 for r in reports]
    e2 = [r.eps_l2 for r in reports]

    def running(errs):
        out = [float("nan")]
        for i in range(1, len(ns)):
            out.append(float(np.log(errs[i - 1] / errs[i]) / np.log(ns[i] / ns[i - 1])))
        return out

    return ConvergenceResult(
        case=case_name,
        order=order,
        ns=ns,
        eps_l1=e1,
        eps_l2=e2,
        rate_running_l1=running(e1),
        rate_running_l2=running(e2),
        rate_l1=fit_rate(ns, e1),
        rate_l2=fit_rate(ns, e2),
        reports=reports,
    )


# ---------------------------------------------------------------------------
# file output


def write_solution_csv(field: SolutionField, solver: EulerSolver, path):
    """Solution CSV: x[,y],rho,vx[,vy],P; element-major, node-major rows."""
    from .euler import cons_to_prim

    coords = solver._coords
    q = cons_to_prim(field.u, solver.gas)
    dim = solver.mesh.dim
    header = ["x", "rho", "vx", "P"] if dim == 1 else ["x", "y", "rho", "vx", "vy", "P"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        ne, nn = coords.shape[0], coords.shape[1]
        for e in range(ne):
            for n in range(nn):
                row = [coords[e, n, d] for d in range(dim)] + [q[v, e, n] for v in range(q.shape[0])]
                w.writerow([FMT.format(v) for v in row])


def write_reference_csv(result: RunResult, path, n_points: int = 2000):
    """Dense oracle profile in the solution-CSV schema (1D cases only)."""
    case = result.case
    if case.dim != 1 or case.oracle_fn is None:
        raise ValueError(f"case {case.name!r} has no 1D pointwise oracle to tabulate")
    x = np.linspace(case.xlim[0], case.xlim[1], n_points)
    q = np.asarray(case.oracle_fn(x, result.field.time))
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "rho", "vx", "P"])
        for i in range(n_points):
            w.writerow([FMT.format(v) for v in (x[i], q[0, i], q[1, i], q[2, i])])


def write_report_csv(report: RunReport, path):
    """Per-step diagnostics: step,t,dt,activation_fraction,max_zeta."""
    t = report.t_end - float(np.sum(report.dts))
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["step", "t", "dt", "activation_fraction", "max_zeta"])
        for i, (dt, af, mz) in enumerate(
            zip(report.dts, report.activation_fractions, report.max_zetas)
        ):
            t += dt
            w.writerow([i, FMT.format(t), FMT.format(dt), FMT.format(af), FMT.format(mz)])


def write_summary_csv(report: RunReport, path, include_walltime: bool = True):
    cols = [
        ("case", report.case),
        ("order", report.order),
        ("mesh", "x".join(str(n) for n in report.mesh)),
        ("cfl", FMT.format(report.cfl)),
        ("riemann", report.riemann),
        ("filter", report.filter_mode),
        ("steps", report.steps),
        ("t_end", FMT.format(report.t_end)),
        ("eps_l1", FMT.format(report.eps_l1)),
        ("eps_l2", FMT.format(report.eps_l2)),
    ]
    names = ["mass"] + (["momx"] if len(report.drift) == 3 else ["momx", "momy"]) + ["energy"]
    cols += [(f"drift_{n}", FMT.format(d)) for n, d in zip(names, report.drift)]
    if include_walltime:
        cols.append(("wall_time", FMT.format(report.wall_time)))
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([c[0] for c in cols])
        w.writerow([c[1] for c in cols])


def write_convergence_csv(result: ConvergenceResult, path):
    """Table columns: N,eps_l1,eps_l2,rate_running (L2-based running rate)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["N", "eps_l1", "eps_l2", "rate_running"])
        for n, e1, e2, rr in zip(result.ns, result.eps_l1, result.eps_l2, result.rate_running_l2):
            w.writerow([n, FMT.format(e1), FMT.format(e2), FMT.format(rr)])


def write_convergence_summary_csv(result: ConvergenceResult, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["case", "order", "rate_l1", "rate_l2"])
        w.writerow([result.case, result.order, FMT.format(result.rate_l1), FMT.format(result.rate_l2)])
