#!/usr/bin/env python3
"""Run the desk-scale stress cases (DMR, KH, Mach-800 jet) and report
feasibility statistics.  Expect tens of minutes for the jet."""

import logging
import time

import numpy as np

from entrofilt.harness import RunConfig, build_solver
from entrofilt.solver import domain_integrals

logging.basicConfig(level=logging.INFO)

CASES = [
    ("dmr", 3, (240, 60)),
    ("kh", 4, (64, 64)),
    ("jet", 3, (100, 300)),
]


def main():
    for name, order, mesh_dims in CASES:
        cfg = RunConfig(case=name, order=order, mesh=mesh_dims, compute_error=False)
        case, mesh, solver, cfl = build_solver(cfg)
        field = solver.init_field(case.ic)
        q0 = domain_integrals(field.u, solver.basis, mesh)
        t0 = time.perf_counter()
        stats = solver.advance(field, case.t_end, cfl=cfl)
        wall = time.perf_counter() - t0
        q1 = domain_integrals(field.u, solver.basis, mesh)
        drift = np.abs(q1 - q0) / np.maximum(np.abs(q0), abs(q0[0]))
        act = float(np.mean(stats.activation_fractions))
        print(
            f"{name}: {stats.steps} steps to t={case.t_end:g} in {wall:.0f}s; "
            f"rho in [{field.u[0].min():.3e}, {field.u[0].max():.3f}]; "
            f"mean activation {act:.4f}; max drift {drift.max():.2e}"
        )


if __name__ == "__main__":
    main()
