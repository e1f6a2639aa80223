"""Exact Riemann solver for the 1D Euler equations, plus a first-order
Godunov reference integrator built on it.

Newton iteration on the pressure function (tolerance 1e-12, at most 100
iterations) followed by self-similar wave-fan sampling, vectorized over
sampling speeds and over face arrays.  Used as the Sod oracle, as the
cross-check for the approximate Riemann solvers, and to generate the
Shu-Osher reference profile in-repo.
"""

from __future__ import annotations

import numpy as np

from .euler import GasModel, euler_flux, prim_to_cons


class RiemannConvergenceError(RuntimeError):
    pass


def _fK(p, rhoK, pK, cK, g):
    """Pressure function of one wave family and its derivative."""
    A = 2.0 / ((g + 1.0) * rhoK)
    B = (g - 1.0) / (g + 1.0) * pK
    shock = p > pK
    sq = np.sqrt(A / (p + B))
    f_shock = (p - pK) * sq
    df_shock = sq * (1.0 - 0.5 * (p - pK) / (B + p))
    pr = np.maximum(p / pK, 1e-300)
    f_rare = 2.0 * cK / (g - 1.0) * (pr ** ((g - 1.0) / (2.0 * g)) - 1.0)
    df_rare = (1.0 / (rhoK * cK)) * pr ** (-(g + 1.0) / (2.0 * g))
    return np.where(shock, f_shock, f_rare), np.where(shock, df_shock, df_rare)


def riemann_star(qL, qR, gas: GasModel, tol: float = 1e-12, max_iter: int = 100):
    """Star-region pressure and velocity, vectorized over trailing shape.

    qL/qR are primitive stacks (rho, u, P).  Raises on vacuum generation
    or Newton non-convergence.
    """
    g = gas.gamma
    rhoL, uL, pL = np.asarray(qL[0], float), np.asarray(qL[1], float), np.asarray(qL[2], float)
    rhoR, uR, pR = np.asarray(qR[0], float), np.asarray(qR[1], float), np.asarray(qR[2], float)
    cL = np.sqrt(g * pL / rhoL)
    cR = np.sqrt(g * pR / rhoR)
    if np.any(2.0 / (g - 1.0) * (cL + cR) <= uR - uL):
        raise RiemannConvergenceError("vacuum generation: no star state exists")

    # primitive-variable (acoustic) initial guess, floored away from zero
    p = np.maximum(
        0.5 * (pL + pR) - 0.125 * (uR - uL) * (rhoL + rhoR) * (cL + cR),
        1e-8 * np.minimum(pL, pR),
    )
    du = uR - uL
    converged = np.zeros(np.shape(p), dtype=bool)
    for _ in range(max_iter):
        fL, dL = _fK(p, rhoL, pL, cL, g)
        fR, dR = _fK(p, rhoR, pR, cR, g)
        dp = (fL + fR + du) / (dL + dR)
        p_new = np.maximum(p - dp, 1e-14)
        change = 2.0 * np.abs(p_new - p) / (p_new + p)
        p = np.where(converged, p, p_new)
        converged |= change < tol
        if np.all(converged):
            break
    else:
        raise RiemannConvergenceError("pressure iteration did not converge")
    fL, _ = _fK(p, rhoL, pL, cL, g)
    fR, _ = _fK(p, rhoR, pR, cR, g)
    u = 0.5 * (uL + uR) + 0.5 * (fR - fL)
    return p, u


def wave_speeds(qL, qR, gas: GasModel):
    """Characteristic speeds of the solution fan, for region-wise work.

    Returns a dict with the star state and the left/right wave speeds
    (shock speed, or rarefaction head/tail pair, per side).
    """
    g = gas.gamma
    rhoL, uL, pL = qL
    rhoR, uR, pR = qR
    cL = np.sqrt(g * pL / rhoL)
    cR = np.sqrt(g * pR / rhoR)
    ps, us = riemann_star(qL, qR, gas)
    out = {"p_star": ps, "u_star": us}
    B = (g - 1.0) / (g + 1.0)
    if ps > pL:
        out["left"] = ("shock", uL - cL * np.sqrt((g + 1.0) / (2.0 * g) * ps / pL + (g - 1.0) / (2.0 * g)))
        out["rho_star_l"] = rhoL * (ps / pL + B) / (B * ps / pL + 1.0)
    else:
        cs = cL * (ps / pL) ** ((g - 1.0) / (2.0 * g))
        out["left"] = ("rarefaction", uL - cL, us - cs)
        out["rho_star_l"] = rhoL * (ps / pL) ** (1.0 / g)
    if ps > pR:
        out["right"] = ("shock", uR + cR * np.sqrt((g + 1.0) / (2.0 * g) * ps / pR + (g - 1.0) / (2.0 * g)))
        out["rho_star_r"] = rhoR * (ps / pR + B) / (B * ps / pR + 1.0)
    else:
        cs = cR * (ps / pR) ** ((g - 1.0) / (2.0 * g))
        out["right"] = ("rarefaction", uR + cR, us + cs)
        out["rho_star_r"] = rhoR * (ps / pR) ** (1.0 / g)
    return out


def _sample_side(xi, rhoK, uK, pK, cK, ps, us, g, side):
    """Sample one side of the fan; side = -1 for left, +1 for right.

    Vectorized over both the sampling speeds and the star states, so it
    serves pointwise sampling and whole-face-array Godunov fluxes alike.
    """
    s = float(side)
    B = (g - 1.0) / (g + 1.0)
    pr = ps / pK
    # shock branch
    rho_shock = rhoK * (pr + B) / (B * pr + 1.0)
    s_shock = uK + s * cK * np.sqrt((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g))
    # rarefaction branch
    rho_star_rare = rhoK * pr ** (1.0 / g)
    c_star = cK * pr ** ((g - 1.0) / (2.0 * g))
    s_head = uK + s * cK
    s_tail = us + s * c_star
    c_fan = np.maximum((2.0 / (g + 1.0)) * (cK - s * (g - 1.0) / 2.0 * (uK - xi)), 0.0)
    u_fan = (2.0 / (g + 1.0)) * (-s * cK + (g - 1.0) / 2.0 * uK + xi)
    rho_fan = rhoK * (c_fan / cK) ** (2.0 / (g - 1.0))
    p_fan = pK * (c_fan / cK) ** (2.0 * g / (g - 1.0))

    shock = ps > pK
    out_shock = s * xi > s * s_shock
    out_rare = s * xi > s * s_head
    in_rare = s * xi < s * s_tail
    rho = np.where(
        shock,
        np.where(out_shock, rhoK, rho_shock),
        np.where(out_rare, rhoK, np.where(in_rare, rho_star_rare, rho_fan)),
    )
    u = np.where(
        shock,
        np.where(out_shock, uK, us),
        np.where(out_rare, uK, np.where(in_rare, us, u_fan)),
    )
    p = np.where(
        shock,
        np.where(out_shock, pK, ps),
        np.where(out_rare, pK, np.where(in_rare, ps, p_fan)),
    )
    return rho, u, p


def exact_riemann(qL, qR, xi, gas: GasModel) -> np.ndarray:
    """Self-similar solution q(x/t = xi) of the Riemann problem.

    qL/qR are scalar primitive triples (rho, u, P); xi may be an array.
    Returns the primitive stack (rho, u, P) at each xi.
    """
    g = gas.gamma
    xi = np.asarray(xi, dtype=float)
    rhoL, uL, pL = (float(v) for v in qL)
    rhoR, uR, pR = (float(v) for v in qR)
    cL = np.sqrt(g * pL / rhoL)
    cR = np.sqrt(g * pR / rhoR)
    ps, us = riemann_star(np.array([rhoL, uL, pL]), np.array([rhoR, uR, pR]), gas)
    ps, us = float(ps), float(us)
    left = _sample_side(xi, rhoL, uL, pL, cL, ps, us, g, -1)
    right = _sample_side(xi, rhoR, uR, pR, cR, ps, us, g, +1)
    take_left = xi <= us
    return np.stack([np.where(take_left, a, b) for a, b in zip(left, right)])


def _godunov_face_flux(q_minus, q_plus, gas: GasModel) -> np.ndarray:
    """Godunov flux: Euler flux of the exact face state at x/t = 0."""
    g = gas.gamma
    rhoL, uL, pL = q_minus
    rhoR, uR, pR = q_plus
    cL = np.sqrt(g * pL / rhoL)
    cR = np.sqrt(g * pR / rhoR)
    ps, us = riemann_star(q_minus, q_plus, gas)
    zero = np.zeros_like(ps)
    left = _sample_side(zero, rhoL, uL, pL, cL, ps, us, g, -1)
    right = _sample_side(zero, rhoR, uR, pR, cR, ps, us, g, +1)
    take_left = zero <= us
    q_face = np.stack([np.where(take_left, a, b) for a, b in zip(left, right)])
    return euler_flux(prim_to_cons(q_face, gas), gas)[0]


def godunov_reference(
    ic_primitive,
    xlim: tuple,
    n_cells: int,
    t_end: float,
    gas: GasModel,
    cfl: float = 0.9,
):
    """First-order Godunov run with exact-Riemann fluxes.

    ic_primitive(x) maps cell-center coordinates to a primitive stack.
    Transmissive boundaries.  Returns (cell centers, primitive stack) at
    t_end; the last step is clipped to land on t_end exactly.
    """
    dx = (xlim[1] - xlim[0]) / n_cells
    x = xlim[0] + (np.arange(n_cells) + 0.5) * dx
    q = np.asarray(ic_primitive(x), dtype=float)
    u = prim_to_cons(q, gas)
    g = gas.gamma
    t = 0.0
    while t < t_end:
        rho = u[0]
        vel = u[1] / rho
        p = (g - 1.0) * (u[2] - 0.5 * u[1] * vel)
        lam = np.max(np.abs(vel) + np.sqrt(g * p / rho))
        dt = min(cfl * dx / lam, t_end - t)
        qc = np.stack([rho, vel, p])
        qm = np.concatenate([qc[:, :1], qc], axis=1)
        qp = np.concatenate([qc, qc[:, -1:]], axis=1)
        F = _godunov_face_flux(qm, qp, gas)
        u = u - (dt / dx) * (F[:, 1:] - F[:, :-1])
        t += dt
    rho = u[0]
    vel = u[1] / rho
    p = (g - 1.0) * (u[2] - 0.5 * u[1] * vel)
    return x, np.stack([rho, vel, p])
