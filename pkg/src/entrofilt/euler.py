"""Compressible Euler system: states, fluxes, entropy, Riemann solvers.

State arrays are stacked component-first: a conservative state is an
ndarray u with u[0] = rho, u[1:1+dim] = momentum, u[-1] = total energy,
broadcast over any trailing shape.  Primitive stacks q replace momentum
and energy with velocity and pressure.  All functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateStateError(ValueError):
    """Raised when a state with zero density reaches a point operation."""


class InadmissibleStateError(ValueError):
    """Raised when a vacuum/negative state reaches a Riemann solver."""


@dataclass(frozen=True)
class GasModel:
    """Ideal-gas parameters plus the admissibility floors and tolerance.

    rho_min/p_min are the non-vacuum floors enforced by the filter and,
    defensively, on states entering the Riemann solvers; eps_sigma is the
    slack applied to the minimum-entropy constraint.
    """

    gamma: float = 1.4
    rho_min: float = 1e-8
    p_min: float = 1e-8
    eps_sigma: float = 1e-4

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")
        if self.rho_min <= 0.0 or self.p_min <= 0.0:
            raise ValueError("positivity floors must be positive")


def _pressure(u: np.ndarray, gas: GasModel) -> np.ndarray:
    mom2 = np.sum(u[1:-1] * u[1:-1], axis=0)
    return (gas.gamma - 1.0) * (u[-1] - 0.5 * mom2 / u[0])


def pressure(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """P = (gamma - 1)(E - |rho v|^2 / (2 rho)).  Rejects rho == 0."""
    if np.any(u[0] == 0.0):
        raise DegenerateStateError("zero density in pressure evaluation")
    return _pressure(u, gas)


def prim_to_cons(q: np.ndarray, gas: GasModel) -> np.ndarray:
    rho, p = q[0], q[-1]
    u = np.empty_like(q)
    u[0] = rho
    u[1:-1] = rho * q[1:-1]
    u[-1] = p / (gas.gamma - 1.0) + 0.5 * rho * np.sum(q[1:-1] * q[1:-1], axis=0)
    return u


def cons_to_prim(u: np.ndarray, gas: GasModel) -> np.ndarray:
    if np.any(u[0] == 0.0):
        raise DegenerateStateError("zero density in primitive conversion")
    q = np.empty_like(u)
    q[0] = u[0]
    q[1:-1] = u[1:-1] / u[0]
    q[-1] = _pressure(u, gas)
    return q


def entropy_from_rho_p(rho: np.ndarray, p: np.ndarray, gamma: float) -> np.ndarray:
    """sigma = rho log(P rho^-gamma) with a -inf sentinel off the admissible set."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    ok = (rho > 0.0) & (p > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sig = rho * (np.log(p) - gamma * np.log(rho))
    return np.where(ok, sig, -np.inf)


def specific_entropy_from_rho_p(rho: np.ndarray, p: np.ndarray, gamma: float) -> np.ndarray:
    """s = log(P rho^-gamma) with a -inf sentinel off the admissible set.

    This is the quantity that obeys the local minimum principle pointwise
    (it is constant along particle paths for smooth flow), so it is what
    the filter's minimum-entropy constraint bounds; the density-weighted
    functional rho*s is exposed separately as `entropy`.
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    ok = (rho > 0.0) & (p > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.log(p) - gamma * np.log(rho)
    return np.where(ok, s, -np.inf)


def entropy(u: np.ndarray, gas: GasModel):
    """Numerical entropy sigma = rho log(P rho^-gamma).

    Inadmissible probe states (rho <= 0 or P <= 0) return -inf so the
    filter bisection can treat positivity and entropy violations
    uniformly; NaN never escapes.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    sig = entropy_from_rho_p(u[0], _pressure(u, gas), gas.gamma)
    return float(sig[0]) if scalar else sig


def max_wavespeed(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """|v| + c, an upper bound on the local propagation speed."""
    rho = u[0]
    p = _pressure(u, gas)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise InadmissibleStateError("wavespeed of inadmissible state")
    vmag = np.sqrt(np.sum(u[1:-1] * u[1:-1], axis=0)) / rho
    return vmag + np.sqrt(gas.gamma * p / rho)


def euler_flux(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """Flux columns of the Euler system, shape (dim, nvar, ...)."""
    dim = u.shape[0] - 2
    p = _pressure(u, gas)
    v = u[1:-1] / u[0]
    F = np.empty((dim,) + u.shape, dtype=float)
    for a in range(dim):
        F[a, 0] = u[1 + a]
        for b in range(dim):
            F[a, 1 + b] = u[1 + b] * v[a]
        F[a, 1 + a] += p
        F[a, -1] = (u[-1] + p) * v[a]
    return F


def _normal_axis(n) -> tuple[int, float]:
    n = np.atleast_1d(np.asarray(n, dtype=float))
    axes = np.nonzero(n)[0]
    if len(axes) != 1 or abs(n[axes[0]]) != 1.0:
        raise ValueError("normals must be axis-aligned unit vectors")
    return int(axes[0]), float(n[axes[0]])


def _split_normal(u: np.ndarray, axis: int, sign: float, gas: GasModel):
    """Primitive decomposition in the face-normal frame, with floors.

    Rejects genuinely vacuum/negative inputs; the floors only lift states
    already admissible but below the configured minima.
    """
    rho_raw = u[0]
    p_raw = _pressure(u, gas)
    if np.any(rho_raw <= 0.0) or np.any(p_raw <= 0.0):
        raise InadmissibleStateError("vacuum or negative state reached the Riemann solver")
    rho = np.maximum(rho_raw, gas.rho_min)
    p = np.maximum(p_raw, gas.p_min)
    vn = sign * u[1 + axis] / rho
    c = np.sqrt(gas.gamma * p / rho)
    return rho, vn, p, c


def _assemble_normal_flux(u, rho, vn, p, axis, sign, gas):
    """Physical flux through a face with outward normal sign*e_axis."""
    dim = u.shape[0] - 2
    F = np.empty_like(u)
    mass = rho * vn
    F[0] = mass
    ke = np.zeros_like(rho)
    inv_rho = 1.0 / u[0]
    for b in range(dim):
        v_b = u[1 + b] * inv_rho
        F[1 + b] = v_b * mass
        ke += v_b * v_b
    F[1 + axis] += sign * p
    E = p / (gas.gamma - 1.0) + 0.5 * rho * ke
    F[-1] = (E + p) * vn
    return F


def rusanov_flux(uL: np.ndarray, uR: np.ndarray, n, gas: GasModel) -> np.ndarray:
    """Local Lax-Friedrichs flux through a face with unit normal n.

    uL is the state on the -n side.  Returns the normal flux of each
    conserved variable; antisymmetric under (uL, uR, n) -> (uR, uL, -n).
    """
    axis, sign = _normal_axis(n)
    rhoL, vnL, pL, cL = _split_normal(uL, axis, sign, gas)
    rhoR, vnR, pR, cR = _split_normal(uR, axis, sign, gas)
    lam = np.maximum(np.abs(vnL) + cL, np.abs(vnR) + cR)
    FL = _assemble_normal_flux(uL, rhoL, vnL, pL, axis, sign, gas)
    FR = _assemble_normal_flux(uR, rhoR, vnR, pR, axis, sign, gas)
    return 0.5 * (FL + FR) - 0.5 * lam * (uR - uL)


def hllc_flux(uL: np.ndarray, uR: np.ndarray, n, gas: GasModel) -> np.ndarray:
    """HLLC flux with Davis wavespeed bounds through a face with normal n.

    Wavespeed estimates sL = min(vnL - cL, vnR - cR) and
    sR = max(vnL + cL, vnR + cR) are of the bounding, positivity-
    compatible type.  uL is the state on the -n side.
    """
    axis, sign = _normal_axis(n)
    rhoL, vnL, pL, cL = _split_normal(uL, axis, sign, gas)
    rhoR, vnR, pR, cR = _split_normal(uR, axis, sign, gas)

    sL = np.minimum(vnL - cL, vnR - cR)
    sR = np.maximum(vnL + cL, vnR + cR)
    dL = rhoL * (sL - vnL)
    dR = rhoR * (sR - vnR)
    s_star = (pR - pL + vnL * dL - vnR * dR) / (dL - dR)

    FL = _assemble_normal_flux(uL, rhoL, vnL, pL, axis, sign, gas)
    FR = _assemble_normal_flux(uR, rhoR, vnR, pR, axis, sign, gas)

    def star_flux(F, u, rho, vn, p, s):
        # F + s (u_star - u), with u_star from the single-contact ansatz
        r = rho * (s - vn) / (s - s_star)
        out = np.empty_like(F)
        inv_rho = 1.0 / u[0]
        ke = np.zeros_like(rho)
        for b in range(u.shape[0] - 2):
            v_b = u[1 + b] * inv_rho
            out[1 + b] = F[1 + b] + s * (r * v_b - u[1 + b])
            ke += v_b * v_b
        out[1 + axis] = F[1 + axis] + s * (r * sign * s_star - u[1 + axis])
        out[0] = F[0] + s * (r - u[0])
        E = p / (gas.gamma - 1.0) + 0.5 * rho * ke
        e_star = r * (E / rho + (s_star - vn) * (s_star + p / (rho * (s - vn))))
        out[-1] = F[-1] + s * (e_star - u[-1])
        return out

    if np.ndim(s_star) == 0:
        if sL >= 0.0:
            return FL
        if sR < 0.0:
            return FR
        if s_star >= 0.0:
            return star_flux(FL, uL, rhoL, vnL, pL, sL)
        return star_flux(FR, uR, rhoR, vnR, pR, sR)

    FsL = star_flux(FL, uL, rhoL, vnL, pL, sL)
    FsR = star_flux(FR, uR, rhoR, vnR, pR, sR)
    return np.where(
        sL >= 0.0,
        FL,
        np.where(s_star >= 0.0, FsL, np.where(sR >= 0.0, FsR, FR)),
    )
