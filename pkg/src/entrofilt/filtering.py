"""Adaptive modal filtering under positivity and minimum-entropy constraints.

Each element's filter strength zeta is the smallest value (found by a
fixed 20-iteration bisection) for which the filtered nodal solution
satisfies, at every solution node,

    rho >= rho_min,   P >= p_min,   sigma >= sigma_min - eps_sigma,

where sigma_min is the minimum entropy over the element, its face
neighbors and any adjacent boundary states, taken from the previous
stage.  Mode 0 is never damped, so element means are preserved exactly;
the bisection returns the feasible (upper) endpoint of its final
bracket, so the returned solution provably satisfies the constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .euler import GasModel, _pressure, specific_entropy_from_rho_p
from .mesh import MeshTopology

# At zeta_max every mode with p_i >= 1 is damped by e^-46 < 1e-20,
# numerically indistinguishable from the mean mode.
ZETA_MAX = 46.0
BISECT_ITERS = 20

BINDING_NONE, BINDING_DENSITY, BINDING_PRESSURE, BINDING_ENTROPY = 0, 1, 2, 3
BINDING_NAMES = ("none", "density", "pressure", "entropy")


class MeanViolationError(RuntimeError):
    """An element mean violates the constraints; filtering cannot help.

    Signals a too-large CFL number or a misconfigured Riemann solver
    rather than a condition the filter is allowed to repair silently.
    """

    def __init__(self, element: int, constraint: str, detail: str = ""):
        self.element = element
        self.constraint = constraint
        super().__init__(
            f"element {element} mean violates the {constraint} constraint{detail}"
        )


class InfeasibleAtZetaMaxError(RuntimeError):
    """Constraints fail even at zeta_max despite a feasible mean."""


@dataclass(frozen=True)
class FilterOutcome:
    zeta: float
    iterations: int
    activated: bool
    binding: str

    def __post_init__(self):
        assert (self.zeta == 0.0) == (not self.activated)


@dataclass
class FieldFilterStats:
    """Per-element outcome arrays for one filtering pass over a field."""

    zeta: np.ndarray
    binding: np.ndarray  # int codes, see BINDING_* / BINDING_NAMES
    iterations: np.ndarray

    @property
    def activated(self) -> np.ndarray:
        return self.zeta > 0.0

    @property
    def n_activated(self) -> int:
        return int(np.count_nonzero(self.activated))

    @property
    def max_zeta(self) -> float:
        return float(self.zeta.max()) if self.zeta.size else 0.0

    def outcome(self, k: int) -> FilterOutcome:
        return FilterOutcome(
            zeta=float(self.zeta[k]),
            iterations=int(self.iterations[k]),
            activated=bool(self.zeta[k] > 0.0),
            binding=BINDING_NAMES[int(self.binding[k])],
        )


def _damp_exponential(zeta: np.ndarray, mode_orders: np.ndarray) -> np.ndarray:
    return np.exp(-np.outer(zeta, mode_orders.astype(float) ** 2))


def _damp_linear(zeta: np.ndarray, mode_orders: np.ndarray) -> np.ndarray:
    d = np.repeat(1.0 - np.asarray(zeta, dtype=float)[:, None], len(mode_orders), axis=1)
    d[:, mode_orders == 0] = 1.0
    return d


# kernel name -> (damping profile, zeta value recovering the mean mode)
KERNELS = {
    "entropy": (_damp_exponential, ZETA_MAX),
    "linear": (_damp_linear, 1.0),
}


def apply_exponential_filter(modes: np.ndarray, mode_orders: np.ndarray, zeta: float) -> np.ndarray:
    """Scale each mode by e^{-zeta p_i^2}; mode axis is the last axis."""
    if zeta < 0.0:
        raise ValueError("filter strength must be non-negative")
    return modes * np.exp(-zeta * np.asarray(mode_orders, dtype=float) ** 2)


def element_min_entropy(u_elem: np.ndarray, gas: GasModel) -> float:
    """Minimum nodal entropy of one element, -inf if any node is inadmissible."""
    rho = u_elem[0]
    sig = specific_entropy_from_rho_p(rho, _pressure(u_elem, gas), gas.gamma)
    return float(sig.min())


def field_min_entropy(u: np.ndarray, gas: GasModel) -> np.ndarray:
    """Per-element minimum nodal entropy for a (nvar, ne, nn) field."""
    sig = specific_entropy_from_rho_p(u[0], _pressure(u, gas), gas.gamma)
    return sig.min(axis=-1)


def compute_sigma_min(
    mesh: MeshTopology,
    sigma_star: np.ndarray,
    boundary_face_sigma: np.ndarray | None = None,
) -> np.ndarray:
    """Neighborhood entropy minimum per element.

    sigma_min[k] = min over A(k) of sigma_star, where A(k) is the element
    plus its face neighbors; on physical boundary faces the entropy of
    the boundary state (boundary_face_sigma[k, face]) stands in for the
    missing neighbor.
    """
    vals = [sigma_star]
    for f in range(mesh.neighbors.shape[1]):
        nb = mesh.neighbors[:, f]
        across = np.where(nb >= 0, sigma_star[np.maximum(nb, 0)], np.inf)
        if boundary_face_sigma is not None:
            across = np.where(nb >= 0, across, boundary_face_sigma[:, f])
        vals.append(across)
    return np.min(vals, axis=0)


def _node_constraints(u: np.ndarray, gas: GasModel):
    """(rho, P, sigma) at the nodes of a (nvar, ..., nn) array."""
    rho = u[0]
    p = _pressure(u, gas)
    sig = specific_entropy_from_rho_p(rho, p, gas.gamma)
    return rho, p, sig


def _feasible(rho, p, sig, sigma_min, gas: GasModel) -> np.ndarray:
    """Per-element feasibility of nodal (rho, P, sigma) arrays (..., nn)."""
    thresh = np.asarray(sigma_min)[..., None] - gas.eps_sigma
    ok = (rho >= gas.rho_min) & (p >= gas.p_min) & (sig >= thresh)
    return ok.all(axis=-1)


def _binding_codes(rho, p, sig, sigma_min, gas: GasModel) -> np.ndarray:
    """First violated constraint class per element (0 when feasible)."""
    thresh = np.asarray(sigma_min)[..., None] - gas.eps_sigma
    viol_rho = (rho < gas.rho_min).any(axis=-1)
    viol_p = (p < gas.p_min).any(axis=-1)
    viol_sig = (sig < thresh).any(axis=-1)
    codes = np.where(viol_sig, BINDING_ENTROPY, BINDING_NONE)
    codes = np.where(viol_p, BINDING_PRESSURE, codes)
    codes = np.where(viol_rho, BINDING_DENSITY, codes)
    return codes.astype(np.int8)


def constraints_satisfied(u_elem: np.ndarray, sigma_min: float, gas: GasModel):
    """Check one element's nodes; returns (ok, binding-class name)."""
    rho, p, sig = _node_constraints(u_elem, gas)
    code = int(_binding_codes(rho[None, :], p[None, :], sig[None, :], np.array([sigma_min]), gas)[0])
    return code == BINDING_NONE, BINDING_NAMES[code]


def _check_means(sub: np.ndarray, basis, sigma_min: np.ndarray, gas: GasModel, elem_ids: np.ndarray):
    """Verify element means satisfy the constraints; raise if any fails."""
    w = basis.quad_weights / (2.0 ** basis.dim)
    mean = sub @ w  # (nvar, k)
    rho, p, sig = _node_constraints(mean[..., None], gas)
    bad = ~_feasible(rho, p, sig, sigma_min, gas)
    if np.any(bad):
        k = int(np.argmax(bad))
        code = _binding_codes(rho[k : k + 1], p[k : k + 1], sig[k : k + 1], sigma_min[k : k + 1], gas)[0]
        raise MeanViolationError(int(elem_ids[k]), BINDING_NAMES[int(code)])


def _bisect_batch(sub, basis, sigma_min, gas, damp_fn, zeta_hi):
    """Bisect zeta for a batch of constraint-violating elements.

    sub: (nvar, k, nn) nodal values whose zeta=0 check already failed and
    whose means are feasible.  Returns (filtered nodal values, zeta) with
    the filtered values taken at the feasible upper bracket endpoint.

    The bisection targets the strict bound sigma_min whenever that is
    attainable at zeta_max, falling back to sigma_min - eps_sigma per
    element otherwise.  Clipped elements thus restore their entropy to
    the bound itself; were the eps_sigma slack the target, every clip
    would lower the next stage's sigma_min by eps_sigma and the bound
    would erode without limit under persistent forcing.
    """
    k = sub.shape[1]
    modes = sub @ basis.modal_fwd.T
    orders = basis.mode_orders

    def eval_at(z, thresh):
        nodal = (modes * damp_fn(z, orders)[None]) @ basis.modal_inv.T
        rho, p, sig = _node_constraints(nodal, gas)
        ok = (rho >= gas.rho_min) & (p >= gas.p_min) & (sig >= thresh[:, None])
        return nodal, ok.all(axis=-1)

    hi = np.full(k, zeta_hi)
    best, strict_ok = eval_at(hi, sigma_min)
    thresh = np.where(strict_ok, sigma_min, sigma_min - gas.eps_sigma)
    if not np.all(strict_ok):
        nodal, feas = eval_at(hi, thresh)
        best[:, ~strict_ok, :] = nodal[:, ~strict_ok, :]
        if not np.all(feas):
            raise InfeasibleAtZetaMaxError(
                "constraints unsatisfied at zeta_max despite feasible means"
            )
    lo = np.zeros(k)
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        nodal, feas = eval_at(mid, thresh)
        best[:, feas, :] = nodal[:, feas, :]
        hi = np.where(feas, mid, hi)
        lo = np.where(feas, lo, mid)
    return best, hi


def filter_element(u_elem: np.ndarray, basis, sigma_min: float, gas: GasModel, mode: str = "entropy"):
    """Filter a single element's (nvar, nn) nodal values.

    Returns (filtered values, FilterOutcome).  Feasible elements are
    returned unchanged with zeta = 0.
    """
    damp_fn, zeta_hi = KERNELS[mode]
    rho, p, sig = _node_constraints(u_elem, gas)
    smin = np.array([sigma_min])
    if _feasible(rho[None], p[None], sig[None], smin, gas)[0]:
        return u_elem, FilterOutcome(0.0, 0, False, "none")
    code = _binding_codes(rho[None], p[None], sig[None], smin, gas)[0]
    sub = u_elem[:, None, :]
    _check_means(sub, basis, smin, gas, np.array([0]))
    best, zeta = _bisect_batch(sub, basis, smin, gas, damp_fn, zeta_hi)
    return best[:, 0, :], FilterOutcome(float(zeta[0]), BISECT_ITERS, True, BINDING_NAMES[int(code)])


def filter_field(
    u: np.ndarray,
    basis,
    mesh: MeshTopology,
    gas: GasModel,
    sigma_min: np.ndarray,
    mode: str = "entropy",
    return_sigma_star: bool = False,
):
    """Filter every element of a (nvar, ne, nn) field in place.

    Elements are independent given sigma_min; only constraint-violating
    elements are touched, so feasible elements stay bit-identical.  With
    return_sigma_star the post-filter per-element entropy minimum is
    returned alongside the stats (reusing the check's entropy pass).
    """
    damp_fn, zeta_hi = KERNELS[mode]
    ne = u.shape[1]
    rho, p, sig = _node_constraints(u, gas)
    feas = _feasible(rho, p, sig, sigma_min, gas)
    stats = FieldFilterStats(
        zeta=np.zeros(ne),
        binding=np.zeros(ne, dtype=np.int8),
        iterations=np.zeros(ne, dtype=np.int32),
    )
    if np.all(feas):
        if return_sigma_star:
            return stats, sig.min(axis=-1)
        return stats
    idx = np.nonzero(~feas)[0]
    stats.binding[idx] = _binding_codes(rho[idx], p[idx], sig[idx], sigma_min[idx], gas)
    sub = u[:, idx, :]
    _check_means(sub, basis, sigma_min[idx], gas, idx)
    best, zeta = _bisect_batch(sub, basis, sigma_min[idx], gas, damp_fn, zeta_hi)
    u[:, idx, :] = best
    stats.zeta[idx] = zeta
    stats.iterations[idx] = BISECT_ITERS
    if return_sigma_star:
        sig_star = sig.min(axis=-1)
        _, _, sig_f = _node_constraints(best, gas)
        sig_star[idx] = sig_f.min(axis=-1)
        return stats, sig_star
    return stats
