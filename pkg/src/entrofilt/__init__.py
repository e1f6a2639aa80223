"""High-order flux reconstruction Euler solver with an entropy-constrained,
positivity-preserving adaptive modal filter, plus a benchmark harness."""

from .basis import ReferenceBasis, build_correction_gradients, build_gll, build_modal_transform, make_basis
from .cases import CASES, CaseSpec, get_case
from .euler import GasModel, cons_to_prim, entropy, euler_flux, hllc_flux, max_wavespeed, pressure, prim_to_cons, rusanov_flux
from .filtering import (
    FilterOutcome,
    MeanViolationError,
    apply_exponential_filter,
    compute_sigma_min,
    constraints_satisfied,
    element_min_entropy,
    filter_element,
    filter_field,
)
from .harness import RunConfig, RunReport, convergence_study, run_config
from .mesh import MeshTopology, build_mesh
from .solver import BoundaryCondition, EulerSolver, SolutionField, apply_boundary_conditions, ssp_rk3

__version__ = "0.1.0"
