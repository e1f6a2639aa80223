"""Reference-element operators for tensor-product spectral elements.

Everything the solver needs on the reference interval [-1, 1] (and its
tensor-product square): Gauss-Legendre-Lobatto nodes and weights, the
Lagrange differentiation matrix, orthonormal Legendre modal transforms,
and the DG-recovering correction-function gradients.  All operators are
built once per order and are immutable afterwards, so a single
ReferenceBasis may be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg


def build_gll(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre-Lobatto nodes and quadrature weights on [-1, 1].

    The p+1 nodes are the roots of (1 - x^2) * d/dx[Legendre_p](x),
    computed by Newton iteration from Chebyshev-Gauss-Lobatto initial
    guesses, converged to 1e-14.  Weights are 2 / (p (p+1) P_p(x_j)^2).

    Parameters
    ----------
    p : int
        Solution polynomial order, p >= 1.

    Returns
    -------
    (nodes, weights) : tuple of ndarray, each of length p+1.
    """
    if p < 1:
        raise ValueError("polynomial order must be >= 1 (p=0 has no interior dynamics)")
    n = p + 1
    # Chebyshev-Gauss-Lobatto initial guess, ascending order
    x = -np.cos(np.pi * np.arange(n) / p)
    vand = np.zeros((n, n))
    x_prev = 2.0 * np.ones(n)
    while np.max(np.abs(x - x_prev)) > 1e-14:
        vand[:, 0] = 1.0
        vand[:, 1] = x
        for k in range(1, p):
            vand[:, k + 1] = ((2 * k + 1) * x * vand[:, k] - k * vand[:, k - 1]) / (k + 1)
        x_prev = x.copy()
        x = x_prev - (x * vand[:, p] - vand[:, p - 1]) / ((n) * vand[:, p])
    # pin the endpoints exactly and symmetrize
    x[0], x[-1] = -1.0, 1.0
    x = 0.5 * (x - x[::-1])
    vand[:, 0] = 1.0
    vand[:, 1] = x
    for k in range(1, p):
        vand[:, k + 1] = ((2 * k + 1) * x * vand[:, k] - k * vand[:, k - 1]) / (k + 1)
    w = 2.0 / (p * n * vand[:, p] ** 2)
    return x, w


def lagrange_diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """Derivative of the j-th Lagrange polynomial at node i, D[i, j]."""
    n = len(nodes)
    dx = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(dx, 1.0)
    # barycentric weights
    bw = 1.0 / np.prod(dx, axis=1)
    D = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (bw[j] / bw[i]) / (nodes[i] - nodes[j])
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -np.sum(D, axis=1))
    return D


def _orthonormal_vandermonde(p: int, nodes: np.ndarray) -> np.ndarray:
    """V[i, m] = m-th unit-L2-norm Legendre polynomial at node i."""
    V = npleg.legvander(nodes, p)
    V *= np.sqrt((2.0 * np.arange(p + 1) + 1.0) / 2.0)
    return V


def build_modal_transform(p: int, dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodal<->modal transforms for the orthonormal Legendre basis.

    Returns (modal_fwd, modal_inv, mode_orders) where modal_fwd maps GLL
    nodal values to modal coefficients, modal_inv is its inverse, and
    mode_orders[i] is the maximal per-direction degree of mode i.
    """
    nodes, _ = build_gll(p)
    V = _orthonormal_vandermonde(p, nodes)
    Vi = np.linalg.inv(V)
    orders1 = np.arange(p + 1)
    if dim == 1:
        return Vi, V, orders1
    if dim == 2:
        # node n = iy*(p+1)+ix, mode m = my*(p+1)+mx
        modal_inv = np.kron(V, V)
        modal_fwd = np.kron(Vi, Vi)
        mode_orders = np.maximum.outer(orders1, orders1).ravel()
        return modal_fwd, modal_inv, mode_orders
    raise ValueError(f"dim must be 1 or 2, got {dim}")


def build_correction_gradients(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the DG-recovering correction functions at the GLL nodes.

    The left correction function is the right Radau polynomial of degree
    p+1 (value 1 at -1, 0 at +1, orthogonal to polynomials of degree
    <= p-1); the right one is its mirror.  Returns (dgl, dgr), each of
    length p+1.
    """
    nodes, _ = build_gll(p)
    cl = np.zeros(p + 2)
    cl[p] = 0.5 * (-1.0) ** p
    cl[p + 1] = 0.5 * (-1.0) ** (p + 1)
    gl = npleg.Legendre(cl)
    dgl = gl.deriv()(nodes)
    # mirror: g_R(x) = g_L(-x)  =>  g_R'(x) = -g_L'(-x)
    dgr = -dgl[::-1]
    return dgl, dgr


@dataclass(frozen=True)
class ReferenceBasis:
    """All per-order reference-element operators.

    Attributes
    ----------
    order : solution polynomial order p.
    dim : 1 or 2.
    nodes_1d, weights_1d : GLL nodes/weights per direction.
    nodes : (nn, dim) solution-node coordinates, node-major with the x
        index fastest in 2D.
    quad_weights : (nn,) tensor-product GLL weight per solution node.
    diff_matrix : 1D Lagrange differentiation matrix (p+1, p+1).
    modal_fwd, modal_inv : nodal->modal / modal->nodal transforms (nn, nn).
    mode_orders : (nn,) maximal per-direction degree of each mode.
    dgl, dgr : correction-function gradients at the 1D nodes.
    corr_grad : per-face dense correction operators, face -> (nn, nface);
        entry [i, j] multiplies the outward-normal flux jump at face node
        j and adds to the reference divergence at solution node i.
    face_index_sets : face tag -> indices of solution nodes on that face.
        Faces are ("W", "E") in 1D and ("W", "E", "S", "N") in 2D.
    """

    order: int
    dim: int
    nodes_1d: np.ndarray
    weights_1d: np.ndarray
    nodes: np.ndarray
    quad_weights: np.ndarray
    diff_matrix: np.ndarray
    modal_fwd: np.ndarray
    modal_inv: np.ndarray
    mode_orders: np.ndarray
    dgl: np.ndarray
    dgr: np.ndarray
    corr_grad: dict = field(repr=False, default=None)
    face_index_sets: dict = field(repr=False, default=None)

    @property
    def n_nodes(self) -> int:
        return (self.order + 1) ** self.dim

    def interp_matrix_1d(self, targets: np.ndarray) -> np.ndarray:
        """Lagrange interpolation matrix from the GLL nodes to `targets`."""
        src = self.nodes_1d
        n = len(src)
        M = np.ones((len(targets), n))
        for j in range(n):
            for k in range(n):
                if k != j:
                    M[:, j] *= (targets - src[k]) / (src[j] - src[k])
        return M


def make_basis(p: int, dim: int) -> ReferenceBasis:
    """Build the full operator set for order p in `dim` dimensions."""
    nodes1, w1 = build_gll(p)
    D = lagrange_diff_matrix(nodes1)
    modal_fwd, modal_inv, mode_orders = build_modal_transform(p, dim)
    dgl, dgr = build_correction_gradients(p)
    n1 = p + 1

    if dim == 1:
        nodes = nodes1[:, None]
        qw = w1.copy()
        face_index_sets = {"W": np.array([0]), "E": np.array([p])}
        corr_grad = {
            "W": -dgl[:, None],  # outward normal -x: div of g_W = -g_L'
            "E": dgr[:, None],
        }
    elif dim == 2:
        X, Y = np.meshgrid(nodes1, nodes1, indexing="xy")
        nodes = np.column_stack([X.ravel(), Y.ravel()])
        qw = np.kron(w1, w1)
        ix = np.arange(n1 * n1) % n1
        iy = np.arange(n1 * n1) // n1
        face_index_sets = {
            "W": np.where(ix == 0)[0],
            "E": np.where(ix == p)[0],
            "S": np.where(iy == 0)[0],
            "N": np.where(iy == p)[0],
        }
        corr_grad = {}
        for tag, dg1 in (("W", -dgl), ("E", dgr), ("S", -dgl), ("N", dgr)):
            C = np.zeros((n1 * n1, n1))
            fidx = face_index_sets[tag]
            for j, nf in enumerate(fidx):
                if tag in ("W", "E"):
                    rows = np.where(iy == iy[nf])[0]
                    C[rows, j] = dg1[ix[rows]]
                else:
                    rows = np.where(ix == ix[nf])[0]
                    C[rows, j] = dg1[iy[rows]]
            corr_grad[tag] = C
    else:
        raise ValueError(f"dim must be 1 or 2, got {dim}")

    return ReferenceBasis(
        order=p,
        dim=dim,
        nodes_1d=nodes1,
        weights_1d=w1,
        nodes=nodes,
        quad_weights=qw,
        diff_matrix=D,
        modal_fwd=modal_fwd,
        modal_inv=modal_inv,
        mode_orders=mode_orders,
        dgl=dgl,
        dgr=dgr,
        corr_grad=corr_grad,
        face_index_sets=face_index_sets,
    )
