"""Structured Cartesian meshes with face adjacency and periodic wiring.

Element indexing is row-major: e = ey * nx + ex in 2D.  Face slots per
element are ordered (W, E) in 1D and (W, E, S, N) in 2D; `neighbors`
holds the adjacent element index per slot, or -1 for a physical
boundary face (whose condition is looked up by tag in the solver).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FACE_TAGS_1D = ("W", "E")
FACE_TAGS_2D = ("W", "E", "S", "N")
# boundary tag associated with each face slot
BOUNDARY_OF_FACE = {"W": "xmin", "E": "xmax", "S": "ymin", "N": "ymax"}


@dataclass(frozen=True)
class MeshTopology:
    dim: int
    nx: int
    ny: int
    xlim: tuple
    ylim: tuple
    hx: float
    hy: float
    jacobian: float
    periodic_x: bool
    periodic_y: bool
    neighbors: np.ndarray  # (ne, 2*dim) int, -1 on physical boundaries

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @property
    def face_tags(self):
        return FACE_TAGS_1D if self.dim == 1 else FACE_TAGS_2D

    def adjacency_with_self(self, k: int) -> set:
        """A(k): the element itself plus its face-adjacent neighbors."""
        out = {k}
        out.update(int(n) for n in self.neighbors[k] if n >= 0)
        return out

    def element_origin(self, k: int) -> tuple:
        ex, ey = k % self.nx, k // self.nx
        x0 = self.xlim[0] + ex * self.hx
        y0 = self.ylim[0] + ey * self.hy if self.dim == 2 else 0.0
        return x0, y0

    def node_coords(self, basis) -> np.ndarray:
        """Physical coordinates of every solution node, (ne, nn, dim)."""
        ne, nn = self.n_elements, basis.n_nodes
        coords = np.empty((ne, nn, self.dim))
        ex = np.arange(ne) % self.nx
        x0 = self.xlim[0] + ex * self.hx
        coords[:, :, 0] = x0[:, None] + 0.5 * self.hx * (basis.nodes[:, 0] + 1.0)[None, :]
        if self.dim == 2:
            ey = np.arange(ne) // self.nx
            y0 = self.ylim[0] + ey * self.hy
            coords[:, :, 1] = y0[:, None] + 0.5 * self.hy * (basis.nodes[:, 1] + 1.0)[None, :]
        return coords


def build_mesh(
    xlim: tuple,
    nx: int,
    ylim: tuple | None = None,
    ny: int | None = None,
    periodic_x: bool = False,
    periodic_y: bool = False,
) -> MeshTopology:
    """Uniform Cartesian partition of an interval or a box.

    Pass `ylim`/`ny` for 2D.  Periodic axes wrap the neighbor table;
    non-periodic boundary faces carry neighbor index -1.
    """
    if nx < 1 or (ny is not None and ny < 1):
        raise ValueError("element counts must be >= 1")
    if xlim[1] <= xlim[0] or (ylim is not None and ylim[1] <= ylim[0]):
        raise ValueError("degenerate domain box")

    dim = 1 if ylim is None else 2
    ny_eff = 1 if dim == 1 else int(ny)
    hx = (xlim[1] - xlim[0]) / nx
    hy = (ylim[1] - ylim[0]) / ny_eff if dim == 2 else 0.0
    jac = hx / 2.0 if dim == 1 else hx * hy / 4.0

    ne = nx * ny_eff
    nbr = np.full((ne, 2 * dim), -1, dtype=np.int64)
    e = np.arange(ne)
    ex, ey = e % nx, e // nx

    west = np.where(ex > 0, e - 1, e + nx - 1 if periodic_x else -1)
    east = np.where(ex < nx - 1, e + 1, e - nx + 1 if periodic_x else -1)
    if periodic_x and nx == 1:
        west = east = e
    nbr[:, 0], nbr[:, 1] = west, east
    if dim == 2:
        south = np.where(ey > 0, e - nx, e + (ny_eff - 1) * nx if periodic_y else -1)
        north = np.where(ey < ny_eff - 1, e + nx, e - (ny_eff - 1) * nx if periodic_y else -1)
        if periodic_y and ny_eff == 1:
            south = north = e
        nbr[:, 2], nbr[:, 3] = south, north

    return MeshTopology(
        dim=dim,
        nx=nx,
        ny=ny_eff,
        xlim=tuple(xlim),
        ylim=tuple(ylim) if ylim is not None else (0.0, 0.0),
        hx=hx,
        hy=hy,
        jacobian=jac,
        periodic_x=periodic_x,
        periodic_y=periodic_y,
        neighbors=nbr,
    )
