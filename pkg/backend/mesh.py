"""Fault-conforming simplicial meshes of intervals and rectangles.

Local facet i of a cell is the facet opposite local vertex i. Every facet
carries one global orientation: its normal points out of the lower-indexed
adjacent cell (outward on the boundary).
"""

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable

import numpy as np

from errors import MeshError

# Facet tags
INTERIOR = 0
FAULT = 1
DIRICHLET = 2
NEUMANN = 3

# Cell tags
OUTSIDE_SUBDOMAIN = 0
INSIDE_SUBDOMAIN = 1

# Boundary classes of a SubMesh facet
NOT_ON_BOUNDARY = 0
GAMMA_PLUS = 1
GAMMA_MINUS = 2
OTHER_BOUNDARY = 3

# Dirichlet ids: inlet at x = 0, outlet at x = L (Lx)
INLET_ID = 1
OUTLET_ID = 0
NO_BOUNDARY_ID = -1

GEOMETRY_TOL = 1e-12
LOCATE_TOL = 1e-10
GRADING_GROWTH = 1.2

# Local facet -> local vertices, facet i opposite vertex i
LOCAL_FACETS = {
    1: np.array([[1], [0]]),
    2: np.array([[1, 2], [2, 0], [0, 1]]),
}

BoundaryTagger = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class FaultGeometry:
    """Straight fault on the line x = y_n, tangential extent [y_tau_min, y_tau_max] in 2D."""

    dim: int
    y_n: float
    t_f: float = 1.0
    y_tau_min: float | None = None
    y_tau_max: float | None = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise MeshError(f"Fault dimension must be 1 or 2, got {self.dim}")
        if not self.t_f > 0:
            raise MeshError(f"Transmissibility must be positive, got {self.t_f}")
        if self.dim == 2:
            if self.y_tau_min is None or self.y_tau_max is None:
                raise MeshError("2D fault needs a tangential extent")
            if not self.y_tau_min < self.y_tau_max:
                raise MeshError(
                    f"Empty fault extent [{self.y_tau_min}, {self.y_tau_max}]"
                )

    @property
    def length(self) -> float:
        """Fault measure; a 1D fault is a point with unit measure."""
        if self.dim == 1:
            return 1.0
        return self.y_tau_max - self.y_tau_min

    @property
    def tau_mid(self) -> float | None:
        if self.dim == 1:
            return None
        return 0.5 * (self.y_tau_min + self.y_tau_max)

    def with_transmissibility(self, t_f: float) -> "FaultGeometry":
        return replace(self, t_f=float(t_f))


def _freeze(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.setflags(write=False)


@dataclass(eq=False)
class Mesh:
    vertices: np.ndarray
    cells: np.ndarray
    facets: np.ndarray
    facet_cells: np.ndarray
    cell_facets: np.ndarray
    cell_facet_signs: np.ndarray
    facet_normals: np.ndarray
    facet_measures: np.ndarray
    cell_measures: np.ndarray
    facet_tags: np.ndarray
    facet_boundary_ids: np.ndarray
    cell_tags: np.ndarray
    h: float
    h_f: float
    h_s: float
    fault: FaultGeometry | None = None
    subdomain_box: tuple[tuple[float, float], tuple[float, float]] | None = None

    def __post_init__(self):
        _freeze(
            self.vertices, self.cells, self.facets, self.facet_cells,
            self.cell_facets, self.cell_facet_signs, self.facet_normals,
            self.facet_measures, self.cell_measures, self.facet_tags,
            self.facet_boundary_ids, self.cell_tags,
        )

    @classmethod
    def from_arrays(
        cls,
        vertices: np.ndarray,
        cells: np.ndarray,
        *,
        boundary_tags: BoundaryTagger | None = None,
        fault: FaultGeometry | None = None,
        cell_tags: np.ndarray | None = None,
        h: float | None = None,
        h_f: float | None = None,
        h_s: float | None = None,
        subdomain_box=None,
    ) -> "Mesh":
        """Build facets, adjacency, orientation and measures from raw arrays.

        Args:
            vertices: (n_vertices, dim) coordinates
            cells: (n_cells, dim + 1) vertex indices; 2D cells are reordered counterclockwise
            boundary_tags: callable(midpoints) -> (tags, ids) for boundary facets;
                defaults to Dirichlet id 0 everywhere
            fault: facets on the fault line are tagged FAULT when given
        """
        vertices = np.array(vertices, dtype=float)
        if vertices.ndim == 1:
            vertices = vertices[:, None]
        cells = np.array(cells, dtype=np.int64)
        dim = vertices.shape[1]
        if dim not in (1, 2) or cells.ndim != 2 or cells.shape[1] != dim + 1:
            raise MeshError(f"Unsupported cell array shape {cells.shape} for dimension {dim}")

        cells = _orient_cells(vertices, cells)
        cell_measures = _cell_measures(vertices, cells)
        bad = np.flatnonzero(cell_measures <= 0.0)
        if bad.size:
            raise MeshError(f"Degenerate cell {int(bad[0])} (measure {cell_measures[bad[0]]:.3e})")

        n_cells = cells.shape[0]
        local = cells[:, LOCAL_FACETS[dim]]
        keys = np.sort(local.reshape(-1, dim), axis=1)
        facets, inverse = np.unique(keys, axis=0, return_inverse=True)
        cell_facets = np.asarray(inverse).reshape(n_cells, dim + 1)
        n_facets = facets.shape[0]

        flat_facets = cell_facets.ravel()
        flat_cells = np.repeat(np.arange(n_cells), dim + 1)
        if np.bincount(flat_facets, minlength=n_facets).max() > 2:
            raise MeshError("Non-conforming mesh: facet shared by more than two cells")
        order = np.lexsort((flat_cells, flat_facets))
        sorted_facets = flat_facets[order]
        sorted_cells = flat_cells[order]
        first = np.ones(sorted_facets.size, dtype=bool)
        first[1:] = sorted_facets[1:] != sorted_facets[:-1]
        facet_cells = np.full((n_facets, 2), -1, dtype=np.int64)
        facet_cells[sorted_facets[first], 0] = sorted_cells[first]
        facet_cells[sorted_facets[~first], 1] = sorted_cells[~first]

        centroids = vertices[cells].mean(axis=1)
        midpoints = vertices[facets].mean(axis=1)
        if dim == 2:
            a = vertices[facets[:, 0]]
            b = vertices[facets[:, 1]]
            tangent = b - a
            facet_measures = np.hypot(tangent[:, 0], tangent[:, 1])
            normals = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / facet_measures[:, None]
        else:
            facet_measures = np.ones(n_facets)
            normals = np.ones((n_facets, 1))
        outward = np.einsum("ij,ij->i", normals, midpoints - centroids[facet_cells[:, 0]])
        normals[outward < 0] *= -1.0

        cell_facet_signs = np.where(
            facet_cells[cell_facets, 0] == np.arange(n_cells)[:, None], 1, -1
        ).astype(np.int64)

        boundary = facet_cells[:, 1] < 0
        facet_tags = np.full(n_facets, INTERIOR, dtype=np.int64)
        boundary_ids = np.full(n_facets, NO_BOUNDARY_ID, dtype=np.int64)
        if boundary_tags is None:
            facet_tags[boundary] = DIRICHLET
            boundary_ids[boundary] = 0
        else:
            tags, ids = boundary_tags(midpoints[boundary])
            facet_tags[boundary] = tags
            boundary_ids[boundary] = ids

        if fault is not None:
            scale = max(float(np.ptp(vertices, axis=0).max()), 1.0)
            tol = GEOMETRY_TOL * scale
            on_line = np.all(np.abs(vertices[facets][:, :, 0] - fault.y_n) <= tol, axis=1)
            on_line &= ~boundary
            if dim == 2:
                mid_tau = midpoints[:, 1]
                on_line &= (mid_tau >= fault.y_tau_min - tol) & (mid_tau <= fault.y_tau_max + tol)
            if not on_line.any():
                raise MeshError(f"Fault at x={fault.y_n} does not conform to the mesh")
            facet_tags[on_line] = FAULT

        if cell_tags is None:
            cell_tags = np.full(n_cells, OUTSIDE_SUBDOMAIN, dtype=np.int64)
        else:
            cell_tags = np.asarray(cell_tags, dtype=np.int64).copy()

        if h is None:
            h = float(_cell_diameters(vertices, cells).max())
        return cls(
            vertices=vertices,
            cells=cells,
            facets=facets,
            facet_cells=facet_cells,
            cell_facets=cell_facets,
            cell_facet_signs=cell_facet_signs,
            facet_normals=normals,
            facet_measures=facet_measures,
            cell_measures=cell_measures,
            facet_tags=facet_tags,
            facet_boundary_ids=boundary_ids,
            cell_tags=cell_tags,
            h=float(h),
            h_f=float(h_f if h_f is not None else h),
            h_s=float(h_s if h_s is not None else (h_f if h_f is not None else h)),
            fault=fault,
            subdomain_box=subdomain_box,
        )

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def n_facets(self) -> int:
        return self.facets.shape[0]

    @cached_property
    def fault_facets(self) -> np.ndarray:
        return np.flatnonzero(self.facet_tags == FAULT)

    @cached_property
    def boundary_facets(self) -> np.ndarray:
        return np.flatnonzero(self.facet_cells[:, 1] < 0)

    @cached_property
    def cell_centroids(self) -> np.ndarray:
        return self.vertices[self.cells].mean(axis=1)

    @cached_property
    def facet_midpoints(self) -> np.ndarray:
        return self.vertices[self.facets].mean(axis=1)

    @cached_property
    def cell_diameters(self) -> np.ndarray:
        return _cell_diameters(self.vertices, self.cells)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @cached_property
    def locator(self) -> "PointLocator":
        return PointLocator(self)

    def summary(self) -> dict:
        return {
            "dim": self.dim,
            "n_vertices": self.n_vertices,
            "n_cells": self.n_cells,
            "n_facets": self.n_facets,
            "n_fault_facets": int(self.fault_facets.size),
            "h": self.h,
            "h_f": self.h_f,
            "h_s": self.h_s,
        }


@dataclass(eq=False)
class SubMesh:
    """Correction subdomain with maps back to the parent mesh."""

    mesh: Mesh
    parent: Mesh
    cell_parent: np.ndarray
    facet_parent: np.ndarray
    vertex_parent: np.ndarray
    boundary_class: np.ndarray

    @cached_property
    def cell_child(self) -> np.ndarray:
        return _inverse_map(self.cell_parent, self.parent.n_cells)

    @cached_property
    def facet_child(self) -> np.ndarray:
        return _inverse_map(self.facet_parent, self.parent.n_facets)

    @cached_property
    def vertex_child(self) -> np.ndarray:
        return _inverse_map(self.vertex_parent, self.parent.n_vertices)

    @property
    def gamma_plus_facets(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_class == GAMMA_PLUS)

    @property
    def gamma_minus_facets(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_class == GAMMA_MINUS)

    @property
    def flux_facets(self) -> np.ndarray:
        return np.flatnonzero((self.boundary_class == GAMMA_PLUS) | (self.boundary_class == GAMMA_MINUS))

    @property
    def dirichlet_facets(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_class == OTHER_BOUNDARY)


class PointLocator:
    """Cell lookup through a uniform background bin grid (sorted edges in 1D)."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        vertices, cells = mesh.vertices, mesh.cells
        if mesh.dim == 1:
            left = vertices[cells[:, 0], 0]
            self._order = np.argsort(left, kind="stable")
            self._left = left[self._order]
            self._right = vertices[cells[self._order, 1], 0]
            return

        corners = vertices[cells]
        lo = corners.min(axis=1)
        hi = corners.max(axis=1)
        self._origin = vertices.min(axis=0)
        extent = vertices.max(axis=0) - self._origin
        size = float(np.median((hi - lo).max(axis=1)))
        self._bins = np.clip(np.ceil(extent / size).astype(np.int64), 1, 4096)
        self._size = extent / self._bins

        first = self._bin_index(lo)
        last = self._bin_index(hi)
        span = last - first + 1
        count = span[:, 0] * span[:, 1]
        owner = np.repeat(np.arange(mesh.n_cells), count)
        offset = np.arange(count.sum()) - np.repeat(np.cumsum(count) - count, count)
        ix = first[owner, 0] + offset % span[owner, 0]
        iy = first[owner, 1] + offset // span[owner, 0]
        bins = iy * self._bins[0] + ix
        order = np.lexsort((owner, bins))
        self._bin_cells = owner[order]
        self._bin_ptr = np.concatenate(
            [[0], np.cumsum(np.bincount(bins, minlength=int(self._bins.prod())))]
        )

        p0 = corners[:, 0]
        jacobian = np.stack([corners[:, 1] - p0, corners[:, 2] - p0], axis=2)
        self._p0 = p0
        self._inverse = np.linalg.inv(jacobian)

    def _bin_index(self, points: np.ndarray) -> np.ndarray:
        index = np.floor((points - self._origin) / self._size).astype(np.int64)
        return np.clip(index, 0, self._bins - 1)

    def barycentric(self, cells: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Barycentric coordinates of points with respect to the given cells."""
        if self.mesh.dim == 1:
            verts = self.mesh.vertices[self.mesh.cells[cells], 0]
            length = verts[:, 1] - verts[:, 0]
            lam1 = (points[:, 0] - verts[:, 0]) / length
            return np.column_stack([1.0 - lam1, lam1])
        local = np.einsum("nij,nj->ni", self._inverse[cells], points - self._p0[cells])
        return np.column_stack([1.0 - local.sum(axis=1), local])

    def locate(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        points = np.asarray(points, dtype=float).reshape(-1, self.mesh.dim)
        if self.mesh.dim == 1:
            return self._locate_1d(points)

        n_points = points.shape[0]
        found = np.full(n_points, -1, dtype=np.int64)
        bary = np.zeros((n_points, 3))
        bins = self._bin_index(points)
        bins = bins[:, 1] * self._bins[0] + bins[:, 0]
        start = self._bin_ptr[bins]
        count = self._bin_ptr[bins + 1] - start
        pending = np.flatnonzero(count > 0)
        k = 0
        while pending.size:
            cells = self._bin_cells[start[pending] + k]
            lam = self.barycentric(cells, points[pending])
            inside = np.all((lam >= -LOCATE_TOL) & (lam <= 1.0 + LOCATE_TOL), axis=1)
            found[pending[inside]] = cells[inside]
            bary[pending[inside]] = lam[inside]
            k += 1
            pending = pending[~inside]
            pending = pending[count[pending] > k]

        missing = np.flatnonzero(found < 0)
        if missing.size:
            raise MeshError(f"Point {points[missing[0]].tolist()} is outside the mesh")
        return found, bary

    def _locate_1d(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = points[:, 0]
        slot = np.clip(np.searchsorted(self._left, x, side="left") - 1, 0, self._left.size - 1)
        length = self._right[slot] - self._left[slot]
        tol = LOCATE_TOL * length
        inside = (x >= self._left[slot] - tol) & (x <= self._right[slot] + tol)
        if not inside.all():
            bad = int(np.flatnonzero(~inside)[0])
            raise MeshError(f"Point {[float(x[bad])]} is outside the mesh")
        cells = self._order[slot]
        return cells, self.barycentric(cells, points)


def locate_point(mesh: Mesh, point) -> tuple[int, np.ndarray]:
    """Return the containing cell and barycentric coordinates of one point.

    Points on shared facets or vertices resolve to the lowest-indexed
    containing cell.
    """
    cells, bary = mesh.locator.locate(np.atleast_1d(np.asarray(point, dtype=float)))
    return int(cells[0]), bary[0]


def locate_points(mesh: Mesh, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return mesh.locator.locate(points)


# ── Generators ───────────────────────────────────────────────────────────────

def _end_tagger(lx: float, ly: float | None = None) -> BoundaryTagger:
    """x = 0 -> Dirichlet inlet, x = Lx -> Dirichlet outlet, everything else no-flow."""
    tol = GEOMETRY_TOL * max(lx, ly or 0.0)

    def tag(midpoints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        tags = np.full(midpoints.shape[0], NEUMANN, dtype=np.int64)
        ids = np.full(midpoints.shape[0], NO_BOUNDARY_ID, dtype=np.int64)
        inlet = np.abs(midpoints[:, 0]) <= tol
        outlet = np.abs(midpoints[:, 0] - lx) <= tol
        tags[inlet | outlet] = DIRICHLET
        ids[inlet] = INLET_ID
        ids[outlet] = OUTLET_ID
        return tags, ids

    return tag


def generate_interval_mesh(L: float, n_cells: int, x_gamma: float, *, t_f: float = 1.0) -> Mesh:
    """Uniform mesh of (0, L) with the grid vertex nearest x_gamma moved onto the fault."""
    if not L > 0:
        raise MeshError(f"Domain length must be positive, got {L}")
    if n_cells < 2:
        raise MeshError(f"Need at least 2 cells, got {n_cells}")
    if not 0.0 < x_gamma < L:
        raise MeshError(f"Fault x={x_gamma} must lie strictly inside (0, {L})")

    h = L / n_cells
    x = np.linspace(0.0, L, n_cells + 1)
    snap = int(np.clip(np.rint(x_gamma / h), 1, n_cells - 1))
    x[snap] = x_gamma
    cells = np.column_stack([np.arange(n_cells), np.arange(1, n_cells + 1)])
    fault = FaultGeometry(dim=1, y_n=float(x_gamma), t_f=t_f)
    return Mesh.from_arrays(
        x[:, None], cells, boundary_tags=_end_tagger(L), fault=fault, h=h, h_f=h, h_s=h
    )


def _graded_widths(length: float, start: float, coarse: float, growth: float = GRADING_GROWTH) -> np.ndarray:
    """Cell widths growing geometrically from `start` toward `coarse` that tile `length`."""
    if length <= start:
        return np.array([length])
    sizes = []
    total = 0.0
    size = start
    while total < length:
        sizes.append(size)
        total += size
        size = min(size * growth, coarse)
    sizes = np.array(sizes)
    options = [sizes * (length / sizes.sum())]
    if sizes.size > 1:
        options.append(sizes[:-1] * (length / sizes[:-1].sum()))
    return min(options, key=lambda widths: abs(math.log(widths[0] / start)))


def _axis_coordinates(breaks: list[float], fine: set[int], h_f: float, h: float) -> np.ndarray:
    """Coordinates along one axis: uniform <= h_f on `fine` segments, graded elsewhere."""
    widths: dict[int, np.ndarray] = {}
    for k in sorted(fine):
        length = breaks[k + 1] - breaks[k]
        n = max(1, math.ceil(length / h_f - 1e-9))
        widths[k] = np.full(n, length / n)
    for k in range(len(breaks) - 1):
        if k in fine:
            continue
        length = breaks[k + 1] - breaks[k]
        if k + 1 in fine:
            widths[k] = _graded_widths(length, widths[k + 1][0], h)[::-1]
        elif k - 1 in fine:
            widths[k] = _graded_widths(length, widths[k - 1][-1], h)
        else:
            n = max(1, math.ceil(length / h - 1e-9))
            widths[k] = np.full(n, length / n)

    pieces = []
    for k in range(len(breaks) - 1):
        offsets = np.concatenate([[0.0], np.cumsum(widths[k][:-1])])
        pieces.append(breaks[k] + offsets)
    pieces.append([breaks[-1]])
    return np.concatenate(pieces)


def generate_rect_mesh(
    Lx: float,
    Ly: float,
    fault: FaultGeometry,
    h: float,
    h_f: float,
    L_s: float,
) -> Mesh:
    """Graded tensor-product triangulation of (0,Lx)x(0,Ly) conforming to the fault.

    Args:
        fault: 2D fault geometry on x = fault.y_n
        h: target size far from the fault
        h_f: size inside the subdomain band
        L_s: half-width of the correction subdomain around the fault
    """
    if fault.dim != 2:
        raise MeshError("Rectangle meshes need a 2D fault")
    if not 0.0 < h_f < h:
        raise MeshError(f"Need 0 < h_f < h, got h={h}, h_f={h_f}")
    if not L_s > 0:
        raise MeshError(f"Subdomain half-width must be positive, got {L_s}")

    x_lo, x_hi = fault.y_n - L_s, fault.y_n + L_s
    y_lo, y_hi = fault.y_tau_min - L_s, fault.y_tau_max + L_s
    if not (0.0 < x_lo and x_hi < Lx and 0.0 < y_lo and y_hi < Ly):
        raise MeshError(
            f"Subdomain exits domain: [{x_lo:g}, {x_hi:g}] x [{y_lo:g}, {y_hi:g}] "
            f"not inside (0, {Lx:g}) x (0, {Ly:g})"
        )

    xs = _axis_coordinates([0.0, x_lo, fault.y_n, x_hi, Lx], {1, 2}, h_f, h)
    ys = _axis_coordinates(
        [0.0, y_lo, fault.y_tau_min, fault.y_tau_max, y_hi, Ly], {1, 2, 3}, h_f, h
    )
    nx, ny = xs.size, ys.size
    grid_x, grid_y = np.meshgrid(xs, ys)
    vertices = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    i, j = (grid.ravel() for grid in np.meshgrid(np.arange(nx - 1), np.arange(ny - 1)))
    a = j * nx + i
    b = a + 1
    c = a + nx + 1
    d = a + nx
    mid_x, mid_y = fault.y_n, fault.tau_mid
    center_x = 0.5 * (xs[i] + xs[i + 1])
    center_y = 0.5 * (ys[j] + ys[j + 1])
    # Diagonal a-c where it points away from the fault midpoint, b-d otherwise
    radial = ((center_x - mid_x) * (center_y - mid_y) >= 0.0)[:, None]
    first = np.where(radial, np.column_stack([a, b, c]), np.column_stack([a, b, d]))
    second = np.where(radial, np.column_stack([a, c, d]), np.column_stack([b, c, d]))
    cells = np.stack([first, second], axis=1).reshape(-1, 3)

    centroids = vertices[cells].mean(axis=1)
    inside = (
        (centroids[:, 0] > x_lo) & (centroids[:, 0] < x_hi)
        & (centroids[:, 1] > y_lo) & (centroids[:, 1] < y_hi)
    )
    cell_tags = np.where(inside, INSIDE_SUBDOMAIN, OUTSIDE_SUBDOMAIN)

    mesh = Mesh.from_arrays(
        vertices,
        cells,
        boundary_tags=_end_tagger(Lx, Ly),
        fault=fault,
        cell_tags=cell_tags,
        h=h,
        h_f=h_f,
        h_s=h_f,
        subdomain_box=((x_lo, x_hi), (y_lo, y_hi)),
    )
    print(
        f"[Mesh] Rectangle {Lx:g}x{Ly:g}: {mesh.n_vertices} vertices, {mesh.n_cells} cells, "
        f"{mesh.fault_facets.size} fault facets (h={h:g}, h_f={h_f:g}, L_s={L_s:g})"
    )
    return mesh


def extract_subdomain(mesh: Mesh) -> SubMesh:
    """Restrict a mesh to its inside-subdomain cells and classify the new boundary."""
    if mesh.dim == 1:
        raise MeshError("1D meshes carry no correction subdomain")
    parent_cells = np.flatnonzero(mesh.cell_tags == INSIDE_SUBDOMAIN)
    if parent_cells.size == 0 or mesh.subdomain_box is None:
        raise MeshError("Mesh has no inside-subdomain cells")

    parent_vertices = np.unique(mesh.cells[parent_cells])
    vertex_child = _inverse_map(parent_vertices, mesh.n_vertices)
    sub_cells = vertex_child[mesh.cells[parent_cells]]
    (x_lo, x_hi), _ = mesh.subdomain_box
    tol = GEOMETRY_TOL * max(float(np.ptp(mesh.vertices, axis=0).max()), 1.0)

    def classify(midpoints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        flux = (np.abs(midpoints[:, 0] - x_lo) <= tol) | (np.abs(midpoints[:, 0] - x_hi) <= tol)
        tags = np.where(flux, NEUMANN, DIRICHLET)
        return tags, np.full(midpoints.shape[0], NO_BOUNDARY_ID, dtype=np.int64)

    sub = Mesh.from_arrays(
        mesh.vertices[parent_vertices],
        sub_cells,
        boundary_tags=classify,
        fault=mesh.fault,
        cell_tags=np.full(parent_cells.size, INSIDE_SUBDOMAIN),
        h=mesh.h_f,
        h_f=mesh.h_f,
        h_s=mesh.h_s,
        subdomain_box=mesh.subdomain_box,
    )

    # Sub facets map to parent facets through their sorted parent vertex pairs
    n = mesh.n_vertices
    parent_keys = mesh.facets[:, 0] * n + mesh.facets[:, 1]
    pairs = np.sort(parent_vertices[sub.facets], axis=1)
    facet_parent = np.searchsorted(parent_keys, pairs[:, 0] * n + pairs[:, 1])

    boundary_class = np.full(sub.n_facets, NOT_ON_BOUNDARY, dtype=np.int64)
    on_boundary = sub.facet_cells[:, 1] < 0
    mid_x = sub.facet_midpoints[:, 0]
    boundary_class[on_boundary] = OTHER_BOUNDARY
    boundary_class[on_boundary & (np.abs(mid_x - x_lo) <= tol)] = GAMMA_PLUS
    boundary_class[on_boundary & (np.abs(mid_x - x_hi) <= tol)] = GAMMA_MINUS

    print(
        f"[Mesh] Subdomain: {sub.n_cells} cells, {int((boundary_class == GAMMA_PLUS).sum())}+"
        f"{int((boundary_class == GAMMA_MINUS).sum())} flux facets"
    )
    return SubMesh(
        mesh=sub,
        parent=mesh,
        cell_parent=parent_cells,
        facet_parent=facet_parent,
        vertex_parent=parent_vertices,
        boundary_class=boundary_class,
    )


# ── Geometry helpers ─────────────────────────────────────────────────────────

def _orient_cells(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    cells = cells.copy()
    if vertices.shape[1] == 1:
        flip = vertices[cells[:, 0], 0] > vertices[cells[:, 1], 0]
        cells[flip] = cells[flip][:, ::-1]
        return cells
    p = vertices[cells]
    signed = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 1, 1] - p[:, 0, 1]
    ) * (p[:, 2, 0] - p[:, 0, 0])
    flip = signed < 0
    cells[flip] = cells[flip][:, [0, 2, 1]]
    return cells


def _cell_measures(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    p = vertices[cells]
    if vertices.shape[1] == 1:
        return p[:, 1, 0] - p[:, 0, 0]
    return 0.5 * (
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    )


def _cell_diameters(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    p = vertices[cells]
    if vertices.shape[1] == 1:
        return np.abs(p[:, 1, 0] - p[:, 0, 0])
    edges = [p[:, 1] - p[:, 2], p[:, 2] - p[:, 0], p[:, 0] - p[:, 1]]
    return np.max([np.hypot(e[:, 0], e[:, 1]) for e in edges], axis=0)


def _inverse_map(parent_ids: np.ndarray, n_parent: int) -> np.ndarray:
    child = np.full(n_parent, -1, dtype=np.int64)
    child[parent_ids] = np.arange(parent_ids.size)
    return child
