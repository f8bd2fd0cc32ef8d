"""Reference elements, quadrature, dof maps and assembly kernels.

Spaces: P1 (nodal scalar), P1-vector (nodal, one value per component), P0
(cellwise) and RT0 (one normal-flux dof per facet). On a cell with vertices
P_0..P_d the local RT0 basis function of facet i is (x - P_i) / (d |K|), which
carries unit outward flux through facet i; the global dof is the flux along
the facet's global normal, so the local function is scaled by the cell's
orientation sign.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.special import roots_jacobi

from linalg import as_csr
from mesh import DIRICHLET, NEUMANN, Mesh, locate_points
from regdelta import RegularizedDelta

P1 = "P1"
P1_VECTOR = "P1-vector"
P0 = "P0"
RT0 = "RT0"
SPACE_KINDS = (P1, P1_VECTOR, P0, RT0)

FAULT_BAND_DEGREE = 6
DEFAULT_DEGREE = 2


# ── Quadrature ─────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class QuadratureRule:
    points: np.ndarray  # barycentric, (n_points, dim + 1)
    weights: np.ndarray  # sum to the reference measure
    degree: int

    @property
    def dim(self) -> int:
        return self.points.shape[1] - 1

    @property
    def reference_measure(self) -> float:
        return 1.0 if self.dim == 1 else 0.5


@lru_cache(maxsize=None)
def quadrature_rule(dim: int, degree: int) -> QuadratureRule:
    """Gauss rule on the reference interval, collapsed Gauss-Jacobi on the triangle."""
    if dim not in (1, 2) or degree < 0:
        raise ValueError(f"No quadrature for dim={dim}, degree={degree}")
    n = degree // 2 + 1
    t, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    if dim == 1:
        points = np.column_stack([1.0 - t, t])
        weights = w
    else:
        # (u, (1 - u) v) with Gauss-Jacobi in u absorbing the (1 - u) Jacobian
        s, ws = roots_jacobi(n, 1.0, 0.0)
        u = 0.5 * (s + 1.0)
        wu = 0.25 * ws
        uu, vv = np.meshgrid(u, t, indexing="ij")
        xi = uu.ravel()
        eta = ((1.0 - uu) * vv).ravel()
        weights = np.outer(wu, w).ravel()
        points = np.column_stack([1.0 - xi - eta, xi, eta])
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(points=points, weights=weights, degree=degree)


def physical_points(mesh: Mesh, rule: QuadratureRule, cells: np.ndarray | None = None) -> np.ndarray:
    """Quadrature points of the given cells, shape (n_cells, n_points, dim)."""
    cells = slice(None) if cells is None else cells
    return np.einsum("qa,cad->cqd", rule.points, mesh.vertices[mesh.cells[cells]])


def physical_weights(mesh: Mesh, rule: QuadratureRule, cells: np.ndarray | None = None) -> np.ndarray:
    cells = slice(None) if cells is None else cells
    return np.outer(mesh.cell_measures[cells] / rule.reference_measure, rule.weights)


def integrate(mesh: Mesh, fn: Callable[[np.ndarray], np.ndarray], degree: int = DEFAULT_DEGREE) -> float:
    """Integral of fn(points) over the mesh."""
    rule = quadrature_rule(mesh.dim, degree)
    values = np.asarray(fn(physical_points(mesh, rule)), dtype=float)
    return float(np.sum(physical_weights(mesh, rule) * values))


# ── Spaces and fields ──────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class FunctionSpace:
    kind: str
    mesh: Mesh

    def __post_init__(self):
        if self.kind not in SPACE_KINDS:
            raise ValueError(f"Unknown space kind {self.kind!r}")

    @property
    def n_dofs(self) -> int:
        mesh = self.mesh
        return {
            P1: mesh.n_vertices,
            P1_VECTOR: mesh.dim * mesh.n_vertices,
            P0: mesh.n_cells,
            RT0: mesh.n_facets,
        }[self.kind]

    @property
    def cell_dofs(self) -> np.ndarray:
        if self.kind in (P1, P1_VECTOR):
            return self.mesh.cells
        if self.kind == P0:
            return np.arange(self.mesh.n_cells)[:, None]
        return self.mesh.cell_facets

    @property
    def cell_signs(self) -> np.ndarray:
        if self.kind == RT0:
            return self.mesh.cell_facet_signs
        return np.ones_like(self.cell_dofs)


@dataclass(eq=False)
class FieldSolution:
    """Dof values tagged with their space; P1-vector values are stored (n_vertices, dim)."""

    space: FunctionSpace
    values: np.ndarray
    name: str = ""

    @property
    def mesh(self) -> Mesh:
        return self.space.mesh

    @property
    def kind(self) -> str:
        return self.space.kind

    def evaluate(self, points, cells=None, bary=None) -> np.ndarray:
        return evaluate(self, points, cells=cells, bary=bary)


def p1_field(mesh: Mesh, values: np.ndarray, name: str = "") -> FieldSolution:
    return FieldSolution(FunctionSpace(P1, mesh), np.asarray(values, dtype=float), name)


def interpolate_p1(mesh: Mesh, fn: Callable[[np.ndarray], np.ndarray], name: str = "") -> FieldSolution:
    return p1_field(mesh, fn(mesh.vertices), name)


# ── Element kernels ────────────────────────────────────────────────────────

def p1_gradients(mesh: Mesh) -> np.ndarray:
    """Gradients of the barycentric functions per cell, shape (n_cells, dim + 1, dim)."""
    p = mesh.vertices[mesh.cells]
    if mesh.dim == 1:
        inverse_length = 1.0 / (p[:, 1, 0] - p[:, 0, 0])
        return np.stack([-inverse_length, inverse_length], axis=1)[:, :, None]
    jacobian = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    inverse = np.linalg.inv(jacobian)
    return np.concatenate([-inverse.sum(axis=1, keepdims=True), inverse], axis=1)


def cell_gradients(field: FieldSolution) -> np.ndarray:
    """Cellwise constant gradient of a P1 field, shape (n_cells, dim)."""
    if field.kind != P1:
        raise ValueError(f"Cell gradients need a P1 field, got {field.kind}")
    mesh = field.mesh
    return np.einsum("ci,cid->cd", field.values[mesh.cells], p1_gradients(mesh))


def _assemble(rows: np.ndarray, cols: np.ndarray, local: np.ndarray, shape: tuple[int, int]) -> sp.csr_matrix:
    r = np.broadcast_to(rows[:, :, None], local.shape).ravel()
    c = np.broadcast_to(cols[:, None, :], local.shape).ravel()
    return as_csr(sp.coo_matrix((local.ravel(), (r, c)), shape=shape))


def assemble_p1_stiffness(mesh: Mesh) -> sp.csr_matrix:
    grads = p1_gradients(mesh)
    local = np.einsum("cid,cjd->cij", grads, grads) * mesh.cell_measures[:, None, None]
    n = mesh.n_vertices
    return _assemble(mesh.cells, mesh.cells, local, (n, n))


def assemble_p0_mass(mesh: Mesh) -> sp.csr_matrix:
    return sp.diags(mesh.cell_measures, format="csr")


def lumped_p1_mass(mesh: Mesh) -> np.ndarray:
    share = np.repeat(mesh.cell_measures / (mesh.dim + 1), mesh.dim + 1)
    return np.bincount(mesh.cells.ravel(), weights=share, minlength=mesh.n_vertices)


def assemble_p1_load(mesh: Mesh, f: Callable[[np.ndarray], np.ndarray], degree: int = DEFAULT_DEGREE) -> np.ndarray:
    """Load vector (f, phi_i) for P1."""
    rule = quadrature_rule(mesh.dim, degree)
    values = f(physical_points(mesh, rule)) * physical_weights(mesh, rule)
    local = values @ rule.points
    return np.bincount(mesh.cells.ravel(), weights=local.ravel(), minlength=mesh.n_vertices)


def assemble_cg_fault_terms(mesh: Mesh, regdelta: RegularizedDelta) -> sp.csr_matrix:
    """Fault part of the regularized pressure operator on P1 (row = test, column = trial).

    (G dp/dn, w) - (dD/dtau dp/dtau, w) - (D dp/dtau, dw/dtau); only the G term in 1D.
    """
    if regdelta.eps < mesh.h_f:
        message = f"eps={regdelta.eps:g} is below the fault mesh size h_f={mesh.h_f:g}"
        print(f"[CG] Warning: {message}")
        warnings.warn(message, RuntimeWarning, stacklevel=2)

    grads = p1_gradients(mesh)
    x = mesh.vertices[mesh.cells][:, :, 0]
    centre = regdelta.fault.y_n
    band = (x.min(axis=1) <= centre + regdelta.band_half_width) & (
        x.max(axis=1) >= centre - regdelta.band_half_width
    )
    local = np.zeros((mesh.n_cells, mesh.dim + 1, mesh.dim + 1))
    for cells, degree in ((np.flatnonzero(band), FAULT_BAND_DEGREE), (np.flatnonzero(~band), DEFAULT_DEGREE)):
        if cells.size == 0:
            continue
        rule = quadrature_rule(mesh.dim, degree)
        points = physical_points(mesh, rule, cells)
        weights = physical_weights(mesh, rule, cells)
        phi = rule.points
        grad_n = grads[cells, :, 0]
        g_phi = np.einsum("cq,cq,qi->ci", weights, regdelta.g_eps(points), phi)
        block = g_phi[:, :, None] * grad_n[:, None, :]
        if mesh.dim == 2:
            grad_t = grads[cells, :, 1]
            dd_phi = np.einsum("cq,cq,qi->ci", weights, regdelta.dd_eps_dtau(points), phi)
            d_mean = np.einsum("cq,cq->c", weights, regdelta.d_eps(points))
            block -= dd_phi[:, :, None] * grad_t[:, None, :]
            block -= d_mean[:, None, None] * grad_t[:, :, None] * grad_t[:, None, :]
        local[cells] = block
    n = mesh.n_vertices
    return _assemble(mesh.cells, mesh.cells, local, (n, n))


# ── Mixed RT0 x P0 system ──────────────────────────────────────────────────

@dataclass(eq=False)
class MixedSystem:
    """Saddle system restricted to free dofs (velocity dofs first, then pressures)."""

    mesh: Mesh
    t_f: float
    matrix: sp.csr_matrix
    rhs: np.ndarray
    full_matrix: sp.csr_matrix
    full_rhs: np.ndarray
    free_dofs: np.ndarray
    pinned_dofs: np.ndarray
    pinned_values: np.ndarray
    facet_pressure: np.ndarray
    facet_flux: np.ndarray
    symmetric: bool = False

    @property
    def n_facets(self) -> int:
        return self.mesh.n_facets

    @property
    def n_cells(self) -> int:
        return self.mesh.n_cells

    @property
    def n_dofs(self) -> int:
        return self.n_facets + self.n_cells

    def expand(self, reduced: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Facet fluxes and cell pressures from a reduced solution vector."""
        full = np.empty(self.n_dofs)
        full[self.free_dofs] = reduced
        full[self.pinned_dofs] = self.pinned_values
        pressure = full[self.n_facets:]
        if self.symmetric:
            pressure = -pressure
        return full[: self.n_facets], pressure


def rt0_local_mass(mesh: Mesh) -> np.ndarray:
    """Unsigned local RT0 mass matrices, shape (n_cells, dim + 1, dim + 1)."""
    rule = quadrature_rule(mesh.dim, DEFAULT_DEGREE)
    points = physical_points(mesh, rule)
    weights = physical_weights(mesh, rule)
    corners = mesh.vertices[mesh.cells]
    scale = 1.0 / (mesh.dim * mesh.cell_measures)
    basis = (points[:, :, None, :] - corners[:, None, :, :]) * scale[:, None, None, None]
    return np.einsum("cq,cqid,cqjd->cij", weights, basis, basis)


def assemble_mixed_system(
    mesh: Mesh,
    t_f: float,
    f: Callable[[np.ndarray], np.ndarray] | None = None,
    facet_pressure: np.ndarray | None = None,
    facet_flux: np.ndarray | None = None,
    *,
    symmetric: bool = False,
) -> MixedSystem:
    """Assemble [[A, -B^T], [B, 0]] for RT0 x P0 with the fault flux mass.

    Args:
        t_f: fault transmissibility; fault facets add 1 / (t_f |e|) to A
        f: source term evaluated at points of shape (..., dim)
        facet_pressure: facet-averaged Dirichlet pressure, NaN where not prescribed
        facet_flux: pinned facet fluxes, NaN where free; boundary facets tagged
            no-flow default to zero flux
        symmetric: assemble [[A, B^T], [B, 0]] with the pressure sign flipped
    """
    if not t_f > 0:
        raise ValueError(f"Transmissibility must be positive, got {t_f}")
    nf, nc = mesh.n_facets, mesh.n_cells
    boundary = mesh.facet_cells[:, 1] < 0

    pressure = np.full(nf, np.nan) if facet_pressure is None else np.asarray(facet_pressure, dtype=float).copy()
    flux = np.full(nf, np.nan) if facet_flux is None else np.asarray(facet_flux, dtype=float).copy()
    no_flow = boundary & (mesh.facet_tags == NEUMANN) & np.isnan(flux) & np.isnan(pressure)
    flux[no_flow] = 0.0
    unset = boundary & np.isnan(flux) & np.isnan(pressure)
    if unset.any():
        facet = int(np.flatnonzero(unset)[0])
        tag = "dirichlet" if mesh.facet_tags[facet] == DIRICHLET else str(mesh.facet_tags[facet])
        raise ValueError(f"Missing boundary data on facet {facet} (tag {tag})")

    signs = mesh.cell_facet_signs
    local = rt0_local_mass(mesh) * signs[:, :, None] * signs[:, None, :]
    rows = [np.broadcast_to(mesh.cell_facets[:, :, None], local.shape).ravel()]
    cols = [np.broadcast_to(mesh.cell_facets[:, None, :], local.shape).ravel()]
    vals = [local.ravel()]

    fault = mesh.fault_facets
    rows.append(fault)
    cols.append(fault)
    vals.append(1.0 / (t_f * mesh.facet_measures[fault]))

    cell_ids = np.repeat(np.arange(nc), mesh.dim + 1)
    facet_ids = mesh.cell_facets.ravel()
    div = signs.ravel().astype(float)
    rows += [nf + cell_ids, facet_ids, nf + np.arange(nc)]
    cols += [facet_ids, nf + cell_ids, nf + np.arange(nc)]
    vals += [div, div if symmetric else -div, np.zeros(nc)]

    n = nf + nc
    matrix = as_csr(sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ))

    rhs = np.zeros(n)
    dirichlet = ~np.isnan(pressure) & boundary
    # Boundary normals point outward, so v . nu = +1 on a unit-flux boundary dof
    rhs[np.flatnonzero(dirichlet)] = -pressure[dirichlet]
    if f is not None:
        rule = quadrature_rule(mesh.dim, DEFAULT_DEGREE)
        values = f(physical_points(mesh, rule)) * physical_weights(mesh, rule)
        rhs[nf:] = values.sum(axis=1)

    pinned = np.flatnonzero(~np.isnan(flux))
    pinned_values = flux[pinned]
    free = np.setdiff1d(np.arange(n), pinned)
    reduced = matrix[free][:, free]
    reduced_rhs = rhs[free] - matrix[free][:, pinned] @ pinned_values
    return MixedSystem(
        mesh=mesh,
        t_f=float(t_f),
        matrix=as_csr(reduced),
        rhs=reduced_rhs,
        full_matrix=matrix,
        full_rhs=rhs,
        free_dofs=free,
        pinned_dofs=pinned,
        pinned_values=pinned_values,
        facet_pressure=pressure,
        facet_flux=flux,
        symmetric=symmetric,
    )


# ── Projection and evaluation ──────────────────────────────────────────────

def l2_project_gradient(p_h: FieldSolution) -> FieldSolution:
    """Lumped-mass L2 projection of -grad p_h onto P1-vector."""
    mesh = p_h.mesh
    gradient = cell_gradients(p_h)
    share = np.repeat(mesh.cell_measures / (mesh.dim + 1), mesh.dim + 1)
    nodes = mesh.cells.ravel()
    mass = np.bincount(nodes, weights=share, minlength=mesh.n_vertices)
    values = np.column_stack([
        np.bincount(nodes, weights=share * np.repeat(-gradient[:, k], mesh.dim + 1), minlength=mesh.n_vertices)
        for k in range(mesh.dim)
    ]) / mass[:, None]
    return FieldSolution(FunctionSpace(P1_VECTOR, mesh), values, "velocity")


def rt0_cell_values(field: FieldSolution, cells: np.ndarray, points: np.ndarray) -> np.ndarray:
    mesh = field.mesh
    corners = mesh.vertices[mesh.cells[cells]]
    coeff = mesh.cell_facet_signs[cells] * field.values[mesh.cell_facets[cells]]
    scale = 1.0 / (mesh.dim * mesh.cell_measures[cells])
    return (coeff.sum(axis=1)[:, None] * points - np.einsum("ci,cid->cd", coeff, corners)) * scale[:, None]


def evaluate(field: FieldSolution, points, cells=None, bary=None) -> np.ndarray:
    """Evaluate a field at points; pass cells and barycentrics to skip point location."""
    mesh = field.mesh
    single = np.ndim(points) == (0 if mesh.dim == 1 else 1)
    pts = np.asarray(points, dtype=float).reshape(-1, mesh.dim)
    if cells is None:
        cells, bary = locate_points(mesh, pts)
    else:
        cells = np.asarray(cells)
        bary = np.asarray(bary)

    if field.kind == P1:
        values = np.einsum("pa,pa->p", bary, field.values[mesh.cells[cells]])
    elif field.kind == P1_VECTOR:
        values = np.einsum("pa,pad->pd", bary, field.values[mesh.cells[cells]])
    elif field.kind == P0:
        values = field.values[cells]
    else:
        values = rt0_cell_values(field, cells, pts)
    return values[0] if single else values
