"""Continuous-Galerkin solve of the regularized pressure equation.

The fault is replaced by the transport terms of the regularized delta, so the
pressure is a single continuous P1 field. In 1D the model is exact and the
velocity follows in closed form; in 2D the velocity is the projected Darcy
flux and is corrected near the fault afterwards (see correct.py).
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from fem import (
    FAULT_BAND_DEGREE,
    P1_VECTOR,
    FieldSolution,
    FunctionSpace,
    assemble_cg_fault_terms,
    assemble_p1_load,
    assemble_p1_stiffness,
    cell_gradients,
    l2_project_gradient,
    p1_field,
)
from linalg import GMRES_RESTART, GMRES_TOL, SolveReport, as_csr, check_solve, gmres, ilu0
from mesh import Mesh
from mixed import BoundaryConditions
from regdelta import RegularizedDelta

Source = Callable[[np.ndarray], np.ndarray]


@dataclass(eq=False)
class CGSolution:
    pressure: FieldSolution
    velocity: FieldSolution
    eps: float
    report: SolveReport
    mesh: Mesh
    t_f: float
    regdelta: RegularizedDelta | None = None

    @property
    def dof(self) -> int:
        return self.mesh.n_vertices


@dataclass
class FaultVelocityProfile:
    """Normal velocity sampled along the fault (facet midpoints, sorted along the fault)."""

    points: np.ndarray
    u_n: np.ndarray


def _regdelta(mesh: Mesh, t_f: float, eps: float, eps_tau: float | None = None) -> RegularizedDelta:
    if mesh.fault is None:
        raise ValueError("Mesh carries no fault geometry")
    if not t_f > 0:
        raise ValueError(f"Transmissibility must be positive, got {t_f}")
    return RegularizedDelta(eps=eps, fault=mesh.fault.with_transmissibility(t_f), eps_tau=eps_tau)


def apply_dirichlet_rows(A, rhs: np.ndarray, nodes: np.ndarray, values: np.ndarray) -> tuple[sp.csr_matrix, np.ndarray]:
    """Replace the rows of constrained nodes by identity rows with the prescribed values."""
    A = as_csr(A)
    n = A.shape[0]
    mask = np.zeros(n, dtype=bool)
    mask[nodes] = True
    rows = np.repeat(np.arange(n), np.diff(A.indptr))
    A.data[mask[rows]] = 0.0
    A = as_csr(A + sp.diags(mask.astype(float), format="csr"))
    A.eliminate_zeros()
    rhs = np.array(rhs, dtype=float)
    rhs[nodes] = values
    return A, rhs


def assemble_cg_operator(mesh: Mesh, regdelta: RegularizedDelta) -> sp.csr_matrix:
    """Stiffness plus fault transport terms, before boundary conditions."""
    return as_csr(assemble_p1_stiffness(mesh) + assemble_cg_fault_terms(mesh, regdelta))


def free_block(A, nodes: np.ndarray) -> sp.csr_matrix:
    """Rows and columns of the nodes not listed in `nodes`."""
    A = as_csr(A)
    free = np.setdiff1d(np.arange(A.shape[0]), nodes)
    return as_csr(A[free][:, free])


def assemble_cg_system(
    mesh: Mesh,
    regdelta: RegularizedDelta,
    nodes: np.ndarray,
    values: np.ndarray,
    f: Source | None = None,
) -> tuple[sp.csr_matrix, np.ndarray]:
    """Stiffness plus fault transport terms, load from f, strong Dirichlet rows."""
    matrix = assemble_cg_operator(mesh, regdelta)
    rhs = np.zeros(mesh.n_vertices) if f is None else assemble_p1_load(mesh, f, FAULT_BAND_DEGREE)
    return apply_dirichlet_rows(matrix, rhs, nodes, values)


def _solve(matrix, rhs: np.ndarray, what: str, tol: float, restart: int) -> tuple[np.ndarray, SolveReport]:
    x, report = gmres(matrix, rhs, tol_abs=tol, restart=restart, preconditioner=ilu0(matrix))
    check_solve(report, what)
    print(
        f"[CG] {what}: {rhs.size} dofs solved in {report.wall_time:.2f}s "
        f"({report.iterations} iterations, residual {report.residual:.1e})"
    )
    return x, report


# ── 1D ─────────────────────────────────────────────────────────────────────

def _nodal_mean_gradient(pressure: FieldSolution) -> np.ndarray:
    mesh = pressure.mesh
    gradient = cell_gradients(pressure)[:, 0]
    nodes = mesh.cells.ravel()
    total = np.bincount(nodes, weights=np.repeat(gradient, 2), minlength=mesh.n_vertices)
    return total / np.bincount(nodes, minlength=mesh.n_vertices)


def recover_velocity_1d(sol: CGSolution, t_f: float | None = None, eps: float | None = None) -> np.ndarray:
    """Nodal u = -t_f / (t_f + delta) * dp/dx, dp/dx averaged over the adjacent cells."""
    t_f = sol.t_f if t_f is None else t_f
    eps = sol.eps if eps is None else eps
    mesh = sol.mesh
    regdelta = _regdelta(mesh, t_f, eps)
    delta = regdelta.delta_n(mesh.vertices[:, 0])
    return -t_f / (t_f + delta) * _nodal_mean_gradient(sol.pressure)


def _finish_1d(mesh: Mesh, pressure: np.ndarray, t_f: float, eps: float, report: SolveReport, regdelta) -> CGSolution:
    sol = CGSolution(
        pressure=p1_field(mesh, pressure, "pressure"),
        velocity=FieldSolution(FunctionSpace(P1_VECTOR, mesh), np.zeros((mesh.n_vertices, 1)), "velocity"),
        eps=float(eps),
        report=report,
        mesh=mesh,
        t_f=float(t_f),
        regdelta=regdelta,
    )
    sol.velocity.values[:, 0] = recover_velocity_1d(sol)
    return sol


def solve_cg_1d(
    mesh: Mesh,
    t_f: float,
    eps: float,
    p0: float = 1.0,
    pL: float = 0.0,
    *,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
) -> CGSolution:
    """-p'' + delta'/(t_f + delta) p' = 0 with p(0) = p0, p(L) = pL."""
    if mesh.dim != 1:
        raise ValueError(f"solve_cg_1d needs a 1D mesh, got dimension {mesh.dim}")
    regdelta = _regdelta(mesh, t_f, eps)
    nodes, values = BoundaryConditions.inlet_outlet(p0, pL).node_values(mesh)
    matrix, rhs = assemble_cg_system(mesh, regdelta, nodes, values)
    pressure, report = _solve(matrix, rhs, f"1D regularized solve (eps={eps:g})", tol, restart)
    return _finish_1d(mesh, pressure, t_f, eps, report, regdelta)


def solve_regularized_source_1d(
    mesh: Mesh,
    t_f: float,
    eps: float,
    u_n: float,
    p0: float = 1.0,
    pL: float = 0.0,
    *,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
) -> CGSolution:
    """-p'' = delta' u_n / t_f for a prescribed fault flux u_n."""
    if mesh.dim != 1:
        raise ValueError(f"solve_regularized_source_1d needs a 1D mesh, got dimension {mesh.dim}")
    regdelta = _regdelta(mesh, t_f, eps)
    nodes, values = BoundaryConditions.inlet_outlet(p0, pL).node_values(mesh)

    def source(points: np.ndarray) -> np.ndarray:
        return regdelta.ddelta_eps_dn(points) * (u_n / t_f)

    rhs = assemble_p1_load(mesh, source, FAULT_BAND_DEGREE)
    matrix, rhs = apply_dirichlet_rows(assemble_p1_stiffness(mesh), rhs, nodes, values)
    pressure, report = _solve(matrix, rhs, f"1D source-form solve (eps={eps:g})", tol, restart)
    return _finish_1d(mesh, pressure, t_f, eps, report, regdelta)


# ── 2D ─────────────────────────────────────────────────────────────────────

def solve_cg_2d(
    mesh: Mesh,
    t_f: float,
    eps: float,
    bc: BoundaryConditions | None = None,
    f: Source | None = None,
    *,
    eps_tau: float | None = None,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
) -> CGSolution:
    """Regularized pressure by P1 CG; velocity is the projected Darcy flux."""
    if mesh.dim != 2:
        raise ValueError(f"solve_cg_2d needs a 2D mesh, got dimension {mesh.dim}")
    bc = bc or BoundaryConditions()
    regdelta = _regdelta(mesh, t_f, eps, eps_tau)
    nodes, values = bc.node_values(mesh)
    matrix, rhs = assemble_cg_system(mesh, regdelta, nodes, values, f)
    pressure, report = _solve(matrix, rhs, f"2D regularized solve (eps={eps:g})", tol, restart)
    p_h = p1_field(mesh, pressure, "pressure")
    return CGSolution(
        pressure=p_h,
        velocity=l2_project_gradient(p_h),
        eps=float(eps),
        report=report,
        mesh=mesh,
        t_f=float(t_f),
        regdelta=regdelta,
    )


def fault_normal_velocity(sol: CGSolution) -> FaultVelocityProfile:
    """u_n = -t_f / (t_f + delta) dp/dn on the fault, dp/dn averaged over both sides of each facet."""
    mesh = sol.mesh
    regdelta = sol.regdelta or _regdelta(mesh, sol.t_f, sol.eps)
    facets = mesh.fault_facets
    dp_dn = cell_gradients(sol.pressure)[mesh.facet_cells[facets], 0].mean(axis=1)
    points = mesh.facet_midpoints[facets]
    u_n = -sol.t_f / (sol.t_f + regdelta.delta_eps(points)) * dp_dn
    if mesh.dim == 2:
        order = np.argsort(points[:, 1], kind="stable")
        points, u_n = points[order], u_n[order]
    return FaultVelocityProfile(points=points, u_n=u_n)
