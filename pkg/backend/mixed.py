"""Full-domain mixed RT0 x P0 solver (baseline method and ground-truth generator)."""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from fem import P0, RT0, FieldSolution, FunctionSpace, MixedSystem, assemble_mixed_system, physical_points, physical_weights, quadrature_rule
from linalg import GMRES_RESTART, GMRES_TOL, SolveReport, check_solve, gmres, ilu0
from mesh import DIRICHLET, INLET_ID, OUTLET_ID, Mesh

Source = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BoundaryConditions:
    """Dirichlet pressure per boundary id; no-flow facets need no data."""

    values: dict[int, float] = field(default_factory=lambda: {INLET_ID: 1.0, OUTLET_ID: 0.0})

    @classmethod
    def inlet_outlet(cls, p_in: float = 1.0, p_out: float = 0.0) -> "BoundaryConditions":
        return cls({INLET_ID: float(p_in), OUTLET_ID: float(p_out)})

    def pressure(self, boundary_id: int) -> float:
        try:
            return self.values[int(boundary_id)]
        except KeyError:
            raise ValueError(f"No Dirichlet value for boundary id {boundary_id}") from None

    def facet_pressure(self, mesh: Mesh) -> np.ndarray:
        """Prescribed pressure on Dirichlet facets, NaN elsewhere."""
        pressure = np.full(mesh.n_facets, np.nan)
        for facet in np.flatnonzero(mesh.facet_tags == DIRICHLET):
            pressure[facet] = self.pressure(mesh.facet_boundary_ids[facet])
        return pressure

    def node_values(self, mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
        """Vertices on Dirichlet facets and their prescribed pressures."""
        values = np.full(mesh.n_vertices, np.nan)
        for facet in np.flatnonzero(mesh.facet_tags == DIRICHLET):
            values[mesh.facets[facet]] = self.pressure(mesh.facet_boundary_ids[facet])
        nodes = np.flatnonzero(~np.isnan(values))
        return nodes, values[nodes]


@dataclass(eq=False)
class MixedSolution:
    pressure: FieldSolution
    velocity: FieldSolution
    report: SolveReport
    mesh: Mesh
    t_f: float
    system: MixedSystem | None = None

    @property
    def dof(self) -> int:
        return self.mesh.n_cells + self.mesh.n_facets


@dataclass
class FaultDiagnostics:
    facets: np.ndarray
    u_n: np.ndarray
    jump: np.ndarray
    defect: np.ndarray
    l2_defect: float
    l2_jump: float
    total_flux: float


def solve_mixed_system(
    system: MixedSystem,
    *,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
    label: str = "Mixed",
) -> MixedSolution:
    """GMRES + ILU(0) on an assembled saddle system; raises SolverError on failure."""
    preconditioner = ilu0(system.matrix)
    x, report = gmres(system.matrix, system.rhs, tol_abs=tol, restart=restart, preconditioner=preconditioner)
    check_solve(report, f"{label} solve ({system.n_dofs} dofs)")
    flux, pressure = system.expand(x)
    mesh = system.mesh
    print(
        f"[{label}] {system.n_dofs} dofs solved in {report.wall_time:.2f}s "
        f"({report.iterations} iterations, residual {report.residual:.1e})"
    )
    return MixedSolution(
        pressure=FieldSolution(FunctionSpace(P0, mesh), pressure, "pressure"),
        velocity=FieldSolution(FunctionSpace(RT0, mesh), flux, "velocity"),
        report=report,
        mesh=mesh,
        t_f=system.t_f,
        system=system,
    )


def solve_mixed(
    mesh: Mesh,
    t_f: float,
    bc: BoundaryConditions | None = None,
    f: Source | None = None,
    *,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
) -> MixedSolution:
    bc = bc or BoundaryConditions()
    system = assemble_mixed_system(mesh, t_f, f, facet_pressure=bc.facet_pressure(mesh))
    return solve_mixed_system(system, tol=tol, restart=restart)


def fault_facet_diagnostics(sol: MixedSolution) -> FaultDiagnostics:
    """Per fault facet: u.n along +x, the jump p(left) - p(right), and u.n - t_f * jump."""
    mesh = sol.mesh
    facets = mesh.fault_facets
    measures = mesh.facet_measures[facets]
    u_n = sol.velocity.values[facets] / measures * mesh.facet_normals[facets, 0]

    c0, c1 = mesh.facet_cells[facets].T
    c0_left = mesh.cell_centroids[c0, 0] < mesh.fault.y_n
    p = sol.pressure.values
    p_left = np.where(c0_left, p[c0], p[c1])
    p_right = np.where(c0_left, p[c1], p[c0])
    jump = p_left - p_right
    defect = u_n - sol.t_f * jump
    return FaultDiagnostics(
        facets=facets,
        u_n=u_n,
        jump=jump,
        defect=defect,
        l2_defect=float(np.sqrt(np.sum(defect**2 * measures))),
        l2_jump=float(np.sqrt(np.sum(jump**2 * measures))),
        total_flux=float(np.sum(u_n * measures)),
    )


def cell_conservation(sol: MixedSolution, f: Source | None = None) -> np.ndarray:
    """Net outward flux of each cell minus its source integral."""
    mesh = sol.mesh
    net = np.sum(mesh.cell_facet_signs * sol.velocity.values[mesh.cell_facets], axis=1)
    if f is None:
        return net
    rule = quadrature_rule(mesh.dim, 2)
    return net - np.sum(f(physical_points(mesh, rule)) * physical_weights(mesh, rule), axis=1)
