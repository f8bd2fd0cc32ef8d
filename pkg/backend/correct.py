"""Subdomain correction: a small mixed solve around the fault, stitched into the CG fields."""

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from cgreg import CGSolution, solve_cg_2d
from fem import FieldSolution, MixedSystem, assemble_mixed_system
from linalg import GMRES_RESTART, GMRES_TOL
from mesh import Mesh, SubMesh, extract_subdomain, locate_points
from mixed import BoundaryConditions, MixedSolution, solve_mixed_system

Source = Callable[[np.ndarray], np.ndarray]


def build_subdomain_problem(
    sub: SubMesh,
    sol: CGSolution,
    t_f: float,
    f: Source | None = None,
) -> MixedSystem:
    """Mixed system on the subdomain with traces of the CG solution as boundary data.

    Fault-parallel sides get the facet-averaged normal flux of the recovered
    velocity as pinned RT0 dofs; every other boundary facet gets the
    facet-averaged CG pressure as weak Dirichlet data.
    """
    mesh = sub.mesh
    endpoints = sub.vertex_parent[mesh.facets]
    facet_pressure = np.full(mesh.n_facets, np.nan)
    facet_flux = np.full(mesh.n_facets, np.nan)

    # P1 traces are linear along a facet, so the endpoint mean is the facet average
    dirichlet = sub.dirichlet_facets
    facet_pressure[dirichlet] = sol.pressure.values[endpoints[dirichlet]].mean(axis=1)

    flux = sub.flux_facets
    u_mean = sol.velocity.values[endpoints[flux]].mean(axis=1)
    facet_flux[flux] = mesh.facet_measures[flux] * np.einsum("fd,fd->f", u_mean, mesh.facet_normals[flux])

    return assemble_mixed_system(mesh, t_f, f, facet_pressure=facet_pressure, facet_flux=facet_flux)


def solve_correction(
    sub: SubMesh,
    system: MixedSystem,
    *,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
) -> MixedSolution:
    if system.mesh is not sub.mesh:
        raise ValueError("Correction system was not assembled on this subdomain")
    return solve_mixed_system(system, tol=tol, restart=restart, label="Correct")


class StitchedField:
    """Evaluates the subdomain field on subdomain cells and the global field elsewhere."""

    def __init__(self, outer: FieldSolution, inner: FieldSolution, sub: SubMesh, name: str = ""):
        self.outer = outer
        self.inner = inner
        self.sub = sub
        self.name = name or outer.name
        self.kind = "composite"

    @property
    def mesh(self) -> Mesh:
        return self.sub.parent

    def evaluate(self, points, cells=None, bary=None) -> np.ndarray:
        mesh = self.mesh
        single = np.ndim(points) == 1
        pts = np.asarray(points, dtype=float).reshape(-1, mesh.dim)
        if cells is None:
            cells, bary = locate_points(mesh, pts)
        else:
            cells = np.asarray(cells)
            bary = np.asarray(bary)

        child = self.sub.cell_child[cells]
        inside = child >= 0
        values = np.array(self.outer.evaluate(pts, cells=cells, bary=bary), dtype=float)
        if inside.any():
            # Subdomain cells keep the parent's vertex order, so barycentrics carry over
            values[inside] = self.inner.evaluate(pts[inside], cells=child[inside], bary=bary[inside])
        return values[0] if single else values

    def cell_values(self) -> np.ndarray:
        """Values at the parent cell centroids."""
        mesh = self.mesh
        bary = np.full((mesh.n_cells, mesh.dim + 1), 1.0 / (mesh.dim + 1))
        return self.evaluate(mesh.cell_centroids, cells=np.arange(mesh.n_cells), bary=bary)


@dataclass(eq=False)
class CompositeSolution:
    global_solution: CGSolution
    sub_solution: MixedSolution
    sub: SubMesh
    pressure: StitchedField
    velocity: StitchedField
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def mesh(self) -> Mesh:
        return self.sub.parent

    @property
    def dof(self) -> int:
        return self.global_solution.dof + self.sub_solution.dof


def stitch(sol: CGSolution, sub_sol: MixedSolution, sub: SubMesh) -> CompositeSolution:
    if sol.mesh is not sub.parent or sub_sol.mesh is not sub.mesh:
        raise ValueError("Solutions do not live on the given mesh and subdomain")
    return CompositeSolution(
        global_solution=sol,
        sub_solution=sub_sol,
        sub=sub,
        pressure=StitchedField(sol.pressure, sub_sol.pressure, sub, "pressure"),
        velocity=StitchedField(sol.velocity, sub_sol.velocity, sub, "velocity"),
    )


def run_new_method(
    mesh: Mesh,
    t_f: float,
    eps: float,
    bc: BoundaryConditions | None = None,
    f: Source | None = None,
    *,
    eps_tau: float | None = None,
    tol: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
) -> CompositeSolution:
    """Global CG solve, then the subdomain correction, timed per stage."""
    started = time.perf_counter()
    global_solution = solve_cg_2d(mesh, t_f, eps, bc, f, eps_tau=eps_tau, tol=tol, restart=restart)
    time_global = time.perf_counter() - started

    started = time.perf_counter()
    sub = extract_subdomain(mesh)
    system = build_subdomain_problem(sub, global_solution, t_f, f)
    sub_solution = solve_correction(sub, system, tol=tol, restart=restart)
    composite = stitch(global_solution, sub_solution, sub)
    time_sub = time.perf_counter() - started

    composite.timings = {"global": time_global, "sub": time_sub}
    print(
        f"[Correct] t_f={t_f:g}, eps={eps:g}: {global_solution.dof} global + {sub_solution.dof} "
        f"subdomain dofs ({time_global:.2f}s + {time_sub:.2f}s)"
    )
    return composite
