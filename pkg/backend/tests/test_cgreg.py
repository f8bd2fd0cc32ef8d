import numpy as np
import pytest
import scipy.sparse as sp

from cgreg import (
    apply_dirichlet_rows,
    fault_normal_velocity,
    recover_velocity_1d,
    solve_cg_1d,
    solve_cg_2d,
    solve_regularized_source_1d,
)
from mesh import Mesh, generate_interval_mesh
from mixed import BoundaryConditions


def test_apply_dirichlet_rows():
    A = sp.csr_matrix(np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]))
    matrix, rhs = apply_dirichlet_rows(A, np.ones(3), np.array([0, 2]), np.array([5.0, -5.0]))

    np.testing.assert_array_equal(matrix.toarray(), [[1.0, 0.0, 0.0], [-1.0, 2.0, -1.0], [0.0, 0.0, 1.0]])
    np.testing.assert_array_equal(rhs, [5.0, 1.0, -5.0])
    assert A[0, 1] == -1.0


def test_1d_pressure_matches_regularized_solution(problem_1d, interval_mesh):
    eps = 0.5
    sol = solve_cg_1d(interval_mesh, problem_1d.t_f, eps, problem_1d.p0, problem_1d.pL, tol=1e-12)
    x = interval_mesh.vertices[:, 0]

    assert sol.dof == 401
    assert sol.pressure.values[0] == pytest.approx(1.0)
    assert sol.pressure.values[-1] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(sol.pressure.values, problem_1d.regularized_exact_pressure(x, eps), atol=2e-3)


def test_1d_velocity_is_constant(problem_1d, interval_mesh):
    sol = solve_cg_1d(interval_mesh, problem_1d.t_f, 0.5, problem_1d.p0, problem_1d.pL, tol=1e-12)
    u = sol.velocity.values[:, 0]

    np.testing.assert_allclose(u[1:-1] / problem_1d.exact_velocity(), 1.0, atol=1e-2)
    np.testing.assert_allclose(recover_velocity_1d(sol), u)


def test_1d_velocity_at_small_eps(problem_1d):
    eps = 0.01
    mesh = generate_interval_mesh(problem_1d.L, 20000, problem_1d.x_gamma, t_f=problem_1d.t_f)
    sol = solve_cg_1d(mesh, problem_1d.t_f, eps, problem_1d.p0, problem_1d.pL, tol=1e-12)
    u = sol.velocity.values[1:-1, 0]

    assert np.max(np.abs(u / problem_1d.exact_velocity() - 1.0)) < 1e-2
    p_eps = problem_1d.regularized_exact_pressure(mesh.vertices[:, 0], eps)
    assert np.max(np.abs(sol.pressure.values - p_eps)) < 5e-3


def test_source_form_agrees_with_transport_form(problem_1d, interval_mesh):
    eps = 0.5
    u = problem_1d.exact_velocity()
    source = solve_regularized_source_1d(interval_mesh, problem_1d.t_f, eps, u, tol=1e-12)
    transport = solve_cg_1d(interval_mesh, problem_1d.t_f, eps, tol=1e-12)
    x = interval_mesh.vertices[:, 0]

    np.testing.assert_allclose(source.pressure.values, problem_1d.regularized_exact_pressure(x, eps), atol=1e-5)
    np.testing.assert_allclose(source.pressure.values, transport.pressure.values, atol=2e-3)


def test_1d_solvers_reject_2d_mesh(rect_mesh):
    with pytest.raises(ValueError):
        solve_cg_1d(rect_mesh, 0.2, 0.5)
    with pytest.raises(ValueError):
        solve_cg_2d(generate_interval_mesh(1.0, 10, 0.5), 0.2, 0.1)


def test_mesh_without_fault_is_rejected():
    mesh = Mesh.from_arrays(np.linspace(0.0, 1.0, 5), [[0, 1], [1, 2], [2, 3], [3, 4]])
    with pytest.raises(ValueError, match="no fault"):
        solve_cg_1d(mesh, 0.2, 0.1)


def test_2d_linear_flow_without_fault_resistance(rect_mesh_factory):
    mesh = rect_mesh_factory(t_f=1e6)
    sol = solve_cg_2d(mesh, 1e6, 3 * mesh.h_f, BoundaryConditions.inlet_outlet(1.0, 0.0), tol=1e-11)

    assert sol.dof == mesh.n_vertices
    np.testing.assert_allclose(sol.pressure.values, 1.0 - mesh.vertices[:, 0] / 2.0, atol=1e-4)
    np.testing.assert_allclose(sol.velocity.values, np.tile([0.5, 0.0], (mesh.n_vertices, 1)), atol=1e-4)

    profile = fault_normal_velocity(sol)
    assert np.all(np.diff(profile.points[:, 1]) > 0)
    np.testing.assert_allclose(profile.u_n, 0.5, atol=1e-4)


def test_2d_fault_resistance_lowers_fault_velocity(rect_mesh):
    eps = 3 * rect_mesh.h_f
    open_fault = fault_normal_velocity(solve_cg_2d(rect_mesh, 2.0, eps))
    sealing = fault_normal_velocity(solve_cg_2d(rect_mesh, 0.02, eps))

    assert np.all(sealing.u_n > 0)
    assert sealing.u_n.mean() < open_fault.u_n.mean()


def test_2d_warns_when_eps_below_fault_mesh_size(rect_mesh):
    with pytest.warns(RuntimeWarning, match="below the fault mesh size"):
        solve_cg_2d(rect_mesh, 2.0, 0.5 * rect_mesh.h_f)


def test_1d_fault_velocity_matches_nodal_recovery(problem_1d, interval_mesh):
    sol = solve_cg_1d(interval_mesh, problem_1d.t_f, 0.5, tol=1e-12)
    profile = fault_normal_velocity(sol)
    node = int(np.argmin(np.abs(interval_mesh.vertices[:, 0] - problem_1d.x_gamma)))

    assert profile.u_n.shape == (1,)
    assert profile.u_n[0] == pytest.approx(sol.velocity.values[node, 0], abs=1e-10)
