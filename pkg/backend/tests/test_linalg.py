import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

import linalg
from errors import SolverError
from linalg import as_csr, check_solve, eigs_extreme, export_matrix_market, gmres, ilu0


def laplacian_1d(n: int) -> sp.csr_matrix:
    return sp.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(n, n), format="csr")


def laplacian_2d(m: int) -> sp.csr_matrix:
    identity = sp.identity(m)
    return as_csr(sp.kron(identity, laplacian_1d(m)) + sp.kron(laplacian_1d(m), identity))


def convection_diffusion(n: int) -> sp.csr_matrix:
    return sp.diags([-1.3, 2.0, -0.7], [-1, 0, 1], shape=(n, n), format="csr")


def test_gmres_without_preconditioner():
    A = laplacian_1d(50)
    b = np.ones(50)
    x, report = gmres(A, b, tol_abs=1e-10)

    assert report.converged
    assert report.residual <= 1e-10
    assert np.linalg.norm(b - A @ x) <= 1e-10
    np.testing.assert_allclose(x, spsolve(A.tocsc(), b), atol=1e-6)


def test_gmres_on_two_by_two():
    A = sp.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
    b = np.array([1.0, 2.0])
    x, report = gmres(A, b, tol_abs=1e-12)

    assert report.converged
    np.testing.assert_allclose(x, [1.0 / 11.0, 7.0 / 11.0], rtol=1e-10)
    assert np.linalg.norm(b - A @ x) <= 1e-10


def test_exact_ilu_converges_in_one_step():
    A = convection_diffusion(200)
    b = np.linspace(0.0, 1.0, 200)
    x, report = gmres(A, b, tol_abs=1e-10, preconditioner=ilu0(A))

    assert report.converged
    assert report.iterations <= 2
    np.testing.assert_allclose(A @ x, b, atol=1e-9)


def test_ilu0_matches_matrix_on_its_pattern():
    A = laplacian_2d(5)
    factors = ilu0(A)
    product = (factors.L @ factors.U).toarray()
    dense = A.toarray()
    pattern = dense != 0.0

    assert np.allclose(np.diag(factors.L.toarray()), 1.0)
    assert sp.tril(factors.U, k=-1).nnz == 0
    np.testing.assert_allclose(product[pattern], dense[pattern], atol=1e-12)
    assert factors.shifted == []


def test_ilu0_shifts_zero_pivot_with_warning():
    A = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.warns(RuntimeWarning, match="zero pivot"):
        factors = ilu0(A)
    assert factors.shifted == [0]


def test_preconditioned_gmres_on_2d_laplacian():
    A = laplacian_2d(20)
    b = np.ones(A.shape[0])
    x, report = gmres(A, b, tol_abs=1e-9, restart=30, preconditioner=ilu0(A))
    unpreconditioned = gmres(A, b, tol_abs=1e-9, restart=30)[1]

    assert report.converged
    assert report.iterations < unpreconditioned.iterations
    assert report.residual_history[-1] == pytest.approx(report.residual)
    np.testing.assert_allclose(x, spsolve(A.tocsc(), b), atol=1e-7)


def test_gmres_reports_non_convergence():
    A = laplacian_1d(50)
    _, report = gmres(A, np.ones(50), tol_abs=1e-12, max_iter=2)

    assert not report.converged
    assert report.iterations == 2
    assert "no convergence" in report.message
    with pytest.raises(SolverError) as excinfo:
        check_solve(report, "test solve")
    assert excinfo.value.report is report


def test_gmres_zero_rhs_returns_immediately():
    x, report = gmres(laplacian_1d(10), np.zeros(10))
    assert report.converged
    assert report.iterations == 0
    assert not x.any()


def test_gmres_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        gmres(laplacian_1d(5), np.ones(4))
    with pytest.raises(ValueError):
        gmres(sp.csr_matrix(np.ones((2, 3))), np.ones(2))


def test_solve_report_dict_omits_history():
    _, report = gmres(laplacian_1d(10), np.ones(10))
    data = report.to_dict()
    assert "residual_history" not in data
    assert data["converged"] is True


def test_dense_eigenvalues_descending():
    result = eigs_extreme(sp.diags(np.arange(1.0, 11.0)), 3)
    assert result.method == "dense"
    assert not result.symmetrized
    np.testing.assert_allclose(result.values, [10.0, 9.0, 8.0])


def test_nonsymmetric_spectrum_is_symmetrized():
    A = sp.csr_matrix(np.array([[2.0, 1.0], [0.0, 1.0]]))
    with pytest.warns(RuntimeWarning, match="symmetric part"):
        result = eigs_extreme(A, 1)
    assert result.symmetrized
    assert result.values[0] == pytest.approx((3.0 + np.sqrt(2.0)) / 2.0)


def test_lanczos_path_above_dense_limit(monkeypatch):
    monkeypatch.setattr(linalg, "DENSE_EIG_LIMIT", 5)
    A = sp.diags(np.arange(1.0, 31.0), format="csr")

    result = eigs_extreme(A, 3, symmetric=True)
    assert result.method == "lanczos"
    np.testing.assert_allclose(result.values, [30.0, 29.0, 28.0], rtol=1e-8)
    with pytest.raises(ValueError, match="dense limit"):
        eigs_extreme(A, 3)


def test_export_matrix_market(tmp_path):
    A = laplacian_1d(6)
    path = export_matrix_market(tmp_path / "laplace.mtx", A, comment="1D Laplacian")

    assert path == tmp_path / "laplace.mtx"
    np.testing.assert_allclose(scipy.io.mmread(str(path)).toarray(), A.toarray())
