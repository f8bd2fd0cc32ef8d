"""Sparse linear algebra: restarted GMRES, ILU(0), extreme eigenvalues.

Matrices are scipy CSR with sorted, duplicate-free column indices. GMRES is
right-preconditioned so the monitored residual is the true residual of the
original system, and the tolerance is absolute.
"""

import math
import os
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy.io
import scipy.linalg
import scipy.sparse as sp
from dotenv import load_dotenv
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from errors import SolverError

load_dotenv(Path(__file__).parent.parent / ".env")

# ── Configuration ──────────────────────────────────────────────────────────
GMRES_TOL = float(os.getenv("FAULTFLOW_GMRES_TOL", "1e-8"))
GMRES_RESTART = int(os.getenv("FAULTFLOW_GMRES_RESTART", "200"))
DENSE_EIG_LIMIT = int(os.getenv("FAULTFLOW_DENSE_EIG_LIMIT", "5000"))
MAX_ITER_PER_DOF = 50
PIVOT_TOL = 1e-14
SYMMETRY_TOL = 1e-12


@dataclass
class SolveReport:
    iterations: int
    residual: float
    converged: bool
    wall_time: float
    tol: float
    breakdown: bool = False
    message: str = ""
    residual_history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("residual_history")
        return data


def as_csr(A) -> sp.csr_matrix:
    """CSR copy with sorted, unique column indices (explicit zeros kept)."""
    A = sp.csr_matrix(A, dtype=float, copy=True)
    A.sum_duplicates()
    A.sort_indices()
    return A


def check_solve(report: SolveReport, what: str) -> None:
    """Raise SolverError when a solve did not converge."""
    if not report.converged:
        raise SolverError(
            f"{what}: GMRES {report.message or 'did not converge'} after {report.iterations} "
            f"iterations (residual {report.residual:.3e}, tol {report.tol:.1e})",
            report,
        )


# ── ILU(0) ─────────────────────────────────────────────────────────────────

class ILU0Preconditioner:
    """Incomplete LU on the sparsity pattern of A; applies M^-1 by two triangular sweeps."""

    def __init__(self, L: sp.csr_matrix, U: sp.csr_matrix, shifted: list[int]):
        self.L = L
        self.U = U
        self.shifted = shifted
        # Natural ordering without pivoting leaves triangular factors fill-free
        options = {"permc_spec": "NATURAL", "diag_pivot_thresh": 0.0}
        self._lower = splu(L.tocsc(), **options)
        self._upper = splu(U.tocsc(), **options)

    @property
    def shape(self) -> tuple[int, int]:
        return self.L.shape

    def solve(self, r: np.ndarray) -> np.ndarray:
        return self._upper.solve(self._lower.solve(np.asarray(r, dtype=float)))

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(self.shape, matvec=self.solve, dtype=float)


def ilu0(A) -> ILU0Preconditioner:
    """ILU(0) factorization (IKJ variant) restricted to the pattern of A.

    Missing or vanishing pivots are replaced by the row's largest magnitude
    and reported with a RuntimeWarning.
    """
    A = as_csr(A)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"ILU needs a square matrix, got {A.shape}")
    missing = np.flatnonzero(A.diagonal() == 0.0)
    if missing.size:
        # Make every diagonal position structurally present; COO assembly keeps explicit zeros
        coo = A.tocoo()
        diagonal = np.arange(n)
        A = as_csr(sp.coo_matrix(
            (np.concatenate([coo.data, np.zeros(n)]),
             (np.concatenate([coo.row, diagonal]), np.concatenate([coo.col, diagonal]))),
            shape=(n, n),
        ))

    indptr = A.indptr.tolist()
    indices = A.indices.tolist()
    data = A.data.tolist()
    row_scale = [
        max((abs(v) for v in data[indptr[i]:indptr[i + 1]]), default=0.0) or 1.0
        for i in range(n)
    ]
    diag = [0] * n
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            if indices[p] == i:
                diag[i] = p
                break

    shifted = []
    for i in range(n):
        start, end = indptr[i], indptr[i + 1]
        position = {indices[p]: p for p in range(start, end)}
        for p in range(start, diag[i]):
            k = indices[p]
            factor = data[p] / data[diag[k]]
            data[p] = factor
            for q in range(diag[k] + 1, indptr[k + 1]):
                target = position.get(indices[q])
                if target is not None:
                    data[target] -= factor * data[q]
        pivot = data[diag[i]]
        if abs(pivot) <= PIVOT_TOL * row_scale[i]:
            data[diag[i]] = math.copysign(row_scale[i], pivot) if pivot else row_scale[i]
            shifted.append(i)

    if shifted:
        message = f"ILU(0) shifted {len(shifted)} zero pivot(s), first at row {shifted[0]}"
        print(f"[ILU] {message}")
        warnings.warn(message, RuntimeWarning, stacklevel=2)

    factored = sp.csr_matrix((np.array(data), A.indices.copy(), A.indptr.copy()), shape=A.shape)
    lower = sp.tril(factored, k=-1, format="csr") + sp.identity(n, format="csr")
    upper = sp.triu(factored, k=0, format="csr")
    return ILU0Preconditioner(as_csr(lower), as_csr(upper), shifted)


# ── GMRES ──────────────────────────────────────────────────────────────────

def gmres(
    A,
    b: np.ndarray,
    tol_abs: float = GMRES_TOL,
    restart: int = GMRES_RESTART,
    max_iter: int | None = None,
    preconditioner: ILU0Preconditioner | None = None,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Restarted, right-preconditioned GMRES with Givens rotations.

    Returns the iterate and a report; breakdown and non-convergence are
    flagged in the report and printed, never raised.
    """
    A = as_csr(A)
    n = A.shape[0]
    b = np.asarray(b, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"GMRES needs a square matrix, got {A.shape}")
    if b.shape != (n,):
        raise ValueError(f"Right-hand side has shape {b.shape}, expected ({n},)")
    if max_iter is None:
        max_iter = MAX_ITER_PER_DOF * n
    apply_m = preconditioner.solve if preconditioner is not None else (lambda v: v)

    started = time.perf_counter()
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    beta = float(np.linalg.norm(r))
    history = [beta]
    iterations = 0
    breakdown = False
    message = ""

    while beta > tol_abs and iterations < max_iter:
        m = min(restart, max_iter - iterations)
        basis = np.empty((m + 1, n))
        hessenberg = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        basis[0] = r / beta
        k = 0
        invariant = False

        for j in range(m):
            w = A @ apply_m(basis[j])
            # Classical Gram-Schmidt, applied twice
            for _ in range(2):
                coeffs = basis[: j + 1] @ w
                w -= basis[: j + 1].T @ coeffs
                hessenberg[: j + 1, j] += coeffs
            h_next = float(np.linalg.norm(w))
            hessenberg[j + 1, j] = h_next

            for i in range(j):
                upper = cs[i] * hessenberg[i, j] + sn[i] * hessenberg[i + 1, j]
                hessenberg[i + 1, j] = -sn[i] * hessenberg[i, j] + cs[i] * hessenberg[i + 1, j]
                hessenberg[i, j] = upper
            denominator = math.hypot(hessenberg[j, j], hessenberg[j + 1, j])
            if denominator == 0.0:
                breakdown = True
                message = "breakdown (singular Krylov projection)"
                break
            cs[j] = hessenberg[j, j] / denominator
            sn[j] = hessenberg[j + 1, j] / denominator
            hessenberg[j, j] = denominator
            hessenberg[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            k = j + 1
            iterations += 1

            if abs(g[j + 1]) <= tol_abs:
                break
            if h_next <= 1e-14 * denominator:
                invariant = True
                break
            basis[j + 1] = w / h_next

        if k > 0:
            y = scipy.linalg.solve_triangular(hessenberg[:k, :k], g[:k])
            x += apply_m(basis[:k].T @ y)
        r = b - A @ x
        beta = float(np.linalg.norm(r))
        history.append(beta)
        if breakdown:
            break
        if invariant and beta > tol_abs:
            breakdown = True
            message = "breakdown (invariant Krylov subspace without convergence)"
            break

    converged = beta <= tol_abs
    if not converged and not message:
        message = f"no convergence within {max_iter} iterations"
    wall_time = time.perf_counter() - started
    report = SolveReport(
        iterations=iterations,
        residual=beta,
        converged=converged,
        wall_time=wall_time,
        tol=tol_abs,
        breakdown=breakdown,
        message=message,
        residual_history=history,
    )
    if not converged:
        print(f"[GMRES] n={n}: {message} (residual {beta:.3e} after {iterations} iterations)")
    return x, report


# ── Spectra ────────────────────────────────────────────────────────────────

@dataclass
class SpectrumResult:
    values: np.ndarray
    symmetrized: bool
    method: str


def eigs_extreme(A, k: int, *, symmetric: bool | None = None) -> SpectrumResult:
    """k largest eigenvalues in descending order.

    Dense path (n <= DENSE_EIG_LIMIT) symmetrizes a nonsymmetric A as (A + A^T)/2
    and reports it; larger matrices need symmetric=True for the Lanczos path.
    """
    A = as_csr(A)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"Eigenvalues need a square matrix, got {A.shape}")
    k = max(1, min(int(k), n))

    if n <= DENSE_EIG_LIMIT:
        dense = A.toarray()
        scale = float(np.abs(dense).max()) or 1.0
        symmetrized = float(np.abs(dense - dense.T).max()) > SYMMETRY_TOL * scale
        if symmetrized:
            dense = 0.5 * (dense + dense.T)
            warnings.warn("Spectrum of nonsymmetric matrix taken from its symmetric part", RuntimeWarning, stacklevel=2)
        values = scipy.linalg.eigvalsh(dense, subset_by_index=[n - k, n - 1])[::-1]
        return SpectrumResult(values=values, symmetrized=symmetrized, method="dense")

    if not symmetric:
        raise ValueError(
            f"Matrix of size {n} exceeds the dense limit {DENSE_EIG_LIMIT}; pass symmetric=True for Lanczos"
        )
    values = eigsh(A, k=min(k, n - 1), which="LA", return_eigenvectors=False)
    return SpectrumResult(values=np.sort(values)[::-1], symmetrized=False, method="lanczos")


def export_matrix_market(path: Path, A, comment: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scipy.io.mmwrite(str(path), as_csr(A), comment=comment)
    return path if path.suffix == ".mtx" else path.with_name(path.name + ".mtx")
