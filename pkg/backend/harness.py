"""Experiment layer: error measurement, convergence ladders, spectra, profiles."""

import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from analytic1d import Analytic1DProblem
from cgreg import assemble_cg_operator, free_block, solve_cg_1d, solve_cg_2d
from correct import run_new_method
from errors import ConfigError
from fem import assemble_mixed_system, physical_points, physical_weights, quadrature_rule
from linalg import GMRES_RESTART, GMRES_TOL, eigs_extreme
from mesh import FaultGeometry, Mesh, generate_interval_mesh, generate_rect_mesh
from mixed import BoundaryConditions, MixedSolution, solve_mixed
from regdelta import BAND_WIDTHS, RegularizedDelta
from results_store import DATA_DIR, save_json, write_csv

load_dotenv(Path(__file__).parent.parent / ".env")

# ── Configuration ──────────────────────────────────────────────────────────
WORKERS = int(os.getenv("FAULTFLOW_WORKERS", "1"))
GROUND_TRUTH_H = float(os.getenv("FAULTFLOW_GROUND_TRUTH_H", "6.25e-3"))

METHODS = ("mixed", "cg", "cg+correction")
H_F_RATIO = 0.4  # h : h_f = 5 : 2
SUBDOMAIN_CELLS = 20  # L_s = 20 h_f
ERROR_DEGREE = 4
ERROR_HEADER = ["h", "dof", "time_global", "time_sub", "e_p", "e_u"]
CENTERLINE_OFFSET = 1e-9


@dataclass
class ExperimentConfig:
    dim: int = 2
    Lx: float = 2.0
    Ly: float = 1.0
    fault_x: float = 1.0
    fault_y_min: float = 0.3
    fault_y_max: float = 0.7
    t_f: float = 2.0
    p_in: float = 1.0
    p_out: float = 0.0
    method: str | None = None  # cg+correction in 2D, cg in 1D
    ladder: list[float] = field(default_factory=lambda: [0.1, 0.05, 0.025])
    eps_multipliers: list[float] = field(default_factory=lambda: [3.0])
    ground_truth_h: float = GROUND_TRUTH_H
    tol: float = GMRES_TOL
    restart: int = GMRES_RESTART
    workers: int = WORKERS
    out_dir: str = ""
    # Spectrum study
    t_f_sweep: list[float] = field(default_factory=lambda: [2.0, 0.2, 0.02, 0.002])
    spectrum_h_mixed: float = 0.25
    spectrum_h_cg: float = 0.05
    spectrum_k_mixed: int = 80
    spectrum_k_cg: int = 1000
    # Centerline sampling and 1D profiles
    centerline_y: float = 0.5
    centerline_points: int = 201
    profile_eps: list[float] = field(default_factory=lambda: [1.0, 0.5, 0.01])

    def __post_init__(self):
        if self.method is None:
            self.method = "cg" if self.dim == 1 else "cg+correction"
        self.validate()

    def validate(self) -> None:
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if self.dim == 1 and self.method == "cg+correction":
            raise ConfigError("1D runs have no subdomain correction; use method 'cg' or 'mixed'")
        if not self.t_f > 0:
            raise ConfigError(f"t_f must be positive, got {self.t_f}")
        if not self.ladder or any(h <= 0 for h in self.ladder):
            raise ConfigError(f"Mesh ladder must be a non-empty list of positive sizes, got {self.ladder}")
        if any(b >= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError(f"Mesh ladder must be strictly decreasing, got {self.ladder}")
        if self.dim == 2 and not self.ground_truth_h < min(self.ladder) / 2:
            raise ConfigError(
                f"Ground-truth h={self.ground_truth_h} must be below half the finest ladder h={min(self.ladder)}"
            )
        if not self.eps_multipliers or any(k <= 0 for k in self.eps_multipliers):
            raise ConfigError(f"eps multipliers must be positive, got {self.eps_multipliers}")
        if any(t <= 0 for t in self.t_f_sweep) or any(e <= 0 for e in self.profile_eps):
            raise ConfigError("t_f sweep and profile eps values must be positive")
        if not (self.spectrum_h_mixed > 0 and self.spectrum_h_cg > 0):
            raise ConfigError("Spectrum mesh sizes must be positive")
        if not (self.tol > 0 and self.restart > 0 and self.workers > 0):
            raise ConfigError("tol, restart and workers must be positive")
        if not 0.0 < self.fault_x < self.Lx:
            raise ConfigError(f"Fault x={self.fault_x} must lie strictly inside (0, {self.Lx})")
        if self.dim == 2 and not 0.0 < self.fault_y_min < self.fault_y_max < self.Ly:
            raise ConfigError(
                f"Fault extent [{self.fault_y_min}, {self.fault_y_max}] must lie strictly inside (0, {self.Ly})"
            )

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"Invalid config: {exc}") from exc

    @classmethod
    def from_json(cls, path: Path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"Config file {path} must hold a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def fault(self) -> FaultGeometry:
        if self.dim == 1:
            return FaultGeometry(dim=1, y_n=self.fault_x, t_f=self.t_f)
        return FaultGeometry(
            dim=2, y_n=self.fault_x, t_f=self.t_f, y_tau_min=self.fault_y_min, y_tau_max=self.fault_y_max
        )

    def boundary_conditions(self) -> BoundaryConditions:
        return BoundaryConditions.inlet_outlet(self.p_in, self.p_out)

    def analytic(self) -> Analytic1DProblem:
        return Analytic1DProblem(L=self.Lx, x_gamma=self.fault_x, t_f=self.t_f, p0=self.p_in, pL=self.p_out)

    def output_dir(self) -> Path:
        out = Path(self.out_dir) if self.out_dir else DATA_DIR / "results"
        out.mkdir(parents=True, exist_ok=True)
        return out


@dataclass
class ErrorRow:
    h: float
    dof: int
    time_global: float
    time_sub: float
    e_p: float
    e_u: float
    eps_multiplier: float | None = None

    def as_csv_row(self) -> list:
        return [self.h, self.dof, self.time_global, self.time_sub, self.e_p, self.e_u]


@dataclass
class ConvergenceResult:
    rows: dict[str, list[ErrorRow]]
    rates: dict[str, dict[str, float]]
    paths: list[Path]


# ── Errors and rates ───────────────────────────────────────────────────────

def _values(obj, points: np.ndarray, mesh: Mesh, cells: np.ndarray, bary: np.ndarray) -> np.ndarray:
    if hasattr(obj, "evaluate"):
        if obj.mesh is mesh:
            return np.asarray(obj.evaluate(points, cells=cells, bary=bary), dtype=float)
        return np.asarray(obj.evaluate(points), dtype=float)
    return np.asarray(obj(points), dtype=float)


def l2_error(field, reference, *, mesh: Mesh | None = None, degree: int = ERROR_DEGREE) -> float:
    """L2 norm of field - reference, integrated over the cells of the reference mesh.

    Either argument may be a field with .evaluate or a callable of points;
    `mesh` overrides the integration mesh.
    """
    mesh = mesh or getattr(reference, "mesh", None) or getattr(field, "mesh", None)
    if mesh is None:
        raise ValueError("l2_error needs an integration mesh")
    rule = quadrature_rule(mesh.dim, degree)
    n_points = rule.weights.size
    points = physical_points(mesh, rule).reshape(-1, mesh.dim)
    weights = physical_weights(mesh, rule).ravel()
    cells = np.repeat(np.arange(mesh.n_cells), n_points)
    bary = np.tile(rule.points, (mesh.n_cells, 1))

    diff = _values(field, points, mesh, cells, bary) - _values(reference, points, mesh, cells, bary)
    squared = diff**2 if diff.ndim == 1 else np.sum(diff**2, axis=1)
    return float(math.sqrt(max(float(np.sum(weights * squared)), 0.0)))


def estimate_rate(errors, hs) -> float:
    """Least-squares slope of log(error) against log(h)."""
    errors = np.asarray(errors, dtype=float)
    hs = np.asarray(hs, dtype=float)
    if errors.shape != hs.shape or errors.size < 2:
        raise ValueError("Need at least two matching (error, h) pairs")
    if np.any(hs <= 0):
        raise ValueError("Mesh sizes must be positive")
    if np.any(errors <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(hs), np.log(errors), 1)
    return float(slope)


# ── Meshes and solves ──────────────────────────────────────────────────────

def subdomain_half_width(config: ExperimentConfig, h: float) -> float:
    """L_s = min(20 h_f, clearance - h), clearance being the fault's distance to the boundary.

    L_s never grows past the clearance, so at the coarse end of a ladder it can be
    narrower than the regularization band 8 eps (h=0.1, eps=3 h_f: L_s=0.2 against
    a band of 0.96). The correction subdomain then ends inside the band, where the
    projected CG flux still carries the (t_f + delta)/t_f overshoot; this is
    reported as a RuntimeWarning, not corrected.
    """
    h_f = H_F_RATIO * h
    clearance = min(
        config.fault_x, config.Lx - config.fault_x, config.fault_y_min, config.Ly - config.fault_y_max
    )
    L_s = min(SUBDOMAIN_CELLS * h_f, clearance - h)
    if L_s <= 0:
        raise ConfigError(f"Mesh size h={h:g} leaves no room for a correction subdomain (clearance {clearance:g})")
    band = BAND_WIDTHS * max(config.eps_multipliers) * h_f
    if band > L_s:
        message = f"Regularization band {band:g} exceeds the subdomain half-width L_s={L_s:g} at h={h:g}"
        print(f"[Harness] Warning: {message}")
        warnings.warn(message, RuntimeWarning, stacklevel=2)
    return L_s


def build_mesh(config: ExperimentConfig, h: float) -> Mesh:
    if config.dim == 1:
        return generate_interval_mesh(config.Lx, max(2, round(config.Lx / h)), config.fault_x, t_f=config.t_f)
    return generate_rect_mesh(
        config.Lx, config.Ly, config.fault(), h, H_F_RATIO * h, subdomain_half_width(config, h)
    )


def solve_ground_truth(config: ExperimentConfig) -> MixedSolution:
    """Finest mixed solve; every 2D error is measured against it."""
    print(f"[Harness] Ground truth: mixed solve at h={config.ground_truth_h:g}, t_f={config.t_f:g}")
    mesh = build_mesh(config, config.ground_truth_h)
    return solve_mixed(mesh, config.t_f, config.boundary_conditions(), tol=config.tol, restart=config.restart)


def _error_row_1d(config: ExperimentConfig, h: float, eps_multiplier: float | None) -> ErrorRow:
    problem = config.analytic()
    mesh = build_mesh(config, h)
    u_exact = problem.exact_velocity()

    def velocity(points):
        return np.full(points.shape[:-1] + (1,), u_exact)

    started = time.perf_counter()
    if config.method == "mixed":
        sol = solve_mixed(mesh, config.t_f, config.boundary_conditions(), tol=config.tol, restart=config.restart)
        elapsed = time.perf_counter() - started
        # Pressure error against the cell-mean projection of the exact solution
        cell_mean = problem.exact_pressure(mesh.cell_centroids[:, 0])
        e_p = float(np.sqrt(np.sum(mesh.cell_measures * (sol.pressure.values - cell_mean) ** 2)))
    else:
        eps = eps_multiplier * mesh.h_f
        sol = solve_cg_1d(mesh, config.t_f, eps, config.p_in, config.p_out, tol=config.tol, restart=config.restart)
        elapsed = time.perf_counter() - started
        e_p = l2_error(sol.pressure, lambda points: problem.exact_pressure(points[..., 0]), mesh=mesh)
    e_u = l2_error(sol.velocity, velocity, mesh=mesh)
    return ErrorRow(h, sol.dof, elapsed, 0.0, e_p, e_u, eps_multiplier)


def evaluate_ladder_point(
    config: ExperimentConfig,
    h: float,
    eps_multiplier: float | None,
    ground_truth: MixedSolution | None,
) -> ErrorRow:
    """Solve one (h, eps) combination and measure it against the ground truth."""
    if config.dim == 1:
        return _error_row_1d(config, h, eps_multiplier)

    mesh = build_mesh(config, h)
    bc = config.boundary_conditions()
    started = time.perf_counter()
    time_sub = 0.0
    if config.method == "mixed":
        sol = solve_mixed(mesh, config.t_f, bc, tol=config.tol, restart=config.restart)
        time_global = time.perf_counter() - started
        dof = sol.dof
    elif config.method == "cg":
        sol = solve_cg_2d(mesh, config.t_f, eps_multiplier * mesh.h_f, bc, tol=config.tol, restart=config.restart)
        time_global = time.perf_counter() - started
        dof = sol.dof
    else:
        sol = run_new_method(mesh, config.t_f, eps_multiplier * mesh.h_f, bc, tol=config.tol, restart=config.restart)
        time_global, time_sub = sol.timings["global"], sol.timings["sub"]
        dof = sol.global_solution.dof
    e_p = l2_error(sol.pressure, ground_truth.pressure)
    e_u = l2_error(sol.velocity, ground_truth.velocity)
    print(f"[Harness] h={h:g} eps_mult={eps_multiplier}: e_p={e_p:.3e}, e_u={e_u:.3e}")
    return ErrorRow(h, dof, time_global, time_sub, e_p, e_u, eps_multiplier)


def _series_name(eps_multiplier: float | None) -> str:
    return "mixed" if eps_multiplier is None else f"eps{eps_multiplier:g}"


def _csv_name(config: ExperimentConfig, eps_multiplier: float | None) -> str:
    if eps_multiplier is None or len(config.eps_multipliers) == 1:
        return "errors.csv"
    return f"errors_eps{eps_multiplier:g}.csv"


def run_convergence(config: ExperimentConfig, ground_truth: MixedSolution | None = None) -> ConvergenceResult:
    """One row per (h, eps) combination, CSV per eps series and the fitted rates.

    On a failed solve the rows finished so far are flushed before re-raising.
    """
    out = config.output_dir()
    if config.dim == 2 and ground_truth is None:
        ground_truth = solve_ground_truth(config)
    multipliers = [None] if config.method == "mixed" else list(config.eps_multipliers)
    jobs = [(k, h) for k in multipliers for h in config.ladder]
    rows: dict[str, list[ErrorRow]] = {_series_name(k): [] for k in multipliers}
    paths: list[Path] = []

    def flush() -> None:
        for k in multipliers:
            series = rows[_series_name(k)]
            if series:
                path = write_csv(out / _csv_name(config, k), ERROR_HEADER, [row.as_csv_row() for row in series])
                if path not in paths:
                    paths.append(path)

    print(f"[Harness] Convergence: method={config.method}, t_f={config.t_f:g}, {len(jobs)} solves")
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [pool.submit(evaluate_ladder_point, config, h, k, ground_truth) for k, h in jobs]
        # Rows are consumed in ladder order regardless of completion order
        for (k, _), future in zip(jobs, futures):
            try:
                rows[_series_name(k)].append(future.result())
            except Exception:
                for pending in futures:
                    pending.cancel()
                flush()
                print(f"[Harness] Convergence aborted; partial results in {out}")
                raise
    flush()

    rates = {}
    for k in multipliers:
        series = rows[_series_name(k)]
        hs = [row.h for row in series]
        rates[_series_name(k)] = {
            "p": estimate_rate([row.e_p for row in series], hs) if len(series) > 1 else float("nan"),
            "u": estimate_rate([row.e_u for row in series], hs) if len(series) > 1 else float("nan"),
        }
    paths.append(save_json(out / "rates.json", {name: _json_rates(r) for name, r in rates.items()}))
    print(f"[Harness] Rates: {rates}")
    return ConvergenceResult(rows=rows, rates=rates, paths=paths)


def _json_rates(rates: dict[str, float]) -> dict[str, float | None]:
    return {key: (None if math.isnan(value) else value) for key, value in rates.items()}


# ── Spectra ────────────────────────────────────────────────────────────────

@dataclass
class SpectrumTable:
    mixed: dict[float, np.ndarray]
    cg: dict[float, np.ndarray]
    path: Path | None = None

    def lambda_max(self, method: str) -> dict[float, float]:
        table = self.mixed if method == "mixed" else self.cg
        return {t_f: float(values[0]) for t_f, values in table.items()}


def run_spectrum(config: ExperimentConfig, t_f_list: list[float] | None = None) -> SpectrumTable:
    """Largest eigenvalues of both system matrices for each t_f.

    Each method gets its own small mesh: the saddle matrix on spectrum_h_mixed and
    the CG operator on spectrum_h_cg with eps = eps_multipliers[0] * h_f. The CG
    spectrum is that of the operator on the free nodes; Dirichlet rows are dropped.
    """
    if config.dim != 2:
        raise ConfigError("Spectrum studies run on the 2D configuration")
    t_f_list = list(t_f_list or config.t_f_sweep)
    bc = config.boundary_conditions()
    mixed_mesh = build_mesh(config, config.spectrum_h_mixed)
    cg_mesh = build_mesh(config, config.spectrum_h_cg)
    nodes, _ = bc.node_values(cg_mesh)
    eps = config.eps_multipliers[0] * cg_mesh.h_f
    print(
        f"[Harness] Spectra: mixed on h={config.spectrum_h_mixed:g} ({mixed_mesh.n_cells + mixed_mesh.n_facets} dofs), "
        f"cg on h={config.spectrum_h_cg:g} ({cg_mesh.n_vertices - np.unique(nodes).size} free nodes, eps={eps:g})"
    )

    mixed, cg = {}, {}
    rows = []
    for t_f in t_f_list:
        system = assemble_mixed_system(mixed_mesh, t_f, facet_pressure=bc.facet_pressure(mixed_mesh), symmetric=True)
        mixed[t_f] = eigs_extreme(system.matrix, config.spectrum_k_mixed, symmetric=True).values
        regdelta = RegularizedDelta(eps=eps, fault=cg_mesh.fault.with_transmissibility(t_f))
        matrix = free_block(assemble_cg_operator(cg_mesh, regdelta), nodes)
        cg[t_f] = eigs_extreme(matrix, config.spectrum_k_cg).values
        print(f"[Harness] t_f={t_f:g}: lambda_max mixed={mixed[t_f][0]:.4e}, cg={cg[t_f][0]:.4e}")
        rows += [["mixed", t_f, rank, value] for rank, value in enumerate(mixed[t_f])]
        rows += [["cg", t_f, rank, value] for rank, value in enumerate(cg[t_f])]

    path = write_csv(config.output_dir() / "spectrum.csv", ["method", "t_f", "rank", "eigenvalue"], rows)
    return SpectrumTable(mixed=mixed, cg=cg, path=path)


# ── Sampling and profiles ──────────────────────────────────────────────────

@dataclass
class Centerline:
    x: np.ndarray
    p: np.ndarray
    u_n: np.ndarray
    path: Path | None = None


def sample_centerline(
    solution,
    y: float = 0.5,
    n_points: int = 201,
    path: Path | None = None,
) -> Centerline:
    """Uniform samples of p and u.n along {(x, y)}, both sides of the fault sampled."""
    mesh = solution.mesh
    lo, hi = mesh.bounds
    length = float(hi[0] - lo[0])
    x = np.linspace(lo[0], hi[0], max(2, n_points))
    if mesh.fault is not None:
        x_f = mesh.fault.y_n
        offset = CENTERLINE_OFFSET * length
        x = np.sort(np.concatenate([x[np.abs(x - x_f) > 2 * offset], [x_f - offset, x_f + offset]]))
    points = x[:, None] if mesh.dim == 1 else np.column_stack([x, np.full_like(x, y)])
    p = np.asarray(solution.pressure.evaluate(points), dtype=float)
    u_n = np.asarray(solution.velocity.evaluate(points), dtype=float)[:, 0]
    if path is not None:
        path = write_csv(path, ["x", "p", "u_n"], [list(row) for row in zip(x, p, u_n)])
    return Centerline(x=x, p=p, u_n=u_n, path=path)


@dataclass
class Profile1D:
    eps: float
    x: np.ndarray
    p_exact: np.ndarray
    p_eps_c: np.ndarray
    p: np.ndarray
    u_exact: np.ndarray
    u: np.ndarray
    path: Path | None = None

    @property
    def max_pressure_error(self) -> float:
        return float(np.max(np.abs(self.p - self.p_eps_c)))

    def max_velocity_error(self, margin: int = 1) -> float:
        """Largest relative velocity error at nodes at least `margin` cells from the ends."""
        inner = slice(margin, -margin) if margin else slice(None)
        return float(np.max(np.abs(self.u[inner] / self.u_exact[inner] - 1.0)))


def profile_mesh_cells(L: float, eps: float) -> int:
    """Cell count giving h = min(eps, 0.1) / 10."""
    return math.ceil(L / (min(eps, 0.1) / 10.0) - 1e-9)


def run_profile_1d(config: ExperimentConfig, eps_list: list[float] | None = None) -> dict[float, Profile1D]:
    """Regularized CG against the closed-form profiles, one CSV per eps."""
    if config.dim != 1:
        raise ConfigError("1D profiles need a 1D configuration")
    problem = config.analytic()
    out = config.output_dir()
    profiles = {}
    for eps in eps_list or config.profile_eps:
        mesh = generate_interval_mesh(problem.L, profile_mesh_cells(problem.L, eps), problem.x_gamma, t_f=problem.t_f)
        sol = solve_cg_1d(mesh, problem.t_f, eps, problem.p0, problem.pL, tol=config.tol, restart=config.restart)
        x = mesh.vertices[:, 0]
        profile = Profile1D(
            eps=float(eps),
            x=x,
            p_exact=problem.exact_pressure(x),
            p_eps_c=problem.regularized_exact_pressure(x, eps),
            p=sol.pressure.values,
            u_exact=np.full_like(x, problem.exact_velocity()),
            u=sol.velocity.values[:, 0],
        )
        profile.path = write_csv(
            out / f"profile_eps{eps:g}.csv",
            ["x", "p_exact", "p_eps_c", "p", "u_exact", "u"],
            [list(row) for row in zip(x, profile.p_exact, profile.p_eps_c, profile.p, profile.u_exact, profile.u)],
        )
        print(
            f"[Harness] 1D eps={eps:g}: max |p - p_eps_c| = {profile.max_pressure_error:.2e}, "
            f"max velocity error {100 * profile.max_velocity_error():.2f}%"
        )
        profiles[float(eps)] = profile
    return profiles


# ── Efficiency ─────────────────────────────────────────────────────────────

EFFICIENCY_HEADER = [
    "h", "dof_mixed", "time_mixed", "e_p_mixed", "e_u_mixed",
    "dof_new", "time_global", "time_sub", "e_p_new", "e_u_new",
]


def run_efficiency(config: ExperimentConfig, ground_truth: MixedSolution | None = None) -> list[list]:
    """Mixed and new method side by side on the same ladder."""
    if config.dim != 2:
        raise ConfigError("Efficiency comparison runs on the 2D configuration")
    ground_truth = ground_truth or solve_ground_truth(config)
    k = config.eps_multipliers[0]
    rows = []
    for h in config.ladder:
        mixed = evaluate_ladder_point(_with_method(config, "mixed"), h, None, ground_truth)
        new = evaluate_ladder_point(_with_method(config, "cg+correction"), h, k, ground_truth)
        rows.append([
            h, mixed.dof, mixed.time_global, mixed.e_p, mixed.e_u,
            new.dof, new.time_global, new.time_sub, new.e_p, new.e_u,
        ])
    write_csv(config.output_dir() / "efficiency.csv", EFFICIENCY_HEADER, rows)
    return rows


def _with_method(config: ExperimentConfig, method: str) -> ExperimentConfig:
    return ExperimentConfig.from_dict({**config.to_dict(), "method": method})

