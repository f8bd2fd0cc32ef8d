import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import results_store  # noqa: E402
from analytic1d import Analytic1DProblem  # noqa: E402
from harness import ExperimentConfig, build_mesh  # noqa: E402
from mesh import FaultGeometry, generate_interval_mesh, generate_rect_mesh  # noqa: E402
from mixed import solve_mixed  # noqa: E402

RECT_H = 0.2
RECT_H_F = 0.08
RECT_L_S = 0.2


def rect_fault(t_f: float = 2.0) -> FaultGeometry:
    return FaultGeometry(dim=2, y_n=1.0, t_f=t_f, y_tau_min=0.3, y_tau_max=0.7)


def make_rect_mesh(t_f: float = 2.0):
    """2 x 1 rectangle, fault on x = 1 over y in [0.3, 0.7], subdomain [0.8, 1.2] x [0.1, 0.9]."""
    return generate_rect_mesh(2.0, 1.0, rect_fault(t_f), RECT_H, RECT_H_F, RECT_L_S)


@pytest.fixture
def problem_1d() -> Analytic1DProblem:
    return Analytic1DProblem(L=10.0, x_gamma=5.0, t_f=0.2, p0=1.0, pL=0.0)


@pytest.fixture
def interval_mesh(problem_1d):
    return generate_interval_mesh(problem_1d.L, 400, problem_1d.x_gamma, t_f=problem_1d.t_f)


@pytest.fixture
def rect_mesh():
    return make_rect_mesh()


@pytest.fixture
def rect_mesh_factory():
    return make_rect_mesh


@pytest.fixture
def config_1d(tmp_path) -> ExperimentConfig:
    return ExperimentConfig(
        dim=1,
        Lx=10.0,
        fault_x=5.0,
        t_f=0.2,
        method="cg",
        ladder=[0.5, 0.25, 0.125],
        eps_multipliers=[3.0],
        profile_eps=[0.5],
        tol=1e-12,
        out_dir=str(tmp_path / "results"),
    )


@pytest.fixture
def config_2d(tmp_path) -> ExperimentConfig:
    return ExperimentConfig(ladder=[0.25, 0.2], out_dir=str(tmp_path / "results"))


@pytest.fixture(scope="session")
def coarse_truth():
    """Mixed reference on h = 0.15 for the default 2D configuration."""
    config = ExperimentConfig()
    return solve_mixed(build_mesh(config, 0.15), config.t_f, config.boundary_conditions())


@pytest.fixture
def runs_dir(tmp_path, monkeypatch) -> Path:
    monkeypatch.setattr(results_store, "DATA_DIR", tmp_path / "data")
    monkeypatch.setattr(results_store, "RUNS_DIR", tmp_path / "data" / "runs")
    return tmp_path / "data" / "runs"
