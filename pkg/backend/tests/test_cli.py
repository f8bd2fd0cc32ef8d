import json

import pytest

import main
from errors import SolverError

CONFIG_1D = {
    "dim": 1,
    "Lx": 10.0,
    "fault_x": 5.0,
    "t_f": 0.2,
    "method": "cg",
    "ladder": [0.5, 0.25],
    "profile_eps": [0.5],
    "tol": 1e-12,
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "1d.json"
    path.write_text(json.dumps(CONFIG_1D), encoding="utf-8")
    return path


def test_solve_mixed_writes_files(config_file, tmp_path, capsys):
    out = tmp_path / "mixed"
    assert main.cli(["solve-mixed", "--config", str(config_file), "--out", str(out)]) == 0

    assert {path.name for path in out.iterdir()} == {"p.vtk", "u.vtk", "report.json"}
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["method"] == "mixed"
    assert report["h"] == 0.5
    assert report["dof"] == 20 + 21
    assert report["solve"]["converged"] is True
    assert report["max_conservation_residual"] < 1e-10
    assert "Wrote" in capsys.readouterr().out


def test_solve_new_in_1d_uses_cg_with_overrides(config_file, tmp_path):
    out = tmp_path / "new"
    code = main.cli(
        ["solve-new", "--config", str(config_file), "--out", str(out), "--tf", "0.5", "--eps-mult", "2", "--h", "0.25"]
    )
    assert code == 0

    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["method"] == "cg"
    assert report["t_f"] == 0.5
    assert report["eps"] == pytest.approx(0.5)
    assert report["config"]["eps_multipliers"] == [2.0]
    assert report["mesh"]["n_cells"] == 40


def test_profile_1d_command(config_file, tmp_path):
    out = tmp_path / "profiles"
    assert main.cli(["profile-1d", "--config", str(config_file), "--out", str(out)]) == 0
    assert (out / "profile_eps0.5.csv").exists()


def test_bad_configuration_exits_with_2(tmp_path, capsys):
    assert main.cli(["solve-mixed", "--config", str(tmp_path / "missing.json")]) == 2
    assert "Error" in capsys.readouterr().out

    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**CONFIG_1D, "ladder": [0.25, 0.5]}), encoding="utf-8")
    assert main.cli(["converge", "--config", str(path), "--out", str(tmp_path / "out")]) == 2


def test_solver_failure_exits_with_1(config_file, tmp_path, monkeypatch):
    def diverging(config, h, method):
        raise SolverError("no convergence within 10 iterations")

    monkeypatch.setattr(main, "solve_configured", diverging)
    assert main.cli(["solve-mixed", "--config", str(config_file), "--out", str(tmp_path)]) == 1


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit):
        main.cli(["refine"])
