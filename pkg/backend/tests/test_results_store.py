import numpy as np
import pytest

from mesh import generate_interval_mesh
from results_store import (
    get_run_dir,
    list_runs,
    load_json,
    load_run_status,
    new_run_id,
    save_json,
    save_run_status,
    write_csv,
    write_vtk,
)


def test_json_round_trip(tmp_path):
    path = save_json(tmp_path / "nested" / "report.json", {"t_f": 0.02, "label": "Störung"})
    assert load_json(path) == {"t_f": 0.02, "label": "Störung"}
    assert load_json(tmp_path / "missing.json", default={}) == {}

    path.write_text("{broken", encoding="utf-8")
    assert load_json(path, default=[]) == []


def test_csv_formatting(tmp_path):
    path = write_csv(
        tmp_path / "table.csv",
        ["h", "dof", "method", "converged"],
        [[0.1, 42, "mixed", True], [np.float64(2.5e-3), np.int64(7), "cg", False]],
    )
    assert path.read_text(encoding="utf-8").splitlines() == [
        "h,dof,method,converged",
        "1.000000e-01,42,mixed,1",
        "2.500000e-03,7,cg,0",
    ]
    with pytest.raises(ValueError, match="header has 2"):
        write_csv(tmp_path / "bad.csv", ["a", "b"], [[1, 2, 3]])


def test_vtk_triangles(tmp_path, rect_mesh):
    velocity = np.tile([0.5, 0.0], (rect_mesh.n_vertices, 1))
    path = write_vtk(
        tmp_path / "u.vtk",
        rect_mesh,
        point_data={"u": velocity, "p": np.zeros(rect_mesh.n_vertices)},
        title="velocity",
    )
    lines = path.read_text(encoding="utf-8").splitlines()

    assert lines[:4] == ["# vtk DataFile Version 2.0", "velocity", "ASCII", "DATASET UNSTRUCTURED_GRID"]
    assert f"POINTS {rect_mesh.n_vertices} double" in lines
    assert f"CELLS {rect_mesh.n_cells} {4 * rect_mesh.n_cells}" in lines
    start = lines.index(f"CELL_TYPES {rect_mesh.n_cells}") + 1
    assert set(lines[start : start + rect_mesh.n_cells]) == {"5"}
    assert "SCALARS cell_tag int 1" in lines
    vectors = lines.index("VECTORS u double") + 1
    assert lines[vectors] == "0.5 0.0 0.0"
    assert "SCALARS p double 1" in lines


def test_vtk_lines_and_field_sizes(tmp_path):
    mesh = generate_interval_mesh(1.0, 4, 0.5)
    lines = write_vtk(tmp_path / "p.vtk", mesh, cell_data={"p": np.arange(4.0)}).read_text().splitlines()
    start = lines.index("CELL_TYPES 4") + 1
    assert lines[start : start + 4] == ["3"] * 4
    assert "POINT_DATA" not in " ".join(lines)

    with pytest.raises(ValueError, match="expected 5"):
        write_vtk(tmp_path / "bad.vtk", mesh, point_data={"p": np.zeros(4)})


def test_run_status(runs_dir):
    assert list_runs() == []
    first = new_run_id("converge")
    second = new_run_id("spectrum")
    assert first.startswith("converge-")
    assert first != second

    save_run_status(first, {"run_id": first, "status": "running", "started_at": "2026-01-01T00:00:00"})
    save_run_status(second, {"run_id": second, "status": "completed", "started_at": "2026-01-02T00:00:00"})

    assert get_run_dir(first) == runs_dir / first
    assert load_run_status(first)["status"] == "running"
    assert load_run_status("converge-missing") is None
    assert [run["run_id"] for run in list_runs()] == [second, first]


@pytest.mark.parametrize("run_id", ["", "../secrets", "a/b", "a\\b", ".hidden"])
def test_invalid_run_ids(runs_dir, run_id):
    with pytest.raises(ValueError):
        get_run_dir(run_id)
    with pytest.raises(ValueError):
        load_run_status(run_id)
    assert not (runs_dir.parent / "secrets").exists()
