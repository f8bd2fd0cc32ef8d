import json
import os
import secrets
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from mesh import Mesh

PROJECT_ROOT = Path(__file__).parent.parent
load_dotenv(PROJECT_ROOT / ".env")

DATA_DIR = Path(os.getenv("FAULTFLOW_DATA_DIR", str(PROJECT_ROOT / "data")))
RUNS_DIR = DATA_DIR / "runs"

VTK_CELL_TYPES = {1: 3, 2: 5}  # VTK_LINE, VTK_TRIANGLE


def save_json(path: Path, data) -> Path:
    """Save data as UTF-8 JSON, creating parent folders."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
    return path


def load_json(path: Path, default=None):
    path = Path(path)
    if not path.exists():
        return default
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        print(f"[Store] Unreadable JSON in {path}: {exc}")
        return default


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6e}"
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> Path:
    """Comma-separated table; floats as %.6e, integers verbatim."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"Row has {len(row)} values, header has {len(header)}")
            f.write(",".join(_format_cell(value) for value in row) + "\n")
    return path


def _vtk_block(name: str, values: np.ndarray, count: int) -> list[str]:
    values = np.asarray(values)
    if values.shape[0] != count:
        raise ValueError(f"Field {name!r} has {values.shape[0]} values, expected {count}")
    if values.ndim == 1:
        kind = "int" if np.issubdtype(values.dtype, np.integer) else "double"
        lines = [f"SCALARS {name} {kind} 1", "LOOKUP_TABLE default"]
        lines += [str(int(v)) if kind == "int" else repr(float(v)) for v in values]
        return lines
    padded = np.zeros((count, 3))
    padded[:, : values.shape[1]] = values
    return [f"VECTORS {name} double"] + [" ".join(repr(float(c)) for c in row) for row in padded]


def write_vtk(
    path: Path,
    mesh: Mesh,
    point_data: dict[str, np.ndarray] | None = None,
    cell_data: dict[str, np.ndarray] | None = None,
    title: str = "faultflow",
) -> Path:
    """Legacy VTK 2.0 ASCII unstructured grid with scalar and vector fields."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    points = np.zeros((mesh.n_vertices, 3))
    points[:, : mesh.dim] = mesh.vertices
    k = mesh.dim + 1

    lines = ["# vtk DataFile Version 2.0", title.replace("\n", " ")[:255], "ASCII", "DATASET UNSTRUCTURED_GRID"]
    lines.append(f"POINTS {mesh.n_vertices} double")
    lines += [" ".join(repr(float(c)) for c in p) for p in points]
    lines.append(f"CELLS {mesh.n_cells} {mesh.n_cells * (k + 1)}")
    lines += [f"{k} " + " ".join(str(int(v)) for v in cell) for cell in mesh.cells]
    lines.append(f"CELL_TYPES {mesh.n_cells}")
    lines += [str(VTK_CELL_TYPES[mesh.dim])] * mesh.n_cells

    cell_data = {"cell_tag": mesh.cell_tags, **(cell_data or {})}
    lines.append(f"CELL_DATA {mesh.n_cells}")
    for name, values in cell_data.items():
        lines += _vtk_block(name, values, mesh.n_cells)
    if point_data:
        lines.append(f"POINT_DATA {mesh.n_vertices}")
        for name, values in point_data.items():
            lines += _vtk_block(name, values, mesh.n_vertices)

    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return path


# ── Run status ─────────────────────────────────────────────────────────────

def new_run_id(kind: str) -> str:
    timestamp = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S")
    return f"{kind}-{timestamp}-{secrets.token_hex(3)}"


def _check_run_id(run_id: str) -> str:
    if not run_id or "/" in run_id or "\\" in run_id or run_id.startswith("."):
        raise ValueError(f"Invalid run id {run_id!r}")
    return run_id


def get_run_dir(run_id: str) -> Path:
    """Get run-specific output directory."""
    run_dir = RUNS_DIR / _check_run_id(run_id)
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir


def save_run_status(run_id: str, status: dict) -> None:
    save_json(get_run_dir(run_id) / "status.json", status)


def load_run_status(run_id: str) -> dict | None:
    status_file = RUNS_DIR / _check_run_id(run_id) / "status.json"
    if not status_file.exists():
        return None
    return load_json(status_file)


def list_runs() -> list[dict]:
    """All recorded runs, newest first."""
    if not RUNS_DIR.exists():
        return []
    runs = []
    for run_dir in RUNS_DIR.iterdir():
        status = load_json(run_dir / "status.json") if run_dir.is_dir() else None
        if status:
            runs.append(status)
    return sorted(runs, key=lambda status: status.get("started_at", ""), reverse=True)
