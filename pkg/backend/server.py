import io
import os
import sys
import threading
import traceback
from datetime import datetime, timezone
from pathlib import Path

from dotenv import load_dotenv

# Load .env from project root
load_dotenv(Path(__file__).parent.parent / ".env")

if __name__ == "__main__":
    # line_buffering=True keeps background-job logs in order with request logs
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace", line_buffering=True)

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from harness import ExperimentConfig, run_convergence, run_spectrum
from linalg import DENSE_EIG_LIMIT, GMRES_RESTART, GMRES_TOL
from results_store import get_run_dir, list_runs, load_run_status, new_run_id, save_run_status
from routers.experiments_router import create_experiments_router
from routers.solve_router import create_solve_router
from routers.system_router import create_system_router

# ── Configuration ──────────────────────────────────────────────────────────
API_HOST = os.getenv("FAULTFLOW_API_HOST", "127.0.0.1")
API_PORT = int(os.getenv("FAULTFLOW_API_PORT", "8000"))
# Single solves on meshes finer than this are rejected; experiments run as jobs
MIN_INTERACTIVE_H = float(os.getenv("FAULTFLOW_MIN_INTERACTIVE_H", "0.02"))
allowed_origins = [
    origin.strip()
    for origin in os.getenv("FAULTFLOW_CORS_ORIGINS", "http://localhost:5173").split(",")
    if origin.strip()
]

EXPERIMENTS = {
    "converge": lambda config: [str(path) for path in run_convergence(config).paths],
    "spectrum": lambda config: [str(run_spectrum(config).path)],
}

run_lock = threading.Lock()
active_runs: dict[str, threading.Thread] = {}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def run_experiment(run_id: str, kind: str, config: ExperimentConfig) -> None:
    """Background task: run one experiment and record its status."""
    status = load_run_status(run_id) or {}
    try:
        print(f"[Server] Run {run_id}: {kind} started")
        outputs = EXPERIMENTS[kind](config)
        status.update({"status": "completed", "finished_at": _now(), "outputs": outputs})
        print(f"[Server] Run {run_id}: completed")
    except Exception as exc:
        traceback.print_exc()
        status.update({"status": "failed", "finished_at": _now(), "error": str(exc)})
        print(f"[Server] Run {run_id}: failed ({exc})")
    finally:
        with run_lock:
            save_run_status(run_id, status)
            active_runs.pop(run_id, None)


def start_experiment(kind: str, config_data: dict) -> dict:
    """Validate the configuration, record the run and start its thread."""
    config = ExperimentConfig.from_dict({**config_data, "out_dir": ""})
    run_id = new_run_id(kind)
    out_dir = get_run_dir(run_id)
    config.out_dir = str(out_dir)
    status = {
        "run_id": run_id,
        "kind": kind,
        "status": "running",
        "started_at": _now(),
        "out_dir": str(out_dir),
        "config": config.to_dict(),
    }
    with run_lock:
        save_run_status(run_id, status)
        thread = threading.Thread(target=run_experiment, args=(run_id, kind, config), daemon=True)
        active_runs[run_id] = thread
        thread.start()
    return status


def create_app() -> FastAPI:
    app = FastAPI(title="faultflow")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=allowed_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.include_router(
        create_system_router(
            settings={
                "gmres_tol": GMRES_TOL,
                "gmres_restart": GMRES_RESTART,
                "dense_eig_limit": DENSE_EIG_LIMIT,
                "min_interactive_h": MIN_INTERACTIVE_H,
                "experiments": sorted(EXPERIMENTS),
            },
            active_runs=active_runs,
        )
    )
    app.include_router(create_solve_router(min_h=MIN_INTERACTIVE_H))
    app.include_router(
        create_experiments_router(
            experiments=EXPERIMENTS,
            start_experiment=start_experiment,
            load_run_status=load_run_status,
            list_runs=list_runs,
        )
    )
    return app


app = create_app()


if __name__ == "__main__":
    import uvicorn

    print(f"[Server] Listening on http://{API_HOST}:{API_PORT}")
    uvicorn.run(app, host=API_HOST, port=API_PORT)
