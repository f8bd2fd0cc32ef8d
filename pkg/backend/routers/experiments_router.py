from typing import Callable

from fastapi import APIRouter, HTTPException

from errors import ConfigError


def create_experiments_router(
    *,
    experiments: dict[str, Callable],
    start_experiment: Callable[[str, dict], dict],
    load_run_status: Callable[[str], dict | None],
    list_runs: Callable[[], list[dict]],
) -> APIRouter:
    router = APIRouter()

    @router.post("/api/experiments/{kind}")
    def start(kind: str, config: dict | None = None):
        """Start a convergence or spectrum run in the background."""
        if kind not in experiments:
            raise HTTPException(status_code=404, detail=f"Unknown experiment {kind!r}")
        try:
            status = start_experiment(kind, config or {})
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return status

    @router.get("/api/experiments")
    def get_runs():
        return {"runs": list_runs()}

    @router.get("/api/experiments/{run_id}")
    def get_run(run_id: str):
        try:
            status = load_run_status(run_id)
        except ValueError:
            status = None
        if status is None:
            raise HTTPException(status_code=404, detail="Run not found")
        return status

    return router
