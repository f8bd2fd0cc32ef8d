from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from errors import ConfigError, MeshError, SolverError
from harness import ExperimentConfig
from main import solution_report, solve_configured


class SolveRequest(BaseModel):
    """Request body for /api/solve/*; `config` takes ExperimentConfig fields."""

    config: dict = Field(default_factory=dict)
    h: float | None = None
    t_f: float | None = None
    eps_mult: float | None = None


def create_solve_router(*, min_h: float) -> APIRouter:
    router = APIRouter()

    def run(request: SolveRequest, method: str) -> dict:
        data = dict(request.config)
        if request.t_f is not None:
            data["t_f"] = request.t_f
        if request.eps_mult is not None:
            data["eps_multipliers"] = [request.eps_mult]
        try:
            config = ExperimentConfig.from_dict(data)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        h = request.h if request.h is not None else config.ladder[0]
        if h < min_h:
            raise HTTPException(
                status_code=400,
                detail=f"h={h:g} is below the interactive limit {min_h:g}; run an experiment instead",
            )
        try:
            sol = solve_configured(config, h, method)
        except (ConfigError, MeshError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except SolverError as exc:
            raise HTTPException(status_code=500, detail=str(exc))
        return {"h": h, **solution_report(sol)}

    @router.post("/api/solve/mixed")
    def solve_mixed_endpoint(request: SolveRequest):
        """Full-domain mixed solve."""
        return run(request, "mixed")

    @router.post("/api/solve/new")
    def solve_new_endpoint(request: SolveRequest):
        """Regularized CG solve with subdomain correction (CG only in 1D)."""
        return run(request, "cg+correction")

    return router
