import threading

from fastapi import APIRouter


def create_system_router(
    *,
    settings: dict,
    active_runs: dict[str, threading.Thread],
) -> APIRouter:
    router = APIRouter()

    @router.get("/api/health")
    def health():
        return {"status": "ok", "active_runs": len(active_runs)}

    @router.get("/api/settings")
    def get_settings():
        """Solver defaults and service limits."""
        return dict(settings)

    return router
