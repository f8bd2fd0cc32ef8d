"""Exception types shared across the solver modules."""


class FaultflowError(Exception):
    """Base class for errors raised by this package."""


class MeshError(FaultflowError, ValueError):
    """Invalid geometry, topology, or a point outside the mesh."""


class ConfigError(FaultflowError, ValueError):
    """Invalid or unreadable experiment configuration."""


class SolverError(FaultflowError, RuntimeError):
    """Linear solve failed to converge or broke down.

    The attached report carries the iteration count and final residual.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
