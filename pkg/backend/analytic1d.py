"""Closed-form 1D solutions: the exact faulted problem and its regularized counterpart."""

from dataclasses import dataclass

import numpy as np

from mesh import FaultGeometry
from regdelta import RegularizedDelta


@dataclass(frozen=True)
class Analytic1DProblem:
    """-p'' = 0 on (0, L) with p(0) = p0, p(L) = pL and a fault at x_gamma.

    The jump p(x_gamma-) - p(x_gamma+) equals u / t_f.
    """

    L: float = 10.0
    x_gamma: float = 5.0
    t_f: float = 0.2
    p0: float = 1.0
    pL: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.x_gamma < self.L:
            raise ValueError(f"Fault x={self.x_gamma} must lie strictly inside (0, {self.L})")
        if not self.t_f > 0:
            raise ValueError(f"Transmissibility must be positive, got {self.t_f}")

    @property
    def fault(self) -> FaultGeometry:
        return FaultGeometry(dim=1, y_n=self.x_gamma, t_f=self.t_f)

    def exact_velocity(self) -> float:
        return (self.p0 - self.pL) / (1.0 / self.t_f + self.L)

    def jump(self) -> float:
        return self.exact_velocity() / self.t_f

    def exact_pressure(self, x):
        """Piecewise linear pressure; the left limit is returned at x_gamma."""
        x = np.asarray(x, dtype=float)
        u = self.exact_velocity()
        left = self.p0 - u * x
        return np.where(x <= self.x_gamma, left, left - self.jump())

    def regularized_exact_pressure(self, x, eps: float):
        """Pressure of the regularized problem with the jump smeared by H_eps."""
        x = np.asarray(x, dtype=float)
        h = RegularizedDelta(eps=eps, fault=self.fault).h_eps(x)
        # Left: p_c - H u/t_f; right: p_c - (H - 1) u/t_f; both equal p0 - u x - H u/t_f
        return self.p0 - self.exact_velocity() * x - h * self.jump()
