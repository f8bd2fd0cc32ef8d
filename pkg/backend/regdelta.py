"""Regularized delta family around a straight fault and its derived coefficients.

The normal factor is a Gaussian of width eps centred on the fault line; in 2D
it is multiplied by an erf window over the fault's tangential extent. All
functions accept scalars or arrays of points and are pure.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, ndtr

from mesh import FaultGeometry

SQRT_2PI = math.sqrt(2.0 * math.pi)
TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
# Gaussian tails beyond this many widths are below 1e-12 relative
BAND_WIDTHS = 8.0


@dataclass(frozen=True)
class RegularizedDelta:
    eps: float
    fault: FaultGeometry
    eps_tau: float | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.eps_tau is None:
            object.__setattr__(self, "eps_tau", float(self.eps))
        if not self.eps_tau > 0:
            raise ValueError(f"eps_tau must be positive, got {self.eps_tau}")

    @property
    def t_f(self) -> float:
        return self.fault.t_f

    @property
    def band_half_width(self) -> float:
        return BAND_WIDTHS * self.eps

    # ── Normal factor ──

    def delta_n(self, x_n):
        offset = np.asarray(x_n, dtype=float) - self.fault.y_n
        return np.exp(-0.5 * (offset / self.eps) ** 2) / (SQRT_2PI * self.eps)

    def ddelta_dn(self, x_n):
        offset = np.asarray(x_n, dtype=float) - self.fault.y_n
        return -offset / self.eps**2 * self.delta_n(x_n)

    def h_eps(self, x_n):
        """Integral of delta_n from 0 to x_n."""
        x_n = np.asarray(x_n, dtype=float)
        return ndtr((x_n - self.fault.y_n) / self.eps) - ndtr(-self.fault.y_n / self.eps)

    # ── Tangential window ──

    def _window_args(self, x_tau):
        x_tau = np.asarray(x_tau, dtype=float)
        scale = SQRT_2PI * self.eps_tau
        return (x_tau - self.fault.y_tau_min) / scale, (self.fault.y_tau_max - x_tau) / scale, scale

    def window_tau(self, x_tau):
        if self.fault.dim == 1:
            return np.ones_like(np.asarray(x_tau, dtype=float))
        a, b, _ = self._window_args(x_tau)
        return 0.25 * (1.0 + erf(a)) * (1.0 + erf(b))

    def dwindow_dtau(self, x_tau):
        if self.fault.dim == 1:
            return np.zeros_like(np.asarray(x_tau, dtype=float))
        a, b, scale = self._window_args(x_tau)
        da = TWO_OVER_SQRT_PI * np.exp(-a * a) / scale
        db = -TWO_OVER_SQRT_PI * np.exp(-b * b) / scale
        return 0.25 * (da * (1.0 + erf(b)) + (1.0 + erf(a)) * db)

    # ── Point evaluations ──

    def _split(self, points):
        points = np.asarray(points, dtype=float)
        if self.fault.dim == 1:
            x_n = points[..., 0] if points.ndim >= 1 and points.shape[-1:] == (1,) else points
            return x_n, None
        return points[..., 0], points[..., 1]

    def delta_eps(self, points):
        x_n, x_tau = self._split(points)
        if x_tau is None:
            return self.delta_n(x_n)
        return self.delta_n(x_n) * self.window_tau(x_tau)

    def ddelta_eps_dn(self, points):
        x_n, x_tau = self._split(points)
        if x_tau is None:
            return self.ddelta_dn(x_n)
        return self.ddelta_dn(x_n) * self.window_tau(x_tau)

    def g_eps(self, points):
        """G = delta' / (t_f + delta)."""
        return self.ddelta_eps_dn(points) / (self.t_f + self.delta_eps(points))

    def d_eps(self, points):
        """D = delta' * x_n' / (t_f + delta), x_n' the signed offset from the fault line."""
        x_n, _ = self._split(points)
        return self.g_eps(points) * (x_n - self.fault.y_n)

    def dd_eps_dtau(self, points):
        """Tangential derivative of D.

        With delta = g(x_n) w(x_tau) the quotient rule collapses to
        x_n' g'(x_n) w'(x_tau) t_f / (t_f + delta)^2.
        """
        x_n, x_tau = self._split(points)
        if x_tau is None:
            return np.zeros_like(x_n)
        offset = x_n - self.fault.y_n
        denominator = self.t_f + self.delta_n(x_n) * self.window_tau(x_tau)
        return offset * self.ddelta_dn(x_n) * self.dwindow_dtau(x_tau) * self.t_f / denominator**2

    def in_band(self, x_n):
        """True where the normal offset is within the 8-eps band."""
        return np.abs(np.asarray(x_n, dtype=float) - self.fault.y_n) <= self.band_half_width
