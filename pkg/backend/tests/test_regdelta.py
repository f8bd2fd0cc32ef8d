import numpy as np
import pytest
from scipy.integrate import quad

from mesh import FaultGeometry
from regdelta import RegularizedDelta

FAULT_1D = FaultGeometry(dim=1, y_n=5.0, t_f=0.2)
FAULT_2D = FaultGeometry(dim=2, y_n=1.0, t_f=0.2, y_tau_min=0.3, y_tau_max=0.7)
STEP = 1e-6


@pytest.mark.parametrize("eps", [0.01, 0.5, 1.0])
def test_delta_has_unit_mass(eps):
    delta = RegularizedDelta(eps=eps, fault=FAULT_1D)
    mass, _ = quad(lambda x: float(delta.delta_n(x)), 5.0 - 12 * eps, 5.0 + 12 * eps, points=[5.0])
    assert mass == pytest.approx(1.0, rel=1e-9)


def test_gaussian_point_values():
    half = RegularizedDelta(eps=0.5, fault=FAULT_1D)
    unit = RegularizedDelta(eps=1.0, fault=FAULT_1D)

    assert half.delta_n(5.0) == pytest.approx(0.797885, abs=1e-6)
    assert half.delta_n(5.5) == pytest.approx(0.483941, abs=1e-6)
    assert unit.delta_n(5.0) == pytest.approx(0.398942, abs=1e-6)
    assert half.ddelta_dn(5.0) == 0.0
    assert half.ddelta_dn(5.5) == pytest.approx(-0.967882, abs=2e-6)


def test_h_eps_is_antiderivative_of_delta():
    delta = RegularizedDelta(eps=0.3, fault=FAULT_1D)
    x = np.linspace(3.0, 7.0, 41)
    derivative = (delta.h_eps(x + STEP) - delta.h_eps(x - STEP)) / (2 * STEP)

    assert delta.h_eps(0.0) == pytest.approx(0.0, abs=1e-15)
    assert delta.h_eps(5.0) == pytest.approx(0.5)
    assert delta.h_eps(10.0) == pytest.approx(1.0)
    np.testing.assert_allclose(derivative, delta.delta_n(x), rtol=1e-6, atol=1e-9)


def test_ddelta_matches_finite_difference():
    delta = RegularizedDelta(eps=0.05, fault=FAULT_2D)
    points = np.array([[0.98, 0.5], [1.03, 0.31], [1.0, 0.69], [1.1, 0.5]])
    shifted = (delta.delta_eps(points + [STEP, 0.0]) - delta.delta_eps(points - [STEP, 0.0])) / (2 * STEP)
    np.testing.assert_allclose(delta.ddelta_eps_dn(points), shifted, rtol=1e-5, atol=1e-6)


def test_window_shape():
    delta = RegularizedDelta(eps=0.01, fault=FAULT_2D)

    assert delta.window_tau(0.5) == pytest.approx(1.0)
    assert delta.window_tau(0.3) == pytest.approx(0.5, abs=1e-6)
    assert delta.window_tau(0.0) == pytest.approx(0.0, abs=1e-12)
    assert delta.window_tau(1.0) == pytest.approx(0.0, abs=1e-12)

    tau = np.linspace(0.25, 0.75, 21)
    slope = (delta.window_tau(tau + STEP) - delta.window_tau(tau - STEP)) / (2 * STEP)
    np.testing.assert_allclose(delta.dwindow_dtau(tau), slope, rtol=1e-5, atol=1e-5)


def test_window_is_one_in_1d():
    delta = RegularizedDelta(eps=0.5, fault=FAULT_1D)
    np.testing.assert_array_equal(delta.window_tau(np.array([0.0, 3.0])), [1.0, 1.0])
    np.testing.assert_array_equal(delta.dd_eps_dtau(np.array([[4.0], [6.0]])), [0.0, 0.0])


def test_tangential_derivative_of_d():
    delta = RegularizedDelta(eps=0.05, fault=FAULT_2D)
    points = np.array([[1.025, 0.31], [0.96, 0.7], [1.05, 0.5], [0.99, 0.28]])
    shifted = (delta.d_eps(points + [0.0, STEP]) - delta.d_eps(points - [0.0, STEP])) / (2 * STEP)
    np.testing.assert_allclose(delta.dd_eps_dtau(points), shifted, rtol=1e-5, atol=1e-7)


def test_transport_coefficients_signs():
    delta = RegularizedDelta(eps=0.1, fault=FAULT_1D)
    x = np.linspace(4.0, 6.0, 101)

    g = delta.g_eps(x)
    assert np.all(g[x < 5.0] > 0)
    assert np.all(g[x > 5.0] < 0)
    assert np.all(delta.d_eps(x) <= 0)
    np.testing.assert_allclose(g, delta.ddelta_dn(x) / (0.2 + delta.delta_n(x)))


def test_eps_validation_and_defaults():
    with pytest.raises(ValueError):
        RegularizedDelta(eps=0.0, fault=FAULT_1D)
    with pytest.raises(ValueError):
        RegularizedDelta(eps=0.1, fault=FAULT_2D, eps_tau=-1.0)

    delta = RegularizedDelta(eps=0.1, fault=FAULT_2D)
    assert delta.eps_tau == 0.1
    assert delta.t_f == 0.2
    assert delta.band_half_width == pytest.approx(0.8)
    assert delta.in_band(np.array([0.25, 1.5, 1.9])).tolist() == [True, True, False]
