import numpy as np
import pytest

from analytic1d import Analytic1DProblem


def test_exact_velocity_and_jump(problem_1d):
    assert problem_1d.exact_velocity() == pytest.approx(1.0 / 15.0)
    assert problem_1d.jump() == pytest.approx(1.0 / 3.0)


def test_exact_pressure_boundary_values_and_jump(problem_1d):
    assert problem_1d.exact_pressure(0.0) == pytest.approx(1.0)
    assert problem_1d.exact_pressure(10.0) == pytest.approx(0.0, abs=1e-14)
    # The left limit is returned on the fault
    left = problem_1d.exact_pressure(5.0)
    right = problem_1d.exact_pressure(5.0 + 1e-12)
    assert left == pytest.approx(1.0 - 5.0 / 15.0)
    assert left - right == pytest.approx(problem_1d.jump(), rel=1e-9)


def test_exact_pressure_has_constant_slope(problem_1d):
    x = np.linspace(0.0, 10.0, 101)
    x = x[np.abs(x - 5.0) > 0.1]
    slope = np.gradient(problem_1d.exact_pressure(x), x)
    far = np.abs(x - 5.0) > 0.3
    np.testing.assert_allclose(slope[far], -problem_1d.exact_velocity())


def test_regularized_pressure_matches_exact_away_from_fault(problem_1d):
    x = np.array([0.0, 2.0, 4.5, 5.5, 8.0, 10.0])
    regularized = problem_1d.regularized_exact_pressure(x, 0.01)
    np.testing.assert_allclose(regularized, problem_1d.exact_pressure(x), atol=1e-12)
    assert problem_1d.regularized_exact_pressure(5.0, 0.01) == pytest.approx(
        problem_1d.exact_pressure(5.0) - 0.5 * problem_1d.jump()
    )


def test_regularized_pressure_is_monotone(problem_1d):
    x = np.linspace(0.0, 10.0, 2001)
    for eps in (1.0, 0.5, 0.01):
        assert np.all(np.diff(problem_1d.regularized_exact_pressure(x, eps)) < 0)


@pytest.mark.parametrize("kwargs", [{"x_gamma": 0.0}, {"x_gamma": 10.0}, {"t_f": 0.0}])
def test_invalid_problem(kwargs):
    with pytest.raises(ValueError):
        Analytic1DProblem(**kwargs)


def test_fault_geometry(problem_1d):
    fault = problem_1d.fault
    assert fault.dim == 1
    assert fault.y_n == 5.0
    assert fault.t_f == 0.2
