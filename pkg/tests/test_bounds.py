"""
Tests for the attainable MSE bounds.
"""
import numpy as np
import pytest

from app.engine.bounds import compute_bounds
from app.engine.solver import SolverConfig, build_problem_linear, objectives, solve
from app.generators import generate_correlated_scalars
from tests.conftest import correlated_data


class TestScalarBounds:
    """Scalar x, y, s with known correlations have closed-form bounds."""

    @pytest.mark.parametrize("rho_xy, rho_xs", [(0.0, 0.5), (0.5, 0.9), (0.9, 0.0)])
    def test_bounds_follow_correlations(self, rho_xy, rho_xs):
        data = generate_correlated_scalars(200, rho_xy, rho_xs, seed=1)
        problem = build_problem_linear(data.X, data.Y, data.S)
        bounds = compute_bounds(problem)
        var_y, var_s = float(np.var(data.Y)), float(np.var(data.S))

        assert bounds.alpha_max / var_s == pytest.approx(1.0, abs=1e-9)
        assert bounds.gamma_min / var_y == pytest.approx(1.0 - rho_xy ** 2, abs=1e-9), \
            f"gamma_min off for rho_xy={rho_xy}"
        if rho_xs != 0.0:
            # The only direction leaks s, so hiding s costs all target signal
            assert bounds.gamma_max / var_y == pytest.approx(1.0, abs=1e-9)
        if rho_xy != 0.0:
            assert bounds.alpha_min / var_s == pytest.approx(1.0 - rho_xs ** 2, abs=1e-9), \
                f"alpha_min off for rho_xs={rho_xs}"


class TestBoundIdentities:
    """Bounds equal the objectives of their witness encoders."""

    def test_alpha_min_and_gamma_max_witnesses(self):
        X, Y, S = correlated_data(seed=5, d=5, n=80, p=1, q=1)
        problem = build_problem_linear(X, Y, S)
        bounds = compute_bounds(problem)
        _, J_s_vy = objectives(problem, bounds.V_y)
        J_y_vs, _ = objectives(problem, bounds.V_s)
        assert bounds.alpha_min == pytest.approx(J_s_vy, abs=1e-10)
        assert bounds.gamma_max == pytest.approx(J_y_vs, abs=1e-10)

    def test_ordering(self, linear_problem):
        bounds = compute_bounds(linear_problem)
        assert bounds.gamma_min <= bounds.gamma_max
        assert bounds.alpha_star_min <= bounds.alpha_min <= bounds.alpha_max

    def test_sensitive_signal_outside_data_span(self):
        """When S~ L_x = 0 nothing leaks: gamma_max = gamma_min and alpha_min = alpha_max."""
        X = [[1.0, -1.0, 1.0, -1.0]]
        Y = [[1.0, -1.0, 0.0, 0.0]]
        S = [[1.0, 1.0, -1.0, -1.0]]
        problem = build_problem_linear(X, Y, S)
        bounds = compute_bounds(problem)
        assert bounds.V_s.shape == (1, 1)
        assert bounds.gamma_max == pytest.approx(bounds.gamma_min)
        assert bounds.alpha_min == pytest.approx(bounds.alpha_max)

    def test_endpoint_solutions_hit_bounds(self, linear_problem):
        bounds = compute_bounds(linear_problem)
        _, J_y0, J_s0 = solve(linear_problem, SolverConfig(lam=0.0))
        _, _, J_s1 = solve(linear_problem, SolverConfig(lam=1.0))
        assert J_y0 == pytest.approx(bounds.gamma_min, abs=1e-9)
        assert J_s0 == pytest.approx(bounds.alpha_min, abs=1e-9)
        assert J_s1 == pytest.approx(bounds.alpha_max, abs=1e-9)

    def test_contains_alpha(self, linear_problem):
        bounds = compute_bounds(linear_problem)
        middle = (bounds.alpha_min + bounds.alpha_max) / 2.0
        assert bounds.contains_alpha(middle)
        assert not bounds.contains_alpha(bounds.alpha_max + 1.0)
        assert bounds.contains_alpha(bounds.alpha_max + 1e-12, slack=1e-9)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
