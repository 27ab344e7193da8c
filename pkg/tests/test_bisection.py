"""
Tests for the lambda bisection that targets a tolerable adversary MSE.
"""
import pytest

from app.engine.bisection import bisect_alpha
from app.engine.bounds import compute_bounds
from app.engine.solver import SolverConfig, build_problem_linear, solve
from app.errors import EXIT_INFEASIBLE, InfeasibleTolerance, InvalidParameter, NotReached
from tests.conftest import correlated_data


class TestBisection:
    """Reaching, missing and refusing leakage targets on the mixture problem."""

    def test_reaches_interior_target(self, mixture_problem):
        bounds = compute_bounds(mixture_problem)
        alpha = (bounds.alpha_min + bounds.alpha_max) / 2.0
        epsilon = 1e-3 * bounds.alpha_max
        result = bisect_alpha(mixture_problem, alpha, epsilon)
        assert abs(result.J_s - alpha) <= epsilon, f"J_s={result.J_s} misses alpha={alpha}"
        assert result.iterations <= 50, f"Took {result.iterations} iterations"
        assert len(result.trace) == result.iterations
        assert result.trace[0].lam == 0.5, "Search must start at lambda = 1/2"

    def test_high_target_moves_lambda_up(self, mixture_problem):
        bounds = compute_bounds(mixture_problem)
        epsilon = 1e-3 * bounds.alpha_max
        result = bisect_alpha(mixture_problem, bounds.alpha_max - epsilon / 2.0, epsilon)
        assert result.lam > 0.5, f"Expected lambda above 1/2, got {result.lam}"

    def test_low_target_moves_lambda_down(self, mixture_problem):
        bounds = compute_bounds(mixture_problem)
        epsilon = 1e-3 * bounds.alpha_max
        result = bisect_alpha(mixture_problem, bounds.alpha_min + epsilon / 2.0, epsilon)
        assert result.lam < 0.5, f"Expected lambda below 1/2, got {result.lam}"

    def test_target_outside_bounds_is_infeasible(self, mixture_problem):
        bounds = compute_bounds(mixture_problem)
        with pytest.raises(InfeasibleTolerance) as info:
            bisect_alpha(mixture_problem, bounds.alpha_max * 1.5, 1e-3)
        assert info.value.exit_code == EXIT_INFEASIBLE
        assert info.value.alpha_max == pytest.approx(bounds.alpha_max)

    def test_exhausted_iterations_report_best_point(self, mixture_problem):
        bounds = compute_bounds(mixture_problem)
        J_s_half = solve(mixture_problem, SolverConfig(lam=0.5)).J_s
        alpha = bounds.alpha_min if J_s_half > bounds.alpha_min + 1e-6 else bounds.alpha_max
        with pytest.raises(NotReached) as info:
            bisect_alpha(mixture_problem, alpha, 1e-9, max_iter=1)
        assert info.value.best_lambda == 0.5
        assert info.value.best_j_s == pytest.approx(J_s_half)
        assert info.value.iterations == 1

    def test_non_positive_epsilon(self, mixture_problem):
        with pytest.raises(InvalidParameter):
            bisect_alpha(mixture_problem, 0.3, 0.0)

    def test_to_dict_records_trace(self, mixture_problem):
        bounds = compute_bounds(mixture_problem)
        alpha = (bounds.alpha_min + bounds.alpha_max) / 2.0
        result = bisect_alpha(mixture_problem, alpha, 1e-3 * bounds.alpha_max)
        payload = result.to_dict()
        assert payload["iterations"] == len(payload["trace"])
        assert payload["r"] == result.encoder.r


class TestConstrainedEquivalence:
    """Solving at lambda and bisecting to that lambda's J_s land on the same front point."""

    @pytest.mark.parametrize("lam", [0.3, 0.6, 0.9])
    def test_bisection_recovers_lagrangian_point(self, lam):
        X, Y, S = correlated_data(seed=31, d=5, n=120)
        problem = build_problem_linear(X, Y, S)
        _, J_y, J_s = solve(problem, SolverConfig(lam=lam))
        result = bisect_alpha(problem, J_s, 1e-10 * problem.s_energy)
        assert result.J_y == pytest.approx(J_y, abs=1e-8), \
            f"Constrained J_y {result.J_y} differs from Lagrangian J_y {J_y} at lambda={lam}"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
