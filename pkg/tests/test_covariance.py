"""
Tests for the covariance-form solver and the closed-form regressor MSE.
"""
import numpy as np
import pytest

from app.engine.covariance import (
    build_B_covariance,
    build_covariance,
    encoder_from_covariance,
    min_mse_given_encoder,
)
from app.engine.evaluation import fit_regressor
from app.engine.numerics import center_columns
from app.engine.solver import SolverConfig, build_B, build_problem_linear, objectives, solve, spectral_solve
from app.errors import InvalidParameter, NotPositiveDefinite, ShapeMismatch
from app.generators import make_rng
from tests.conftest import correlated_data, orthonormal_columns


def _whitened_data(seed: int, d: int = 3, n: int = 40):
    """X~ with X~ X~^T / n = I exactly, plus correlated Y and S."""
    rng = make_rng(seed)
    raw, _ = center_columns(rng.standard_normal((d, n)))
    basis = np.linalg.qr(raw.T)[0]  # n x d, orthonormal and orthogonal to the ones vector
    X = np.sqrt(n) * basis.T
    Y = rng.standard_normal((2, d)) @ X + rng.standard_normal((2, n))
    S = rng.standard_normal((1, d)) @ X + rng.standard_normal((1, n))
    return X, Y, S


class TestCovarianceModel:
    """Moments and the Cholesky factor."""

    def test_whitened_data_has_identity_factor(self):
        X, Y, S = _whitened_data(1)
        cov = build_covariance(X, Y, S)
        assert np.allclose(cov.C_x, np.eye(3), atol=1e-12)
        assert np.allclose(cov.Q_x, np.eye(3), atol=1e-10)

    def test_whitened_B_is_plain_cross_covariances(self):
        X, Y, S = _whitened_data(2)
        cov = build_covariance(X, Y, S)
        lam = 0.4
        expected = lam * cov.C_xs @ cov.C_xs.T - (1 - lam) * cov.C_xy @ cov.C_xy.T
        assert np.allclose(build_B_covariance(cov, lam), expected, atol=1e-10)

    def test_scalar_target_single_negative_eigenvalue(self):
        rng = make_rng(3)
        X = rng.standard_normal((3, 50))
        y = rng.standard_normal(3) @ X + 0.1 * rng.standard_normal(50)
        cov = build_covariance(X, y, rng.standard_normal((1, 50)))
        values = np.linalg.eigvalsh(build_B_covariance(cov, 0.0))
        assert np.sum(values < -1e-12) == 1, f"Expected one negative eigenvalue, got {values}"
        assert values[0] == pytest.approx(-float(np.sum(cov.whitened_y ** 2)), rel=1e-10)

    def test_singular_feature_covariance(self):
        rng = make_rng(4)
        row = rng.standard_normal(20)
        X = np.vstack([row, row, rng.standard_normal(20)])
        with pytest.raises(NotPositiveDefinite):
            build_covariance(X, rng.standard_normal((1, 20)), rng.standard_normal((1, 20)))

    def test_spectrum_matches_empirical_B(self):
        """Full-rank data: eig(B_cov) = eig(B) / n."""
        X, Y, S = correlated_data(seed=9, d=4, n=70)
        cov = build_covariance(X, Y, S)
        problem = build_problem_linear(X, Y, S)
        for lam in (0.0, 0.3, 0.8):
            cov_values = np.linalg.eigvalsh(build_B_covariance(cov, lam))
            emp_values = np.linalg.eigvalsh(build_B(problem, lam)) / problem.n_samples
            assert np.allclose(cov_values, emp_values, atol=1e-8), f"Spectra differ at lambda={lam}"


class TestMinMse:
    """Closed-form MSE of the best linear regressor on z = Theta x."""

    def test_zero_encoder_gives_total_variance(self):
        X, Y, S = correlated_data(seed=1)
        cov = build_covariance(X, Y, S)
        assert min_mse_given_encoder(cov, np.zeros((2, 4)), "y") == pytest.approx(np.trace(cov.C_y))

    def test_identity_encoder_reconstructs_x(self):
        X, Y, S = correlated_data(seed=2)
        cov = build_covariance(X, Y, S)
        assert min_mse_given_encoder(cov, np.eye(4), "x") == pytest.approx(0.0, abs=1e-10)

    def test_matches_least_squares_fit(self):
        X, Y, S = correlated_data(seed=3)
        cov = build_covariance(X, Y, S)
        Theta = make_rng(3).standard_normal((2, 4))
        Z = Theta @ X
        for target, T in (("y", Y), ("s", S)):
            fitted = fit_regressor(Z, T).mse(Z, T)
            assert min_mse_given_encoder(cov, Theta, target) == pytest.approx(fitted, abs=1e-9), \
                f"Closed form disagrees with the least-squares fit for target {target}"

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_gradient_descent_regressor(self, seed):
        """Plain gradient descent on the squared loss converges to the closed form."""
        rng = make_rng(100 + seed)
        d = 2 + seed % 4
        k = 1 + seed % d
        n = 200
        X = rng.standard_normal((d, n))
        Y = rng.standard_normal((2, d)) @ X + 0.3 * rng.standard_normal((2, n))
        cov = build_covariance(X, Y, rng.standard_normal((1, n)))
        Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        Theta = np.diag(np.linspace(1.0, 2.0, k)) @ Q[:k]
        Z_c, _ = center_columns(Theta @ X)
        Y_c, _ = center_columns(Y)
        step = 1.0 / np.linalg.eigvalsh(Z_c @ Z_c.T / n)[-1]
        W = np.zeros((2, k))
        for _ in range(5000):
            W -= step * ((W @ Z_c - Y_c) @ Z_c.T / n)
        descent_mse = float(np.sum((W @ Z_c - Y_c) ** 2)) / n
        assert min_mse_given_encoder(cov, Theta, "y") == pytest.approx(descent_mse, abs=1e-6), \
            f"d={d} k={k}: closed form and gradient descent disagree"

    def test_unknown_target(self):
        cov = build_covariance(*correlated_data(seed=4))
        with pytest.raises(InvalidParameter):
            min_mse_given_encoder(cov, np.eye(4), "z")

    def test_wrong_width(self):
        cov = build_covariance(*correlated_data(seed=4))
        with pytest.raises(ShapeMismatch):
            min_mse_given_encoder(cov, np.eye(3), "y")


class TestEncoderFromCovariance:
    """Encoders recovered from the whitened basis."""

    def test_factor_maps_back_to_basis(self):
        cov = build_covariance(*correlated_data(seed=5))
        G = orthonormal_columns(make_rng(5), 4, 2)
        Theta = encoder_from_covariance(cov, G)
        assert np.allclose(cov.Q_x @ Theta.T, G, atol=1e-10)

    def test_covariance_solution_matches_empirical_objectives(self):
        X, Y, S = correlated_data(seed=6, d=4, n=90)
        cov = build_covariance(X, Y, S)
        problem = build_problem_linear(X, Y, S)
        lam = 0.5
        G, _ = spectral_solve(build_B_covariance(cov, lam), SolverConfig(lam=lam))
        Theta = encoder_from_covariance(cov, G)
        _, J_y, J_s = solve(problem, SolverConfig(lam=lam))
        assert min_mse_given_encoder(cov, Theta, "y") == pytest.approx(J_y, abs=1e-8)
        assert min_mse_given_encoder(cov, Theta, "s") == pytest.approx(J_s, abs=1e-8)

    def test_objectives_equal_closed_form_on_solver_encoder(self):
        X, Y, S = correlated_data(seed=7)
        cov = build_covariance(X, Y, S)
        problem = build_problem_linear(X, Y, S)
        encoder = solve(problem, SolverConfig(lam=0.3)).encoder
        J_y, J_s = objectives(problem, encoder.G_E)
        assert min_mse_given_encoder(cov, encoder.params, "y") == pytest.approx(J_y, abs=1e-9)
        assert min_mse_given_encoder(cov, encoder.params, "s") == pytest.approx(J_s, abs=1e-9)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
