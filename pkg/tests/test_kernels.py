"""
Tests for kernel functions, Gram matrices and double-centering.
"""
import logging

import numpy as np
import pytest

from app.engine.kernels import (
    KernelFamily,
    KernelSpec,
    center_gram,
    fit_kernel_model,
    gram,
    kernel_vector,
    median_bandwidth,
    warn_if_not_psd,
)
from app.engine.numerics import center_columns
from app.errors import InvalidParameter, ShapeMismatch


class TestGram:
    """Gram matrices for the three kernel families."""

    def test_linear_gram_is_inner_products(self, rng):
        X = rng.standard_normal((3, 10))
        assert np.allclose(gram(KernelSpec(family=KernelFamily.LINEAR), X), X.T @ X)

    def test_centered_linear_gram_matches_centered_data(self, rng):
        """D^T (X^T X) D = X~^T X~."""
        X = rng.standard_normal((3, 12))
        X_c, _ = center_columns(X)
        K_c = center_gram(gram(KernelSpec(family=KernelFamily.LINEAR), X))
        assert np.allclose(K_c, X_c.T @ X_c, atol=1e-12), "Double-centering disagrees with centered data"

    def test_centered_gram_rows_sum_to_zero(self, rng):
        K_c = center_gram(gram(KernelSpec(family=KernelFamily.RBF, bandwidth=1.0), rng.standard_normal((2, 15))))
        assert np.allclose(K_c.sum(axis=0), 0.0, atol=1e-12)
        assert np.allclose(K_c.sum(axis=1), 0.0, atol=1e-12)

    def test_rbf_entries_in_unit_interval(self, rng):
        K = gram(KernelSpec(family=KernelFamily.RBF, bandwidth=0.7), rng.standard_normal((3, 20)))
        assert np.all(K > 0.0) and np.all(K <= 1.0), "RBF values must lie in (0, 1]"
        assert np.allclose(np.diag(K), 1.0), "k(x, x) must be 1"

    def test_polynomial_formula(self):
        X = np.array([[1.0, 2.0], [0.0, 1.0]])
        K = gram(KernelSpec(family=KernelFamily.POLYNOMIAL, degree=2, coef0=1.0), X)
        # columns (1, 0) and (2, 1): inner products 1, 2, 5
        assert np.allclose(K, [[4.0, 9.0], [9.0, 36.0]]), f"Unexpected polynomial Gram {K}"

    def test_non_square_gram_rejected(self):
        with pytest.raises(ShapeMismatch):
            center_gram(np.zeros((2, 3)))


class TestKernelVector:
    """Kernel evaluations against the training samples."""

    def test_training_sample_reproduces_gram_column(self, rng):
        X = rng.standard_normal((3, 8))
        model = fit_kernel_model(KernelSpec(family=KernelFamily.RBF), X)
        assert np.allclose(kernel_vector(model, X[:, 2]), model.K[:, 2])

    def test_far_point_vanishes_under_rbf(self, rng):
        model = fit_kernel_model(KernelSpec(family=KernelFamily.RBF, bandwidth=0.5), rng.uniform(size=(3, 10)))
        k = kernel_vector(model, np.full(3, 100.0))
        assert np.all(k < 1e-12), f"Distant point still has kernel mass {k.max()}"

    def test_batch_matches_single(self, rng):
        X = rng.standard_normal((2, 6))
        model = fit_kernel_model(KernelSpec(family=KernelFamily.POLYNOMIAL, degree=3), X)
        batch = rng.standard_normal((2, 4))
        block = kernel_vector(model, batch)
        assert block.shape == (6, 4)
        assert np.allclose(block[:, 1], kernel_vector(model, batch[:, 1]))

    def test_dimension_mismatch(self, rng):
        model = fit_kernel_model(KernelSpec(family=KernelFamily.LINEAR), rng.standard_normal((3, 5)))
        with pytest.raises(ShapeMismatch):
            kernel_vector(model, np.zeros(2))


class TestBandwidth:
    """Median heuristic and explicit bandwidths."""

    def test_median_is_positive_and_deterministic(self, rng):
        X = rng.standard_normal((3, 50))
        first = median_bandwidth(X, seed=1)
        assert first > 0.0
        assert first == median_bandwidth(X, seed=1), "Same seed gave a different bandwidth"

    def test_single_point_falls_back(self):
        assert median_bandwidth(np.zeros((2, 1))) == 1.0

    def test_model_records_resolved_bandwidth(self, rng):
        X = rng.standard_normal((2, 30))
        model = fit_kernel_model(KernelSpec(family=KernelFamily.RBF), X)
        assert model.resolved_bandwidth == pytest.approx(median_bandwidth(X))

    def test_explicit_bandwidth_is_kept(self, rng):
        model = fit_kernel_model(KernelSpec(family=KernelFamily.RBF, bandwidth=2.5), rng.standard_normal((2, 5)))
        assert model.resolved_bandwidth == 2.5


class TestKernelSpec:
    """Validation and serialization of kernel settings."""

    def test_invalid_degree(self):
        with pytest.raises(InvalidParameter):
            KernelSpec(family=KernelFamily.POLYNOMIAL, degree=0)

    def test_negative_bandwidth(self):
        with pytest.raises(InvalidParameter):
            KernelSpec(family=KernelFamily.RBF, bandwidth=-1.0)

    def test_dict_round_trip(self):
        spec = KernelSpec(family=KernelFamily.POLYNOMIAL, degree=3, coef0=0.5)
        assert KernelSpec.from_dict(spec.to_dict()) == spec

    def test_family_accepts_string(self):
        assert KernelSpec(family="linear").family == KernelFamily.LINEAR


class TestPsdWarning:
    """Indefinite Gram spectra are reported, not fatal."""

    def test_warns_on_negative_spectrum(self, caplog):
        with caplog.at_level(logging.WARNING, logger="app.engine.kernels"):
            assert warn_if_not_psd(-1e-3, 1.0)
        assert "not PSD" in caplog.text

    def test_round_off_is_tolerated(self):
        assert not warn_if_not_psd(-1e-12, 1.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
