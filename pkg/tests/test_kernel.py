"""
Tests for the kernel series, grid evaluation and truncation bounds
"""

import numpy as np
import pytest

from bicarleman.pipeline.exceptions import ConfigurationError, DimensionError
from bicarleman.pipeline.kernel import (
    KERNEL,
    KERNEL_STAR,
    carleman_derivative_bound,
    carleman_function,
    carleman_function_star,
    carleman_norms,
    eval_F,
    eval_Ftilde,
    eval_K,
    eval_K_star,
    eval_P,
    eval_Ptilde,
    kernel_from_matrix,
    kernel_grid,
    transformed_operator,
    truncation_bound,
)
from bicarleman.pipeline.linalg import adjoint

S_POINTS = np.array([-3.0, -0.7, 0.0, 1.3, 4.0])
T_POINTS = np.array([-2.5, -0.1, 0.6, 2.0])


class TestSeries:
    def test_rank_one_term_counts(self, rank_one_pipeline):
        _, _, _, model = rank_one_pipeline

        assert len(model.P_terms) == 1
        assert len(model.Ptilde_terms) == 1
        assert len(model.F_terms) == 1
        assert len(model.Ftilde_terms) == 1
        assert model.slots == (1, 5, 13, 29)
        assert model.P_terms.labels == (29,)

    def test_zero_operator_has_no_schmidt_terms(self, zero_pipeline):
        _, _, _, model = zero_pipeline

        assert len(model.P_terms) == 1
        assert len(model.F_terms) == 0
        assert len(model.Ftilde_terms) == 0
        assert not np.any(model.P_terms.right)

    def test_certified_bounds_have_one_column_per_order(self, rank_one_pipeline):
        _, _, _, model = rank_one_pipeline

        assert model.P_terms.left_sup.shape == (1, 3)
        assert len(model.bound_constants['C_star']) == 3
        assert model.z_complement[0] == pytest.approx(np.hypot(0.48, 8e-5) + np.hypot(0.48, 6e-5))


class TestEvaluation:
    def test_kernel_matches_transformed_operator(self, rank_one_pipeline, basis):
        env, _, assignment, model = rank_one_pipeline
        T = transformed_operator(assignment, env)

        for i, j in ((0, 0), (1, 0), (0, 2)):
            expected = kernel_from_matrix(T, model.slots, basis, S_POINTS, T_POINTS, i, j)
            actual = kernel_grid(model, basis, S_POINTS, T_POINTS, i, j)
            assert np.max(np.abs(actual - expected)) < 1e-12 * max(1.0, np.max(np.abs(expected)))

    def test_adjoint_kernel_matches_adjoint_operator(self, rank_one_pipeline, basis):
        env, _, assignment, model = rank_one_pipeline
        T_star = adjoint(transformed_operator(assignment, env))

        expected = kernel_from_matrix(T_star, model.slots, basis, S_POINTS, T_POINTS)
        actual = kernel_grid(model, basis, S_POINTS, T_POINTS, which=KERNEL_STAR)
        assert np.max(np.abs(actual - expected)) < 1e-12

    def test_conjugate_symmetry(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline

        K = kernel_grid(model, basis, S_POINTS, T_POINTS)
        K_star = kernel_grid(model, basis, T_POINTS, S_POINTS, which=KERNEL_STAR)
        assert np.max(np.abs(K - np.conj(K_star).T)) < 1e-12

    def test_pointwise_components_add_up(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline
        s, t = 0.4, -1.1

        assert eval_K(model, basis, s, t) == pytest.approx(
            eval_P(model, basis, s, t) + eval_Ftilde(model, basis, s, t), abs=1e-14
        )
        assert eval_K_star(model, basis, s, t, 1, 1) == pytest.approx(
            eval_Ptilde(model, basis, s, t, 1, 1) + eval_F(model, basis, s, t, 1, 1), abs=1e-13
        )

    def test_zero_operator_kernel_vanishes(self, zero_pipeline, basis):
        _, _, _, model = zero_pipeline

        assert not np.any(kernel_grid(model, basis, S_POINTS, T_POINTS, 2, 1))

    def test_unknown_kernel_raises(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline

        with pytest.raises(ConfigurationError):
            kernel_grid(model, basis, S_POINTS, T_POINTS, which="L")

    def test_order_above_limit_raises(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline

        with pytest.raises(ConfigurationError):
            eval_K(model, basis, 0.0, 0.0, 3, 0)

    def test_kernel_from_matrix_shape_mismatch(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline

        with pytest.raises(DimensionError):
            kernel_from_matrix(np.zeros((3, 3)), model.slots, basis, S_POINTS, T_POINTS)


class TestCarleman:
    def test_coefficients_match_operator(self, rank_one_pipeline, basis):
        env, _, assignment, model = rank_one_pipeline
        T = transformed_operator(assignment, env)
        s = 0.8

        phi = basis.basis_matrix(model.slots, [s])
        assert np.allclose(carleman_function(model, basis, s), np.conj(phi @ T)[0], atol=1e-13)
        assert np.allclose(carleman_function_star(model, basis, s), np.conj(phi @ adjoint(T))[0], atol=1e-13)

    def test_norms_within_certified_bound(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline
        points = np.linspace(-10.0, 10.0, 41)

        for i in range(model.i_max + 1):
            assert carleman_norms(model, basis, points, i).max() <= carleman_derivative_bound(model, basis, i)

    def test_bound_extends_beyond_tabulated_orders(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline

        assert carleman_derivative_bound(model, basis, model.i_max + 2) > carleman_derivative_bound(
            model, basis, model.i_max
        )


class TestTruncation:
    def test_no_cap_means_nothing_omitted(self, rank_one_pipeline):
        _, _, _, model = rank_one_pipeline

        assert all(value == 0.0 for value in model.truncation_budget.values())

    def test_cap_zero_omits_everything(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline
        capped = model.with_term_cap(0)

        assert not np.any(kernel_grid(capped, basis, S_POINTS, T_POINTS))
        full = np.max(np.abs(kernel_grid(model, basis, S_POINTS, T_POINTS)))
        assert truncation_bound(capped, 0, 0) >= full
        assert truncation_bound(capped, 1, 1, KERNEL_STAR) > 0.0

    def test_negative_cap_raises(self, rank_one_pipeline):
        _, _, _, model = rank_one_pipeline

        with pytest.raises(ConfigurationError):
            model.with_term_cap(-1)

    def test_scaled_p_coefficient(self, rank_one_pipeline, basis):
        _, _, _, model = rank_one_pipeline
        slot = int(np.argmax(np.abs(model.P_terms.right[0])))
        faulty = model.with_scaled_p_coefficient(0, slot, 2.0)

        assert faulty.P_terms.right[0, slot] == 2.0 * model.P_terms.right[0, slot]
        assert not np.allclose(
            kernel_grid(faulty, basis, S_POINTS, T_POINTS), kernel_grid(model, basis, S_POINTS, T_POINTS)
        )
        with pytest.raises(DimensionError):
            model.with_scaled_p_coefficient(1, 0, 2.0)

    def test_series_selection(self, rank_one_pipeline):
        _, _, _, model = rank_one_pipeline

        assert [s.name for s in model.series(KERNEL)] == ["P", "F_tilde"]
        assert [s.name for s in model.series(KERNEL_STAR)] == ["P_tilde", "F"]
