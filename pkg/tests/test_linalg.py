"""
Tests for the linear-algebra core
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bicarleman.pipeline.exceptions import ConfigurationError, DimensionError, NumericalError
from bicarleman.pipeline.linalg import (
    SchmidtSystem,
    adjoint,
    as_matrix,
    as_vector,
    basis_vector,
    fractional_power_operator,
    inner,
    norm,
    projector,
    svd,
)

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
complex_pairs = st.lists(st.tuples(finite, finite, finite, finite), min_size=1, max_size=8)


def random_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


class TestVectors:
    def test_inner_is_linear_in_first_argument(self):
        a = np.array([1.0 + 2.0j, -1.0j, 0.5])
        b = np.array([0.0, 1.0, 2.0 - 1.0j])

        assert inner(2.0j * a, b) == pytest.approx(2.0j * inner(a, b))
        assert inner(a, 2.0j * b) == pytest.approx(-2.0j * inner(a, b))

    @given(complex_pairs)
    def test_inner_conjugate_symmetry(self, entries):
        a = np.array([complex(x, y) for x, y, _, _ in entries])
        b = np.array([complex(u, v) for _, _, u, v in entries])

        assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-9)

    def test_norm_of_basis_vector(self):
        assert norm(basis_vector(2, 5)) == 1.0

    def test_length_mismatch_raises(self):
        with pytest.raises(DimensionError):
            inner([1.0, 2.0], [1.0])

    def test_non_finite_vector_raises(self):
        with pytest.raises(DimensionError):
            as_vector([1.0, np.nan])

    def test_basis_vector_out_of_range(self):
        with pytest.raises(DimensionError):
            basis_vector(3, 3)

    def test_empty_matrix_raises(self):
        with pytest.raises(DimensionError):
            as_matrix(np.zeros((0, 2)))


class TestAdjointAndProjector:
    @given(st.lists(st.tuples(finite, finite), min_size=9, max_size=9))
    def test_adjoint_is_involution(self, entries):
        matrix = np.array([complex(x, y) for x, y in entries]).reshape(3, 3)

        assert np.array_equal(adjoint(adjoint(matrix)), matrix)

    @given(st.sets(st.integers(min_value=0, max_value=6)))
    def test_projector_is_idempotent_and_self_adjoint(self, indices):
        E = projector(indices, 7)

        assert np.array_equal(E @ E, E)
        assert np.array_equal(adjoint(E), E)
        assert int(np.trace(E).real) == len(indices)

    def test_projector_rejects_out_of_range(self):
        with pytest.raises(DimensionError):
            projector([0, 5], 5)


class TestSvd:
    def test_reconstructs_random_matrix(self, rng):
        M = random_matrix(rng, 5, 4)
        system = svd(M)

        assert system.reconstruction_error(M) < 1e-12
        assert system.orthonormality_defect() < 1e-12
        assert system.shape == (5, 4)

    def test_singular_values_match_numpy(self, rng):
        M = random_matrix(rng, 4, 6)
        system = svd(M)

        expected = np.linalg.svd(M, compute_uv=False)
        assert np.allclose(system.singular_values, expected, rtol=1e-12, atol=1e-13)
        assert np.all(np.diff(system.singular_values) <= 0)

    def test_rank_one_matrix(self, rng):
        q = random_matrix(rng, 4, 1)
        p = random_matrix(rng, 4, 1)
        M = q @ np.conj(p).T
        system = svd(M)

        assert system.rank == 1
        assert np.all(system.singular_values[1:] == 0.0)
        assert system.reconstruction_error(M) < 1e-12
        assert system.orthonormality_defect() < 1e-12
        assert system.positive().singular_values.shape == (1,)

    def test_zero_matrix(self):
        system = svd(np.zeros((3, 3)))

        assert system.rank == 0
        assert np.array_equal(system.left_vectors, np.eye(3))
        assert system.reconstruction_error(np.zeros((3, 3))) == 0.0

    def test_phase_convention(self, rng):
        system = svd(random_matrix(rng, 4, 4))

        for n in range(4):
            column = system.left_vectors[:, n]
            pivot = column[np.argmax(np.abs(column))]
            assert pivot.imag == pytest.approx(0.0, abs=1e-15)
            assert pivot.real > 0

    def test_deterministic(self, rng):
        M = random_matrix(rng, 4, 4)
        first, second = svd(M), svd(M)

        assert np.array_equal(first.left_vectors, second.left_vectors)
        assert np.array_equal(first.singular_values, second.singular_values)

    def test_no_convergence_raises(self, rng):
        with pytest.raises(NumericalError) as info:
            svd(random_matrix(rng, 6, 6), tolerance=1e-300, max_sweeps=1)

        assert info.value.residual > 0

    def test_schmidt_arrays_are_read_only(self, rng):
        system = svd(random_matrix(rng, 3, 3))

        with pytest.raises(ValueError):
            system.singular_values[0] = 1.0


class TestFractionalPower:
    def test_exponent_one_reproduces_matrix(self, rng):
        M = random_matrix(rng, 4, 4)

        assert np.max(np.abs(fractional_power_operator(svd(M), 1.0) - M)) < 1e-12

    def test_quarter_power_squared_twice(self, rng):
        M = random_matrix(rng, 4, 4)
        system = svd(M)
        B = fractional_power_operator(system, 0.25)

        # (B B*)^2 = (M M*)^{1/2}
        half = (system.left_vectors * system.singular_values) @ adjoint(system.left_vectors)
        BB = B @ adjoint(B)
        assert np.max(np.abs(BB @ BB - half)) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_schwarz_chain_on_unit_vectors(self, seed):
        rng = np.random.default_rng(seed)
        J = random_matrix(rng, 4, 4) * 1e-3
        B = fractional_power_operator(svd(J), 0.25)
        f = random_matrix(rng, 4, 1)[:, 0]
        f /= np.linalg.norm(f)

        assert np.linalg.norm(B @ f) <= np.linalg.norm(J @ f) ** 0.25 + 1e-12

    def test_non_positive_exponent_raises(self, rng):
        with pytest.raises(ConfigurationError):
            fractional_power_operator(svd(random_matrix(rng, 2, 2)), 0.0)

    def test_root_sum(self):
        system = SchmidtSystem(np.array([4.0, 1.0, 0.0]), np.eye(3), np.eye(3))

        assert system.root_sum(0.5) == 3.0
        assert system.rank == 2
