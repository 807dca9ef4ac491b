"""
Dense complex linear algebra at desk scale

Vectors and matrices are plain numpy arrays of dtype complex128 holding
coefficients with respect to a fixed orthonormal basis. This module adds
the pieces the construction needs on top of numpy:

- inner products and adjoints in the convention <a, b> = sum a_i conj(b_i)
- a one-sided Jacobi singular value decomposition returning a SchmidtSystem
- fractional powers sum s_n^e <., p_n> q_n of a Schmidt system
- diagonal orthogonal projectors
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .constants import (
    DEFAULT_JACOBI_TOLERANCE,
    DEFAULT_JACOBI_MAX_SWEEPS,
    DEFAULT_RANK_TOLERANCE,
)
from .exceptions import ConfigurationError, DimensionError, NumericalError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


# ============================================================================
# VALIDATION HELPERS
# ============================================================================

def as_vector(values) -> np.ndarray:
    """Coerce to a finite 1-D complex array."""
    vector = np.asarray(values, dtype=complex)
    if vector.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise DimensionError("vector has non-finite entries")
    return vector


def as_matrix(values) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    matrix = np.asarray(values, dtype=complex)
    if matrix.ndim != 2 or 0 in matrix.shape:
        raise DimensionError(f"expected a non-empty matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DimensionError("matrix has non-finite entries")
    return matrix


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


# ============================================================================
# BASIC OPERATIONS
# ============================================================================

def inner(a, b) -> complex:
    """<a, b> = sum a_i conj(b_i); linear in the first argument."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return complex(np.vdot(b, a))


def norm(v) -> float:
    return float(np.linalg.norm(as_vector(v)))


def adjoint(matrix) -> np.ndarray:
    """Conjugate transpose; an exact involution."""
    return np.conj(as_matrix(matrix)).T


def max_entry_norm(matrix) -> float:
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix)))


def projector(indices: Iterable[int], dim: int) -> np.ndarray:
    """
    Orthogonal projection onto the span of the given basis vectors.

    Args:
        indices: Basis positions spanning the range
        dim: Ambient dimension

    Returns:
        Diagonal 0/1 matrix E with E @ E == E and E == E^H exactly
    """
    if dim < 1:
        raise DimensionError(f"dimension must be positive, got {dim}")
    positions = sorted(set(int(i) for i in indices))
    if positions and (positions[0] < 0 or positions[-1] >= dim):
        raise DimensionError(f"indices {positions} out of range [0, {dim})")
    matrix = np.zeros((dim, dim), dtype=complex)
    matrix[positions, positions] = 1.0
    return matrix


def basis_vector(index: int, dim: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise DimensionError(f"index {index} out of range [0, {dim})")
    vector = np.zeros(dim, dtype=complex)
    vector[index] = 1.0
    return vector


# ============================================================================
# SCHMIDT SYSTEMS
# ============================================================================

@dataclass(frozen=True, eq=False)
class SchmidtSystem:
    """
    Singular value decomposition M = sum_n s_n <., p_n> q_n.

    singular_values is non-increasing; left_vectors holds q_n as columns,
    right_vectors holds p_n as columns. Values below the rank threshold are
    stored as exact zeros.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'singular_values', _frozen(np.asarray(self.singular_values, dtype=float)))
        object.__setattr__(self, 'left_vectors', _frozen(np.asarray(self.left_vectors, dtype=complex)))
        object.__setattr__(self, 'right_vectors', _frozen(np.asarray(self.right_vectors, dtype=complex)))
        count = self.singular_values.shape[0]
        if self.left_vectors.shape[1] != count or self.right_vectors.shape[1] != count:
            raise DimensionError("singular vectors do not match the number of singular values")

    @property
    def shape(self) -> tuple:
        return (self.left_vectors.shape[0], self.right_vectors.shape[0])

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.singular_values > 0.0))

    def positive(self) -> "SchmidtSystem":
        """The terms with s_n > 0 only."""
        r = self.rank
        return SchmidtSystem(
            self.singular_values[:r],
            self.left_vectors[:, :r],
            self.right_vectors[:, :r],
        )

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ np.conj(self.right_vectors).T

    def reconstruction_error(self, matrix) -> float:
        return max_entry_norm(self.reconstruct() - as_matrix(matrix))

    def orthonormality_defect(self) -> float:
        """Largest deviation of the left and right Gram matrices from identity."""
        defects = []
        for vectors in (self.left_vectors, self.right_vectors):
            gram = np.conj(vectors).T @ vectors
            defects.append(max_entry_norm(gram - np.eye(gram.shape[0])))
        return max(defects)

    def root_sum(self, exponent: float = 0.5) -> float:
        """sum_n s_n^exponent (finite at desk scale; dominates the F series)."""
        return float(np.sum(self.singular_values ** exponent))


def svd(
    matrix,
    tolerance: float = DEFAULT_JACOBI_TOLERANCE,
    max_sweeps: int = DEFAULT_JACOBI_MAX_SWEEPS,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> SchmidtSystem:
    """
    One-sided (Hestenes) Jacobi SVD of a complex matrix.

    Columns of a working copy of M are rotated pairwise until they are
    mutually orthogonal, which diagonalises M^H M. The column norms are the
    singular values, the normalised columns are the q_n and the accumulated
    rotations are the p_n.

    Args:
        matrix: Complex matrix (m x n)
        tolerance: Stop when sqrt(sum |<a_p, a_q>|^2) / ||M||_F^2 drops below this
        max_sweeps: Sweeps allowed before giving up
        rank_tolerance: s_n < rank_tolerance * s_1 is stored as 0

    Returns:
        SchmidtSystem with min(m, n) terms

    Raises:
        NumericalError: no convergence within max_sweeps
    """
    source = as_matrix(matrix)
    rows, cols = source.shape
    count = min(rows, cols)
    work = source.copy()
    rotations = np.eye(cols, dtype=complex)

    total = float(np.sum(np.abs(work) ** 2))
    if total == 0.0:
        return SchmidtSystem(
            np.zeros(count),
            np.eye(rows, dtype=complex)[:, :count],
            np.eye(cols, dtype=complex)[:, :count],
        )

    off_mass = math.inf
    for sweep in range(max_sweeps):
        off_sq = 0.0
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                col_p = work[:, p]
                col_q = work[:, q]
                alpha = float(np.vdot(col_p, col_p).real)
                beta = float(np.vdot(col_q, col_q).real)
                gamma = complex(np.vdot(col_p, col_q))
                size = abs(gamma)
                off_sq += size * size
                if size == 0.0 or size <= _EPS * math.sqrt(alpha * beta):
                    continue
                zeta = (beta - alpha) / (2.0 * size)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                phase = gamma / size
                for target in (work, rotations):
                    old_p = target[:, p].copy()
                    old_q = target[:, q].copy()
                    target[:, p] = c * old_p - s * np.conj(phase) * old_q
                    target[:, q] = s * phase * old_p + c * old_q
                rotated = True
        off_mass = math.sqrt(off_sq) / total
        logger.debug(f"Jacobi sweep {sweep + 1}: off-diagonal mass {off_mass:.3e}")
        if off_mass < tolerance or not rotated:
            break
    else:
        raise NumericalError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps", off_mass)

    norms = np.linalg.norm(work, axis=0)
    order = np.argsort(-norms, kind="stable")[:count]
    values = norms[order].copy()
    right = rotations[:, order].copy()

    threshold = rank_tolerance * values[0]
    values[values < threshold] = 0.0
    rank = int(np.count_nonzero(values > 0.0))

    left = np.zeros((rows, count), dtype=complex)
    left[:, :rank] = work[:, order[:rank]] / values[:rank]
    if rank < count:
        completion, _ = np.linalg.qr(np.hstack([left[:, :rank], np.eye(rows, dtype=complex)]))
        left[:, rank:] = completion[:, rank:count]

    # Deterministic phase: largest-magnitude entry of each q_n real positive
    for n in range(count):
        pivot = left[int(np.argmax(np.abs(left[:, n]))), n]
        phase = pivot / abs(pivot)
        left[:, n] /= phase
        right[:, n] /= phase

    return SchmidtSystem(values, left, right)


def fractional_power_operator(system: SchmidtSystem, exponent: float) -> np.ndarray:
    """
    The operator sum_n s_n^exponent <., p_n> q_n.

    With exponent 1/4 applied to the Schmidt system of J this is the
    auxiliary operator B, which satisfies ||B f|| <= ||J f||^{1/4} on unit f.
    """
    if not exponent > 0:
        raise ConfigurationError(f"exponent must be positive, got {exponent}")
    powers = system.singular_values ** exponent
    return (system.left_vectors * powers) @ np.conj(system.right_vectors).T
