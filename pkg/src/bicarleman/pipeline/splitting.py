"""
Operator splitting for the null-sequence construction

Used by the assignment and kernel modules for:
- The operator environment: S over a labelled basis split into the null
  sequence {e_k} and the complement {e_k^perp}
- Membership of the null sequence (||S e_k|| and ||S* e_k|| tending to 0)
- Normalising the null sequence so sum ||S e_k||^{1/4} + ||S* e_k||^{1/4} <= 1
- The split S = (1 - E) S + E S with J = S E, J~ = S* E and the quarter powers B, B~
- The functionals z(f) = ||S f|| + ||S* f|| and d(h)
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    DEFAULT_JACOBI_TOLERANCE,
    DEFAULT_JACOBI_MAX_SWEEPS,
    DEFAULT_RANK_TOLERANCE,
)
from .exceptions import DimensionError, InfeasibleError
from .linalg import (
    SchmidtSystem,
    adjoint,
    as_matrix,
    as_vector,
    fractional_power_operator,
    projector,
    svd,
)
from .types import FaultSpec, MembershipReport

logger = logging.getLogger(__name__)


# ============================================================================
# OPERATOR ENVIRONMENT
# ============================================================================

@dataclass(frozen=True, eq=False)
class OperatorEnvironment:
    """
    The input operator S as an N x N complex matrix.

    null_indices label {e_k} in sequence order, complement_indices label
    {e_k^perp}; together they partition [0, N). An optional fault spec is
    carried along for the verification harness.
    """

    matrix: np.ndarray
    null_indices: Tuple[int, ...]
    complement_indices: Tuple[int, ...]
    fault: Optional[FaultSpec] = field(default=None, compare=False)

    def __post_init__(self):
        matrix = as_matrix(self.matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"operator matrix must be square, got {matrix.shape}")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'null_indices', tuple(int(i) for i in self.null_indices))
        object.__setattr__(self, 'complement_indices', tuple(int(i) for i in self.complement_indices))

        labelled = list(self.null_indices) + list(self.complement_indices)
        if sorted(labelled) != list(range(self.dim)):
            raise DimensionError(
                f"null and complement indices must partition [0, {self.dim}), "
                f"got {list(self.null_indices)} and {list(self.complement_indices)}"
            )
        if not self.complement_indices:
            raise DimensionError("complement_indices must not be empty")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def adjoint_matrix(self) -> np.ndarray:
        return adjoint(self.matrix)

    def with_null_indices(self, indices: Sequence[int]) -> "OperatorEnvironment":
        """
        Environment with a subsequence of the null sequence; dropped vectors
        move to the complement (they still belong to the basis).
        """
        kept = tuple(int(i) for i in indices)
        dropped = tuple(i for i in self.null_indices if i not in set(kept))
        return replace(self, null_indices=kept, complement_indices=self.complement_indices + dropped)

    def padded(self, dim: int) -> "OperatorEnvironment":
        """Append zero rows and columns up to dim; the new basis vectors join the complement."""
        if dim < self.dim:
            raise DimensionError(f"cannot pad dimension {self.dim} down to {dim}")
        if dim == self.dim:
            return self
        matrix = np.zeros((dim, dim), dtype=complex)
        matrix[: self.dim, : self.dim] = self.matrix
        extra = tuple(range(self.dim, dim))
        return replace(self, matrix=matrix, complement_indices=self.complement_indices + extra)

    def basis_vector(self, index: int) -> np.ndarray:
        vector = np.zeros(self.dim, dtype=complex)
        vector[index] = 1.0
        return vector


def _norms(matrix: np.ndarray, indices: Sequence[int]) -> np.ndarray:
    """||M e_i|| for each basis index i (column norms)."""
    if not len(indices):
        return np.zeros(0)
    return np.linalg.norm(matrix[:, list(indices)], axis=0)


def contributions(env: OperatorEnvironment) -> np.ndarray:
    """||S e_k||^{1/4} + ||S* e_k||^{1/4} along the null sequence."""
    return (
        _norms(env.matrix, env.null_indices) ** 0.25
        + _norms(env.adjoint_matrix, env.null_indices) ** 0.25
    )


def null_sequence_sum(env: OperatorEnvironment) -> float:
    return float(np.sum(contributions(env)))


# ============================================================================
# MEMBERSHIP AND NORMALISATION
# ============================================================================

def check_c00(env: OperatorEnvironment, tol: float) -> MembershipReport:
    """
    Report ||S e_k|| and ||S* e_k|| along the null sequence.

    The sequence qualifies when both norms at the final index are <= tol.
    Report-only: never raises for failing data.
    """
    s_norms = _norms(env.matrix, env.null_indices)
    s_star_norms = _norms(env.adjoint_matrix, env.null_indices)
    final_s = float(s_norms[-1]) if s_norms.size else float('nan')
    final_star = float(s_star_norms[-1]) if s_star_norms.size else float('nan')
    member = bool(s_norms.size) and final_s <= tol and final_star <= tol

    report: MembershipReport = {
        'null_indices': list(env.null_indices),
        's_norms': [float(v) for v in s_norms],
        's_star_norms': [float(v) for v in s_star_norms],
        'final_s_norm': final_s,
        'final_s_star_norm': final_star,
        'tolerance': tol,
        'member': member,
    }
    if member:
        logger.info(f"🔍 Null sequence of {len(env.null_indices)} vectors qualifies (final norms {final_s:.2e}, {final_star:.2e})")
    else:
        logger.warning(f"⚠️ Null sequence does not qualify at tolerance {tol:.2e}")
    return report


def normalize_null_sequence(env: OperatorEnvironment) -> OperatorEnvironment:
    """
    Keep a subsequence of {e_k} whose contribution sum is <= 1.

    Vectors are admitted smallest contribution first (ties to the earliest
    index) while the running sum stays <= 1; the survivors keep their original
    order. On ||S e_k|| = ||S* e_k|| = 4^{-k} this keeps exactly the tail k >= 6.

    Raises:
        InfeasibleError: not even one vector can be kept
    """
    values = contributions(env)
    order = sorted(range(len(values)), key=lambda position: (values[position], position))

    running = 0.0
    kept: List[int] = []
    for position in order:
        if running + values[position] > 1.0:
            break
        running += values[position]
        kept.append(position)

    if not kept:
        raise InfeasibleError(
            f"no subsequence of the {len(values)} null vectors has contribution sum <= 1 "
            f"(smallest contribution {min(values, default=float('inf')):.3e})"
        )

    indices = [env.null_indices[p] for p in sorted(kept)]
    if len(indices) < len(env.null_indices):
        logger.warning(f"⚠️ Normalisation dropped {len(env.null_indices) - len(indices)} null vectors")
    logger.info(f"✅ Normalised null sequence: kept {len(indices)} vectors, sum={running:.6f}")
    return env.with_null_indices(indices)


# ============================================================================
# SPLIT SYSTEM
# ============================================================================

@dataclass(frozen=True, eq=False)
class SplitSystem:
    """E, J = S E, J~ = S* E, their quarter powers B, B~ and Q = (1-E) S, Q~ = (1-E) S*."""

    E: np.ndarray
    J: np.ndarray
    J_tilde: np.ndarray
    B: np.ndarray
    B_tilde: np.ndarray
    Q: np.ndarray
    Q_tilde: np.ndarray
    schmidt_J: SchmidtSystem
    schmidt_J_tilde: SchmidtSystem

    @property
    def dim(self) -> int:
        return self.E.shape[0]

    def reconstructed_s(self) -> np.ndarray:
        """Q + E S with E S = (J~)*."""
        return self.Q + adjoint(self.J_tilde)

    def reconstructed_s_star(self) -> np.ndarray:
        """Q~ + E S* with E S* = J*."""
        return self.Q_tilde + adjoint(self.J)

    def j_star_from_schmidt(self) -> np.ndarray:
        """J* = sum s_n <., q_n> p_n from the Schmidt data of J."""
        system = self.schmidt_J
        return (system.right_vectors * system.singular_values) @ np.conj(system.left_vectors).T

    def nuclear_sums(self) -> Tuple[float, float]:
        """sum s_n^{1/2} and sum s~_n^{1/2}."""
        return self.schmidt_J.root_sum(0.5), self.schmidt_J_tilde.root_sum(0.5)


def build_split(
    env: OperatorEnvironment,
    tolerance: float = DEFAULT_JACOBI_TOLERANCE,
    max_sweeps: int = DEFAULT_JACOBI_MAX_SWEEPS,
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
) -> SplitSystem:
    """
    Split S along the projection E onto the null-sequence span.

    Raises:
        NumericalError: an SVD failed to converge
    """
    S = env.matrix
    S_star = env.adjoint_matrix
    E = projector(env.null_indices, env.dim)
    complement = np.eye(env.dim, dtype=complex) - E

    J = S @ E
    J_tilde = S_star @ E
    schmidt_J = svd(J, tolerance, max_sweeps, rank_tolerance)
    schmidt_J_tilde = svd(J_tilde, tolerance, max_sweeps, rank_tolerance)

    split = SplitSystem(
        E=E,
        J=J,
        J_tilde=J_tilde,
        B=fractional_power_operator(schmidt_J, 0.25),
        B_tilde=fractional_power_operator(schmidt_J_tilde, 0.25),
        Q=complement @ S,
        Q_tilde=complement @ S_star,
        schmidt_J=schmidt_J,
        schmidt_J_tilde=schmidt_J_tilde,
    )
    root_sum, root_sum_tilde = split.nuclear_sums()
    logger.info(
        f"✅ Split built: rank J={schmidt_J.rank}, rank J~={schmidt_J_tilde.rank}, "
        f"sum s^1/2={root_sum:.6f}, sum s~^1/2={root_sum_tilde:.6f}"
    )
    return split


# ============================================================================
# FUNCTIONALS
# ============================================================================

def _check_length(vector: np.ndarray, dim: int) -> None:
    if vector.shape[0] != dim:
        raise DimensionError(f"vector of length {vector.shape[0]} for dimension {dim}")


def z_functional(split: SplitSystem, env: OperatorEnvironment, f) -> float:
    """z(f) = ||S f|| + ||S* f||."""
    f = as_vector(f)
    _check_length(f, env.dim)
    return float(np.linalg.norm(env.matrix @ f) + np.linalg.norm(env.adjoint_matrix @ f))


def d_functional(split: SplitSystem, h) -> float:
    """d(h) = ||J h||^{1/4} + ||J* h||^{1/4} + ||J~ h||^{1/4} + ||J~* h||^{1/4}."""
    h = as_vector(h)
    _check_length(h, split.dim)
    total = 0.0
    for operator in (split.J, adjoint(split.J), split.J_tilde, adjoint(split.J_tilde)):
        total += float(np.linalg.norm(operator @ h)) ** 0.25
    return total
