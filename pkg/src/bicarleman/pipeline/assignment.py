"""
Basis assignment: the unitary U between the operator basis and the wavelets

Used by the kernel module for:
- Splitting the null sequence into {x_k} (sent to g_k) and {v_k} (sent to h_{m(k)})
- Pairing the complement {e_k^perp} with the fast-decaying h_{n(k)}
- The permutation matrix U and its slot bookkeeping
- Certified summability reports for the four dominating series
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import AssignmentError, DimensionError
from .splitting import OperatorEnvironment, SplitSystem, d_functional, z_functional
from .types import SummabilityFamily, SummabilityOrder, SummabilityReport
from .wavelets import WaveletBasis, choose_h_subsequence, g_candidates

logger = logging.getLogger(__name__)

# sum_{m >= 1} 2^{-m/2}
_H_SERIES = math.sqrt(2.0) + 1.0


# ============================================================================
# X / V SPLIT
# ============================================================================

def admission_threshold(k: int, g_row: Sequence[float], i_max: int) -> float:
    """2^{-k} / (1 + max_{i <= min(k, i_max)} G_{k,i})."""
    top = min(k, i_max)
    return 2.0 ** (-k) / (1.0 + max(g_row[: top + 1]))


def select_x_subsequence(
    d_values: Sequence[float],
    g_bounds: Sequence[Sequence[float]],
    i_max: int,
) -> Tuple[List[int], List[int]]:
    """
    Greedy diagonal selection over a sequence of d values.

    The candidate at each position becomes the next x (k = number admitted so
    far + 1) when d <= admission_threshold(k, g_bounds[k-1], i_max); otherwise
    it becomes a v.

    Args:
        d_values: d(e) along the null sequence
        g_bounds: g_bounds[k-1][i] = G_{k,i}, the bound on the k-th g candidate
        i_max: Highest derivative order

    Returns:
        (x positions, v positions) into d_values
    """
    x_positions: List[int] = []
    v_positions: List[int] = []
    for position, d in enumerate(d_values):
        k = len(x_positions) + 1
        if k <= len(g_bounds) and d <= admission_threshold(k, g_bounds[k - 1], i_max):
            x_positions.append(position)
        else:
            v_positions.append(position)
    return x_positions, v_positions


def _g_table(basis: WaveletBasis, labels: Sequence[int], i_max: int) -> List[List[float]]:
    return [[basis.bound(n, i) for i in range(i_max + 1)] for n in labels]


def split_x_v(
    env: OperatorEnvironment,
    split: SplitSystem,
    basis: WaveletBasis,
    i_max: int,
    required_x: int = 0,
) -> Tuple[List[int], List[int]]:
    """
    Split the null sequence into x and v basis indices.

    With required_x = 0 an empty x family is accepted; every null vector then
    goes to an h label.

    Raises:
        AssignmentError: fewer than required_x vectors are admissible
    """
    basis.check_order(i_max)
    count = len(env.null_indices)
    labels = g_candidates(basis.enumeration, count) if count else []
    d_values = [d_functional(split, env.basis_vector(index)) for index in env.null_indices]
    x_positions, v_positions = select_x_subsequence(d_values, _g_table(basis, labels, i_max), i_max)

    if len(x_positions) < required_x:
        raise AssignmentError(
            f"only {len(x_positions)} of {count} null vectors are admissible as x, {required_x} required; "
            f"supply a longer null sequence with smaller d values"
        )
    x_indices = [env.null_indices[p] for p in x_positions]
    v_indices = [env.null_indices[p] for p in v_positions]
    logger.info(f"🔍 x/v split: {len(x_indices)} x, {len(v_indices)} v")
    return x_indices, v_indices


# ============================================================================
# ASSIGNMENT
# ============================================================================

@dataclass(frozen=True, eq=False)
class Assignment:
    """
    Index bookkeeping of U.

    x_indices map to g_indices, v_indices to h_for_v and complement indices
    (in the environment's order) to h_for_complement. The coefficient space
    of the wavelet side is the ascending tuple of used labels (slots);
    U_matrix[slot(image(b)), b] = 1.
    """

    x_indices: Tuple[int, ...]
    v_indices: Tuple[int, ...]
    complement_indices: Tuple[int, ...]
    g_indices: Tuple[int, ...]
    h_for_v: Tuple[int, ...]
    h_for_complement: Tuple[int, ...]
    slots: Tuple[int, ...]
    U_matrix: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.slots)

    @property
    def images(self) -> Dict[int, int]:
        """Basis index -> wavelet label."""
        mapping = dict(zip(self.x_indices, self.g_indices))
        mapping.update(zip(self.v_indices, self.h_for_v))
        mapping.update(zip(self.complement_indices, self.h_for_complement))
        return mapping

    @property
    def h_indices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.h_for_v + self.h_for_complement))

    def slot_of(self, label: int) -> int:
        return self.slots.index(label)

    def preimage(self, label: int) -> int:
        """Basis index b with U e_b = u_label (y_k = U^{-1} h_k for h labels)."""
        for index, image in self.images.items():
            if image == label:
                return index
        raise KeyError(f"wavelet label {label} is not used by this assignment")

    def expected_u(self) -> np.ndarray:
        """The permutation the index maps describe."""
        matrix = np.zeros((self.dim, self.dim), dtype=complex)
        for index, label in self.images.items():
            matrix[self.slot_of(label), index] = 1.0
        return matrix

    def with_swapped_rows(self, a: int, b: int) -> "Assignment":
        """Copy whose U_matrix has rows a and b exchanged (the index maps are kept)."""
        if not (0 <= a < self.dim and 0 <= b < self.dim):
            raise DimensionError(f"cannot swap rows {a} and {b} of a {self.dim} x {self.dim} matrix")
        corrupted = np.array(self.U_matrix, copy=True)
        corrupted[[a, b]] = corrupted[[b, a]]
        corrupted.setflags(write=False)
        return Assignment(
            self.x_indices, self.v_indices, self.complement_indices, self.g_indices,
            self.h_for_v, self.h_for_complement, self.slots, corrupted,
        )


def assign(
    env: OperatorEnvironment,
    split: SplitSystem,
    basis: WaveletBasis,
    i_max: Optional[int] = None,
    required_x: int = 0,
) -> Assignment:
    """
    Build U: x_k -> g_k, v_k -> h_{m(k)}, e_k^perp -> h_{n(k)}.

    The h labels with the fastest D decay go to the complement in its given
    order; the remaining h labels go to v in ascending label order.

    Raises:
        AssignmentError: too few admissible x candidates
        IndexRangeError: the enumeration runs out of h or g labels
    """
    i_max = basis.i_max if i_max is None else i_max
    x_indices, v_indices = split_x_v(env, split, basis, i_max, required_x)
    enumeration = basis.enumeration

    g_labels = g_candidates(enumeration, len(x_indices)) if x_indices else []
    h_count = len(env.complement_indices) + len(v_indices)
    h_labels = choose_h_subsequence(enumeration, h_count)
    ranked = sorted(h_labels, key=lambda n: (enumeration.d_value(n), n))
    h_for_complement = ranked[: len(env.complement_indices)]
    h_for_v = sorted(ranked[len(env.complement_indices):])

    images = dict(zip(x_indices, g_labels))
    images.update(zip(v_indices, h_for_v))
    images.update(zip(env.complement_indices, h_for_complement))
    slots = tuple(sorted(images.values()))

    U = np.zeros((env.dim, env.dim), dtype=complex)
    for index, label in images.items():
        U[slots.index(label), index] = 1.0
    U.setflags(write=False)

    assignment = Assignment(
        x_indices=tuple(x_indices),
        v_indices=tuple(v_indices),
        complement_indices=tuple(env.complement_indices),
        g_indices=tuple(g_labels),
        h_for_v=tuple(h_for_v),
        h_for_complement=tuple(h_for_complement),
        slots=slots,
        U_matrix=U,
    )
    logger.info(f"✅ Assignment built over {len(slots)} wavelet slots (labels {slots[0]}..{slots[-1]})")
    return assignment


# ============================================================================
# SUMMABILITY
# ============================================================================

def _family(partial_sum: float, bound: float) -> SummabilityFamily:
    return {'partial_sum': float(partial_sum), 'bound': float(bound)}


def summability_report(
    assignment: Assignment,
    split: SplitSystem,
    env: OperatorEnvironment,
    basis: WaveletBasis,
    i_max: Optional[int] = None,
) -> SummabilityReport:
    """
    Certified partial sums of the dominating series at each order i <= i_max.

    H and G come from the bounds D_n A_i. Bounds:
    - sum H_{k,i} <= A_i (sqrt 2 + 1)
    - z-weighted h families <= max z * A_i (sqrt 2 + 1)
    - sum d(x_k)(G_{k,i} + 1) <= exact head over k < i + 2^{1 - max(i, 1)}

    Report-only: violations are listed, never raised.
    """
    i_max = basis.i_max if i_max is None else i_max
    z_v = [z_functional(split, env, env.basis_vector(b)) for b in assignment.v_indices]
    z_c = [z_functional(split, env, env.basis_vector(b)) for b in assignment.complement_indices]
    d_x = [d_functional(split, env.basis_vector(b)) for b in assignment.x_indices]

    orders: List[SummabilityOrder] = []
    violations: List[str] = []
    for i in range(i_max + 1):
        a_i = basis.enumeration.a_value(i)
        h_terms = [basis.bound(n, i) for n in assignment.h_indices]
        v_terms = [z * basis.bound(n, i) for z, n in zip(z_v, assignment.h_for_v)]
        c_terms = [z * basis.bound(n, i) for z, n in zip(z_c, assignment.h_for_complement)]
        x_terms = [d * (basis.bound(n, i) + 1.0) for d, n in zip(d_x, assignment.g_indices)]

        head = sum(x_terms[: max(i - 1, 0)])  # k < i, k 1-based
        entry: SummabilityOrder = {
            'order': i,
            'h_sum': _family(sum(h_terms), a_i * _H_SERIES),
            'v_sum': _family(sum(v_terms), max(z_v, default=0.0) * a_i * _H_SERIES),
            'complement_sum': _family(sum(c_terms), max(z_c, default=0.0) * a_i * _H_SERIES),
            'x_sum': _family(sum(x_terms), head + 2.0 ** (1 - max(i, 1))),
        }
        for name in ('h_sum', 'v_sum', 'complement_sum', 'x_sum'):
            family = entry[name]
            if family['partial_sum'] > family['bound']:
                violations.append(
                    f"order {i}: {name} {family['partial_sum']:.6e} exceeds bound {family['bound']:.6e}"
                )
        orders.append(entry)

    for violation in violations:
        logger.warning(f"⚠️ Summability violation, {violation}")
    return {'orders': orders, 'violations': violations, 'ok': not violations}
