"""
Kernel assembly: K = P + F~ and K* = P~ + F

Every series is stored as weights w_k with left and right coefficient
vectors L_k, R_k over the wavelet slots, so that

    K(s, t) = sum_k w_k L_k(s) conj(R_k(t)),    L_k(s) = sum_a L_k[a] u_{slot a}(s)

Derivatives act termwise through the basis matrices Phi_i(s), which makes a
tensor grid cost two matrix products. Per-term certified sup-norm bounds are
computed at build time and drive the truncation bounds.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .assignment import Assignment
from .exceptions import ConfigurationError, DimensionError
from .linalg import adjoint
from .splitting import OperatorEnvironment, SplitSystem, z_functional
from .wavelets import WaveletBasis

logger = logging.getLogger(__name__)

KERNEL = "K"
KERNEL_STAR = "K_star"


# ============================================================================
# SERIES
# ============================================================================

@dataclass(frozen=True, eq=False)
class KernelSeries:
    """
    One bilinear series sum_k w_k L_k(s) conj(R_k(t)).

    left_sup[k, i] and right_sup[k, i] are certified bounds on
    sup |L_k^(i)| and sup |R_k^(i)|.
    """

    name: str
    weights: np.ndarray
    left: np.ndarray
    right: np.ndarray
    left_sup: np.ndarray
    right_sup: np.ndarray
    labels: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return int(self.weights.shape[0])

    def head(self, count: Optional[int]) -> "KernelSeries":
        if count is None or count >= len(self):
            return self
        return self._slice(slice(0, count))

    def tail(self, count: Optional[int]) -> "KernelSeries":
        if count is None or count >= len(self):
            return self._slice(slice(0, 0))
        return self._slice(slice(count, None))

    def _slice(self, part: slice) -> "KernelSeries":
        return replace(
            self,
            weights=self.weights[part],
            left=self.left[part],
            right=self.right[part],
            left_sup=self.left_sup[part],
            right_sup=self.right_sup[part],
            labels=self.labels[part],
        )

    def grid(self, phi_s: np.ndarray, phi_t: np.ndarray) -> np.ndarray:
        """Values on the tensor grid of the points behind phi_s and phi_t."""
        left_values = (phi_s @ self.left.T) * self.weights
        right_values = phi_t @ self.right.T
        return left_values @ np.conj(right_values).T

    def carleman(self, phi_s: np.ndarray) -> np.ndarray:
        """Coefficient vectors of conj(series(s, .)), one row per point."""
        return (np.conj(phi_s @ self.left.T) * self.weights) @ self.right

    def scaled(self, term: int, slot: int, factor: float) -> "KernelSeries":
        right = np.array(self.right, copy=True)
        right[term, slot] *= factor
        return replace(self, right=right)


def certified_sup(coefficients: np.ndarray, slots: Sequence[int], basis: WaveletBasis, order: int) -> np.ndarray:
    """sum_a |c_a| D_{slot a} A_order for each row of coefficients."""
    bounds = np.array([basis.bound(n, order) for n in slots])
    return np.abs(coefficients) @ bounds


def _series(
    name: str,
    weights: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    slots: Sequence[int],
    basis: WaveletBasis,
    i_max: int,
    labels: Tuple[int, ...] = (),
) -> KernelSeries:
    dim = len(slots)
    left = np.asarray(left, dtype=complex).reshape(-1, dim)
    right = np.asarray(right, dtype=complex).reshape(-1, dim)
    left_sup = np.column_stack([certified_sup(left, slots, basis, i) for i in range(i_max + 1)]) \
        if len(left) else np.zeros((0, i_max + 1))
    right_sup = np.column_stack([certified_sup(right, slots, basis, i) for i in range(i_max + 1)]) \
        if len(right) else np.zeros((0, i_max + 1))
    return KernelSeries(
        name=name,
        weights=np.asarray(weights, dtype=float),
        left=left,
        right=right,
        left_sup=left_sup,
        right_sup=right_sup,
        labels=tuple(labels),
    )


# ============================================================================
# COEFFICIENT TABLES
# ============================================================================

def transformed_operator(assignment: Assignment, env: OperatorEnvironment) -> np.ndarray:
    """T = U S U^{-1} in slot coordinates (U is a permutation, so U^{-1} = U*)."""
    U = assignment.U_matrix
    return U @ env.matrix @ adjoint(U)


def compute_transfer_vectors(assignment: Assignment, env: OperatorEnvironment) -> Tuple[np.ndarray, np.ndarray]:
    """
    Slot coefficients of T* h_{n(k)} = U S* e_k^perp and T h_{n(k)} = U S e_k^perp.

    Returns:
        (T* h rows, T h rows), one row per complement index in order
    """
    U = assignment.U_matrix
    columns = list(assignment.complement_indices)
    t_star_h = (U @ env.adjoint_matrix[:, columns]).T
    t_h = (U @ env.matrix[:, columns]).T
    return t_star_h, t_h


def compute_F_vectors(assignment: Assignment, split: SplitSystem) -> Dict[str, np.ndarray]:
    """
    Slot coefficients of U B p_n, U B* q_n and of the tilde analogues,
    over the terms with s_n > 0 (rows), with the weights s_n^{1/2}.
    """
    U = assignment.U_matrix
    tables: Dict[str, np.ndarray] = {}
    for suffix, system, B in (
        ('', split.schmidt_J.positive(), split.B),
        ('_tilde', split.schmidt_J_tilde.positive(), split.B_tilde),
    ):
        tables['weights' + suffix] = np.sqrt(system.singular_values)
        tables['B_p' + suffix] = (U @ B @ system.right_vectors).T
        tables['B_star_q' + suffix] = (U @ adjoint(B) @ system.left_vectors).T
    return tables


# ============================================================================
# KERNEL MODEL
# ============================================================================

@dataclass(frozen=True, eq=False)
class KernelModel:
    """
    Coefficient tables of P, P~, F, F~ over the wavelet slots.

    P terms pair h_{n(k)} with T* h_{n(k)}, P~ terms with T h_{n(k)};
    F terms carry s_n^{1/2} with U B* q_n (s side) and U B p_n (t side),
    F~ terms the same with tilde data. term_cap limits every series to its
    first terms; the omitted terms are what truncation_bound certifies.
    """

    slots: Tuple[int, ...]
    i_max: int
    P_terms: KernelSeries
    Ptilde_terms: KernelSeries
    F_terms: KernelSeries
    Ftilde_terms: KernelSeries
    z_complement: Tuple[float, ...]
    bound_constants: Dict[str, Tuple[float, ...]]
    term_cap: Optional[int] = None

    @property
    def dim(self) -> int:
        return len(self.slots)

    def series(self, which: str = KERNEL) -> Tuple[KernelSeries, KernelSeries]:
        """(h-pairing series, Schmidt series) of K or K*, capped."""
        if which == KERNEL:
            pair = (self.P_terms, self.Ftilde_terms)
        elif which == KERNEL_STAR:
            pair = (self.Ptilde_terms, self.F_terms)
        else:
            raise ConfigurationError(f"unknown kernel '{which}', expected '{KERNEL}' or '{KERNEL_STAR}'")
        return tuple(s.head(self.term_cap) for s in pair)

    def with_term_cap(self, cap: Optional[int]) -> "KernelModel":
        if cap is not None and cap < 0:
            raise ConfigurationError(f"term cap must be non-negative, got {cap}")
        return replace(self, term_cap=cap)

    def with_scaled_p_coefficient(self, term: int, slot: int, factor: float) -> "KernelModel":
        if not (0 <= term < len(self.P_terms) and 0 <= slot < self.dim):
            raise DimensionError(f"P coefficient ({term}, {slot}) outside {len(self.P_terms)} x {self.dim}")
        return replace(self, P_terms=self.P_terms.scaled(term, slot, factor))

    def check_orders(self, *orders: int) -> None:
        for order in orders:
            if order < 0 or order > self.i_max:
                raise ConfigurationError(f"derivative order {order} outside [0, {self.i_max}]")

    @property
    def truncation_budget(self) -> Dict[Tuple[int, int], float]:
        return {
            (i, j): truncation_bound(self, i, j)
            for i in range(self.i_max + 1)
            for j in range(self.i_max + 1)
        }


def build_kernel_model(
    env: OperatorEnvironment,
    split: SplitSystem,
    assignment: Assignment,
    basis: WaveletBasis,
    i_max: Optional[int] = None,
    term_cap: Optional[int] = None,
) -> KernelModel:
    """Assemble the four series and their certified constants."""
    i_max = basis.i_max if i_max is None else i_max
    basis.check_order(i_max)
    slots = assignment.slots
    U = assignment.U_matrix

    t_star_h, t_h = compute_transfer_vectors(assignment, env)
    h_vectors = U[:, list(assignment.complement_indices)].T
    ones = np.ones(len(assignment.complement_indices))
    labels = assignment.h_for_complement

    f_tables = compute_F_vectors(assignment, split)

    P = _series("P", ones, h_vectors, t_star_h, slots, basis, i_max, labels)
    P_tilde = _series("P_tilde", ones, h_vectors, t_h, slots, basis, i_max, labels)
    F = _series("F", f_tables['weights'], f_tables['B_star_q'], f_tables['B_p'], slots, basis, i_max)
    F_tilde = _series(
        "F_tilde", f_tables['weights_tilde'], f_tables['B_star_q_tilde'], f_tables['B_p_tilde'],
        slots, basis, i_max,
    )

    def column_max(table: np.ndarray) -> Tuple[float, ...]:
        if not len(table):
            return tuple(0.0 for _ in range(i_max + 1))
        return tuple(float(v) for v in table.max(axis=0))

    constants = {
        'C': column_max(P_tilde.right_sup),
        'C_star': column_max(P.right_sup),
        'F_left': column_max(F.left_sup),
        'F_right': column_max(F.right_sup),
        'F_tilde_left': column_max(F_tilde.left_sup),
        'F_tilde_right': column_max(F_tilde.right_sup),
    }
    z_values = tuple(
        z_functional(split, env, env.basis_vector(index)) for index in assignment.complement_indices
    )

    model = KernelModel(
        slots=slots,
        i_max=i_max,
        P_terms=P,
        Ptilde_terms=P_tilde,
        F_terms=F,
        Ftilde_terms=F_tilde,
        z_complement=z_values,
        bound_constants=constants,
        term_cap=term_cap,
    )
    logger.info(
        f"✅ Kernel model: {len(P)} P terms, {len(F)} F terms, {len(F_tilde)} F~ terms over {len(slots)} slots"
    )
    return model


# ============================================================================
# EVALUATION
# ============================================================================

def _points(values) -> np.ndarray:
    return np.atleast_1d(np.asarray(values, dtype=float)).ravel()


def _grid(model: KernelModel, basis: WaveletBasis, series, s_points, t_points, i: int, j: int) -> np.ndarray:
    model.check_orders(i, j)
    phi_s = basis.basis_matrix(model.slots, _points(s_points), i)
    phi_t = basis.basis_matrix(model.slots, _points(t_points), j)
    total = np.zeros((phi_s.shape[0], phi_t.shape[0]), dtype=complex)
    for part in series:
        total += part.grid(phi_s, phi_t)
    return total


def kernel_grid(
    model: KernelModel,
    basis: WaveletBasis,
    s_points,
    t_points,
    i: int = 0,
    j: int = 0,
    which: str = KERNEL,
) -> np.ndarray:
    """d^{i+j} K / ds^i dt^j (or of K*) on the tensor grid s_points x t_points."""
    return _grid(model, basis, model.series(which), s_points, t_points, i, j)


def eval_K(model: KernelModel, basis: WaveletBasis, s: float, t: float, i: int = 0, j: int = 0) -> complex:
    """d^{i+j}/ds^i dt^j of K(s, t) = P(s, t) + F~(s, t)."""
    return complex(kernel_grid(model, basis, s, t, i, j, KERNEL)[0, 0])


def eval_K_star(model: KernelModel, basis: WaveletBasis, s: float, t: float, i: int = 0, j: int = 0) -> complex:
    """d^{i+j}/ds^i dt^j of K*(s, t) = P~(s, t) + F(s, t)."""
    return complex(kernel_grid(model, basis, s, t, i, j, KERNEL_STAR)[0, 0])


def _component(model: KernelModel, basis: WaveletBasis, series: KernelSeries, s, t, i, j) -> complex:
    return complex(_grid(model, basis, (series.head(model.term_cap),), s, t, i, j)[0, 0])


def eval_P(model, basis, s, t, i=0, j=0) -> complex:
    return _component(model, basis, model.P_terms, s, t, i, j)


def eval_Ptilde(model, basis, s, t, i=0, j=0) -> complex:
    return _component(model, basis, model.Ptilde_terms, s, t, i, j)


def eval_F(model, basis, s, t, i=0, j=0) -> complex:
    return _component(model, basis, model.F_terms, s, t, i, j)


def eval_Ftilde(model, basis, s, t, i=0, j=0) -> complex:
    return _component(model, basis, model.Ftilde_terms, s, t, i, j)


def carleman_profile(
    model: KernelModel,
    basis: WaveletBasis,
    points,
    i: int = 0,
    which: str = KERNEL,
) -> np.ndarray:
    """Rows: slot coefficients of the i-th derivative of s -> conj(K(s, .)) at each point."""
    model.check_orders(i)
    phi = basis.basis_matrix(model.slots, _points(points), i)
    total = np.zeros((phi.shape[0], model.dim), dtype=complex)
    for part in model.series(which):
        total += part.carleman(phi)
    return total


def carleman_function(model: KernelModel, basis: WaveletBasis, s: float, i: int = 0) -> np.ndarray:
    """Slot coefficients of the i-th derivative of the Carleman function of K at s."""
    return carleman_profile(model, basis, s, i, KERNEL)[0]


def carleman_function_star(model: KernelModel, basis: WaveletBasis, s: float, i: int = 0) -> np.ndarray:
    """Slot coefficients of the i-th derivative of the Carleman function of K* at s."""
    return carleman_profile(model, basis, s, i, KERNEL_STAR)[0]


def carleman_norms(model: KernelModel, basis: WaveletBasis, points, i: int = 0, which: str = KERNEL) -> np.ndarray:
    """L2 norms by Parseval over the slot coefficients."""
    return np.linalg.norm(carleman_profile(model, basis, points, i, which), axis=1)


def carleman_derivative_bound(model: KernelModel, basis: WaveletBasis, i: int, which: str = KERNEL) -> float:
    """
    Certified bound on sup_s of the L2 norm of the i-th derivative of the
    Carleman function; any i >= 0, also beyond i_max.
    """
    decay = np.array([basis.enumeration.d_value(n) for n in model.slots])
    scale = basis.a_bound(i)
    total = 0.0
    for part in model.series(which):
        if len(part):
            left_sup = (np.abs(part.left) @ decay) * scale
            total += float(np.sum(part.weights * left_sup * np.linalg.norm(part.right, axis=1)))
    return total


# ============================================================================
# TRUNCATION AND ORACLES
# ============================================================================

def truncation_bound(model: KernelModel, i: int, j: int, which: str = KERNEL) -> float:
    """
    Certified sup-norm bound on the omitted terms of d^{i+j}K/ds^i dt^j.

    Omitted h-pairing terms contribute sum H_{n(k),i} C*_j (C_j for K*);
    omitted Schmidt terms contribute sum w_n sup|L_n^(i)| sup|R_n^(j)|.
    Zero when nothing is omitted.
    """
    model.check_orders(i, j)
    if which == KERNEL:
        pairing, schmidt, constant = model.P_terms, model.Ftilde_terms, model.bound_constants['C_star'][j]
    elif which == KERNEL_STAR:
        pairing, schmidt, constant = model.Ptilde_terms, model.F_terms, model.bound_constants['C'][j]
    else:
        raise ConfigurationError(f"unknown kernel '{which}'")

    omitted_pairing = pairing.tail(model.term_cap)
    omitted_schmidt = schmidt.tail(model.term_cap)
    bound = float(np.sum(omitted_pairing.left_sup[:, i])) * constant
    if len(omitted_schmidt):
        bound += float(np.sum(
            omitted_schmidt.weights * omitted_schmidt.left_sup[:, i] * omitted_schmidt.right_sup[:, j]
        ))
    return bound


def kernel_from_matrix(
    matrix: np.ndarray,
    slots: Sequence[int],
    basis: WaveletBasis,
    s_points,
    t_points,
    i: int = 0,
    j: int = 0,
) -> np.ndarray:
    """sum_ab T_ab u_a^(i)(s) conj(u_b^(j)(t)) on a tensor grid."""
    if matrix.shape != (len(slots), len(slots)):
        raise DimensionError(f"matrix {matrix.shape} does not match {len(slots)} slots")
    phi_s = basis.basis_matrix(slots, _points(s_points), i)
    phi_t = basis.basis_matrix(slots, _points(t_points), j)
    return phi_s @ matrix @ np.conj(phi_t).T
