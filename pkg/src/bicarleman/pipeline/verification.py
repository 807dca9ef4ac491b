"""
Verification harness - pluggable checks over a built pipeline

Each check measures one residual against a bound from the tolerance table
and produces a CheckRecord. Checks are independent; a check that raises is
recorded as failed and never stops the run.

Usage:
    report = run_all(env, split, assignment, model, basis, config)
    print(format_report(report))

    # Custom check
    class MyCheck(VerificationCheck):
        name = "my_check"
        def measure(self, ctx):
            return 0.0, None
"""

import logging
import math
import sys
import time
import zlib
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .assignment import Assignment, summability_report
from .constants import (
    BELL_LOWER,
    BELL_UPPER,
    CONTINUITY_STEP,
    DEFAULT_TOLERANCES,
    FINITE_DIFFERENCE_STEP,
    SPATIAL_PANEL_WIDTH,
)
from .kernel import (
    KERNEL,
    KERNEL_STAR,
    KernelModel,
    carleman_derivative_bound,
    carleman_norms,
    carleman_profile,
    kernel_grid,
    transformed_operator,
    truncation_bound,
)
from .linalg import adjoint, fractional_power_operator, max_entry_norm
from .quadrature import adaptive_gauss, union_window, window_rule
from .splitting import OperatorEnvironment, SplitSystem, null_sequence_sum
from .types import CheckRecord, VerificationReport
from .wavelets import WaveletBasis, bell_eval, parseval_norm

if TYPE_CHECKING:
    from ..config import PipelineConfig

logger = logging.getLogger(__name__)

# Residual recorded when a check raises or measures a non-finite value
FAILED_RESIDUAL = sys.float_info.max


# ============================================================================
# CONTEXT
# ============================================================================

@dataclass
class VerificationContext:
    """Pipeline artifacts plus cached quadrature data shared by the checks."""

    env: OperatorEnvironment
    split: SplitSystem
    assignment: Assignment
    model: KernelModel
    basis: WaveletBasis
    config: "PipelineConfig"
    _rules: Dict[Tuple[int, ...], Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)
    _phi: Dict[Tuple, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def full_model(self) -> KernelModel:
        """Checks other than truncation verify the uncapped series."""
        return self.model.with_term_cap(None)

    @property
    def slots(self) -> Tuple[int, ...]:
        return self.model.slots

    @property
    def i_max(self) -> int:
        return self.model.i_max

    def tolerance(self, key: str) -> float:
        return self.config.tolerance(key)

    def rng(self, name: str) -> np.random.Generator:
        """Generator seeded from the config seed and the check name."""
        return np.random.default_rng([self.config.seed, zlib.crc32(name.encode("utf-8"))])

    @property
    def fine_exponent(self) -> int:
        return max(0, self.basis.finest_scale(self.slots))

    @property
    def frame_scale(self) -> float:
        """2^w with w = max(0, -min j over the slots)."""
        return 2.0 ** max(0, -self.basis.coarsest_scale(self.slots))

    @property
    def difference_step(self) -> float:
        return FINITE_DIFFERENCE_STEP * 2.0 ** (-self.fine_exponent)

    def rule(self, labels: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """Composite rule over the union window of labels, resolving every slot."""
        key = tuple(labels)
        if key not in self._rules:
            enumeration = self.basis.enumeration
            lower, upper = union_window([enumeration.scale(n) for n in key], self.config.support_radius)
            finest = max(0, self.basis.finest_scale(list(key) + list(self.slots)))
            self._rules[key] = window_rule(lower, upper, SPATIAL_PANEL_WIDTH * 2.0 ** (-finest))
        return self._rules[key]

    def phi(self, labels: Sequence[int], rule_labels: Sequence[int], order: int = 0) -> np.ndarray:
        """Basis matrix of labels on the nodes of rule(rule_labels)."""
        key = (tuple(labels), tuple(rule_labels), order)
        if key not in self._phi:
            nodes, _ = self.rule(rule_labels)
            self._phi[key] = self.basis.basis_matrix(labels, nodes, order)
        return self._phi[key]

    def sample_box(self, name: str, count: int) -> Tuple[np.ndarray, np.ndarray]:
        """count random (s, t) pairs in the grid box."""
        extent = self.config.grid_extent
        draws = self.rng(name).uniform(-extent, extent, size=(2, count))
        return draws[0], draws[1]

    def core_points(self, count: int) -> np.ndarray:
        extent = self.config.core_extent * self.frame_scale
        return np.linspace(-extent, extent, count)

    def frame_points(self, count: int) -> np.ndarray:
        inner = self.config.frame_inner * self.frame_scale
        outer = self.config.frame_outer * self.frame_scale
        side = np.linspace(inner, outer, count)
        return np.concatenate([-side[::-1], side])


def _random_unit_vectors(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    vectors = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _series_grid(series, phi_s: np.ndarray, phi_t: np.ndarray) -> np.ndarray:
    total = np.zeros((phi_s.shape[0], phi_t.shape[0]), dtype=complex)
    for part in series:
        total += part.grid(phi_s, phi_t)
    return total


def _relative(difference: float, scale: float) -> float:
    return difference / scale if scale > 0 else difference


# ============================================================================
# BASE CHECK INTERFACE
# ============================================================================

class VerificationCheck(ABC):
    """
    Base class for verification checks.

    Each check measures one residual; the record passes when the residual
    is at most the bound looked up under tolerance_key.
    """

    @property
    @abstractmethod
    def name(self) -> str:
        """Check name as it appears in the report."""
        pass

    @property
    def tolerance_key(self) -> str:
        return self.name

    def should_run(self, ctx: VerificationContext) -> bool:
        return True

    @abstractmethod
    def measure(self, ctx: VerificationContext) -> Tuple[float, Optional[str]]:
        """
        Measure the residual.

        Returns:
            (residual, optional detail text)
        """
        pass


# ============================================================================
# WAVELET CHECKS
# ============================================================================

class ParsevalCheck(VerificationCheck):
    """||u||^2 = 1 by the fixed bell rule and by adaptive refinement."""

    name = "parseval"

    def measure(self, ctx):
        fixed = parseval_norm(ctx.config.quadrature_panels, ctx.config.quadrature_order)
        adaptive = adaptive_gauss(
            lambda x: bell_eval(x) ** 2, BELL_LOWER, BELL_UPPER, tolerance=ctx.config.adaptive_tolerance
        ) / math.pi
        return max(abs(fixed - 1.0), abs(adaptive - 1.0)), f"fixed={fixed:.15f} adaptive={adaptive:.15f}"


class QuadratureSelfCheck(VerificationCheck):
    """Doubling the mother-wavelet node count changes nothing beyond the bound."""

    name = "quadrature_self_check"

    def measure(self, ctx):
        radius = ctx.config.support_radius
        fixed = np.array([-0.5, 0.0, 1.0, 10.0, 40.0, 90.0, -120.0, 200.0])
        points = np.concatenate([fixed, ctx.rng(self.name).uniform(-radius, radius, 16)])
        return ctx.basis.mother.self_check(points), None


class WaveletOrthonormalityCheck(VerificationCheck):
    """Gram matrix of the first 12 labels by quadrature."""

    name = "wavelet_orthonormality"

    def measure(self, ctx):
        labels = list(range(1, min(12, ctx.basis.enumeration.size) + 1))
        enumeration = ctx.basis.enumeration
        lower, upper = union_window([enumeration.scale(n) for n in labels], ctx.config.support_radius)
        finest = max(0, ctx.basis.finest_scale(labels))
        nodes, weights = window_rule(lower, upper, SPATIAL_PANEL_WIDTH * 2.0 ** (-finest))
        phi = ctx.basis.basis_matrix(labels, nodes)
        gram = np.conj(phi).T @ (weights[:, None] * phi)
        return max_entry_norm(gram - np.eye(len(labels))), f"{len(labels)} labels, {nodes.size} nodes"


class BoundCertificateCheck(VerificationCheck):
    """Grid sup of |u_n^(i)| over D_n A_i for every slot and order."""

    name = "bound_certificate"

    def measure(self, ctx):
        worst = 0.0
        worst_at = None
        for n in ctx.slots:
            lower, upper = ctx.basis.window(n, ctx.config.support_radius)
            points = np.linspace(lower, upper, 4096)
            for i in range(ctx.i_max + 1):
                ratio = float(np.max(np.abs(ctx.basis.basis_eval(n, points, i)))) / ctx.basis.bound(n, i)
                if ratio > worst:
                    worst, worst_at = ratio, (n, i)
        return worst, f"worst (n, i)={worst_at}"


# ============================================================================
# SPLITTING CHECKS
# ============================================================================

class SvdReconstructionCheck(VerificationCheck):
    name = "svd_reconstruction"

    def measure(self, ctx):
        residual = 0.0
        for matrix, system in ((ctx.split.J, ctx.split.schmidt_J), (ctx.split.J_tilde, ctx.split.schmidt_J_tilde)):
            residual = max(
                residual,
                system.reconstruction_error(matrix),
                system.orthonormality_defect(),
                max_entry_norm(fractional_power_operator(system, 1.0) - matrix),
            )
        return residual, None


class SchwarzChainCheck(VerificationCheck):
    """||B f|| <= ||J f||^{1/4} on random unit vectors (and for B~, J~)."""

    name = "schwarz_chain"

    def measure(self, ctx):
        vectors = _random_unit_vectors(ctx.rng(self.name), 100, ctx.split.dim)
        excess = 0.0
        for B, J in ((ctx.split.B, ctx.split.J), (ctx.split.B_tilde, ctx.split.J_tilde)):
            left = np.linalg.norm(vectors @ B.T, axis=1)
            right = np.linalg.norm(vectors @ J.T, axis=1) ** 0.25
            excess = max(excess, float(np.max(left - right)))
        return max(excess, 0.0), None


class SplittingIdentityCheck(VerificationCheck):
    """S = Q + E S and S* = Q~ + E S*, with J = S E and J~ = S* E."""

    name = "splitting_identity"

    def measure(self, ctx):
        S = ctx.env.matrix
        split = ctx.split
        return max(
            max_entry_norm(split.reconstructed_s() - S),
            max_entry_norm(split.reconstructed_s_star() - adjoint(S)),
            max_entry_norm(split.J - S @ split.E),
            max_entry_norm(split.J_tilde - adjoint(S) @ split.E),
        ), None


class AdjointRelationCheck(VerificationCheck):
    """E S* f = J* f with J* rebuilt from the Schmidt data of J."""

    name = "adjoint_relation"

    def measure(self, ctx):
        vectors = _random_unit_vectors(ctx.rng(self.name), 20, ctx.split.dim)
        direct = vectors @ (ctx.split.E @ ctx.env.adjoint_matrix).T
        rebuilt = vectors @ ctx.split.j_star_from_schmidt().T
        return max_entry_norm(direct - rebuilt), None


class QRepresentationCheck(VerificationCheck):
    """Q f = sum_k <f, S* e_k^perp> e_k^perp."""

    name = "q_representation"

    def measure(self, ctx):
        env = ctx.env
        residual = 0.0
        for f in _random_unit_vectors(ctx.rng(self.name), 20, env.dim):
            series = np.zeros(env.dim, dtype=complex)
            for index in env.complement_indices:
                e = env.basis_vector(index)
                series += np.vdot(env.adjoint_matrix @ e, f) * e
            residual = max(residual, max_entry_norm(ctx.split.Q @ f - series))
        return residual, None


class NullSequenceSumCheck(VerificationCheck):
    name = "null_sequence_sum"

    def measure(self, ctx):
        return null_sequence_sum(ctx.env), f"{len(ctx.env.null_indices)} null vectors"


# ============================================================================
# ASSIGNMENT CHECKS
# ============================================================================

class UnitarityCheck(VerificationCheck):
    name = "unitarity"

    def measure(self, ctx):
        U = ctx.assignment.U_matrix
        identity = np.eye(U.shape[0])
        return max(max_entry_norm(U @ adjoint(U) - identity), max_entry_norm(adjoint(U) @ U - identity)), None


class IsometryCheck(VerificationCheck):
    """<U f, U g> = <f, g> on 50 random pairs."""

    name = "isometry"

    def measure(self, ctx):
        U = ctx.assignment.U_matrix
        rng = ctx.rng(self.name)
        fs = _random_unit_vectors(rng, 50, U.shape[0])
        gs = _random_unit_vectors(rng, 50, U.shape[0])
        residual = max(abs(np.vdot(U @ g, U @ f) - np.vdot(g, f)) for f, g in zip(fs, gs))
        return float(residual), None


class AssignmentConsistencyCheck(VerificationCheck):
    """U sends each basis vector to the slot of its assigned wavelet, and y_k = U^{-1} h_k."""

    name = "assignment_consistency"

    def measure(self, ctx):
        assignment = ctx.assignment
        residual = max_entry_norm(assignment.U_matrix - assignment.expected_u())
        mismatched = [
            index for index, label in assignment.images.items() if assignment.preimage(label) != index
        ]
        detail = f"mismatched preimages {mismatched}" if mismatched else None
        return residual + len(mismatched), detail


class SummabilityCheck(VerificationCheck):
    """Largest excess of a certified partial sum over its bound."""

    name = "summability"

    def measure(self, ctx):
        report = summability_report(ctx.assignment, ctx.split, ctx.env, ctx.basis, ctx.i_max)
        excess = max(
            entry[family]['partial_sum'] - entry[family]['bound']
            for entry in report['orders']
            for family in ('h_sum', 'v_sum', 'complement_sum', 'x_sum')
        )
        return float(excess), "; ".join(report['violations']) or None


# ============================================================================
# KERNEL CHECKS
# ============================================================================

class TransferNormsCheck(VerificationCheck):
    """||T* h_{n(k)}|| and ||T h_{n(k)}|| stay below z(e_k^perp)."""

    name = "transfer_norms"

    def measure(self, ctx):
        model = ctx.full_model
        if not len(model.P_terms):
            return 0.0, None
        z = np.array(model.z_complement)
        excess = max(
            float(np.max(np.linalg.norm(model.P_terms.right, axis=1) - z)),
            float(np.max(np.linalg.norm(model.Ptilde_terms.right, axis=1) - z)),
        )
        return max(excess, 0.0), None


class DecompositionCheck(VerificationCheck):
    """K = P + F~ and K* = P~ + F, each part matching the kernel of its operator."""

    name = "decomposition"

    def measure(self, ctx):
        model = ctx.full_model
        U = ctx.assignment.U_matrix
        s, t = ctx.sample_box(self.name, ctx.config.sample_points)
        phi_s = ctx.basis.basis_matrix(model.slots, s)
        phi_t = ctx.basis.basis_matrix(model.slots, t)

        def oracle(matrix):
            return phi_s @ (U @ matrix @ adjoint(U)) @ np.conj(phi_t).T

        residual = 0.0
        for which, pairing, schmidt, q_part, e_part in (
            (KERNEL, model.P_terms, model.Ftilde_terms, ctx.split.Q, adjoint(ctx.split.J_tilde)),
            (KERNEL_STAR, model.Ptilde_terms, model.F_terms, ctx.split.Q_tilde, adjoint(ctx.split.J)),
        ):
            pairing_grid = pairing.grid(phi_s, phi_t)
            schmidt_grid = schmidt.grid(phi_s, phi_t)
            total = _series_grid(model.series(which), phi_s, phi_t)
            residual = max(
                residual,
                max_entry_norm(total - pairing_grid - schmidt_grid),
                max_entry_norm(pairing_grid - oracle(q_part)),
                max_entry_norm(schmidt_grid - oracle(e_part)),
            )
        return residual, None


class ActionAgreementCheck(VerificationCheck):
    """
    For f, g in the span of the first 8 wavelets: the double integral of
    K(s,t) f(t) conj(g(s)) equals <T f, g>, and the integral of K(s,t) f(t)
    at sample points s equals (T f)(s).
    """

    name = "action_agreement"

    def measure(self, ctx):
        model = ctx.full_model
        labels = list(range(1, min(8, ctx.basis.enumeration.size) + 1))
        _, weights = ctx.rule(labels)
        phi_test = ctx.phi(labels, labels)
        phi_slots = ctx.phi(model.slots, labels)
        T = transformed_operator(ctx.assignment, ctx.env)
        series = model.series(KERNEL)

        rng = ctx.rng(self.name)
        s_points = rng.uniform(-ctx.config.grid_extent, ctx.config.grid_extent, ctx.config.sample_points)
        phi_points = ctx.basis.basis_matrix(model.slots, s_points)
        residual = 0.0
        for f_coef, g_coef in zip(
            _random_unit_vectors(rng, 5, len(labels)), _random_unit_vectors(rng, 5, len(labels))
        ):
            f_values = phi_test @ f_coef
            g_values = phi_test @ g_coef
            f_slot = np.array([f_coef[n - 1] if n in labels else 0.0 for n in model.slots], dtype=complex)
            g_slot = np.array([g_coef[n - 1] if n in labels else 0.0 for n in model.slots], dtype=complex)

            double, pointwise = 0.0, np.zeros(s_points.size, dtype=complex)
            for part in series:
                # c_k = integral of conj(R_k(t)) f(t) dt, d_k = integral of L_k(s) conj(g(s)) ds
                c = np.conj(phi_slots @ part.right.T).T @ (weights * f_values)
                d = (phi_slots @ part.left.T).T @ (weights * np.conj(g_values))
                double += np.sum(part.weights * c * d)
                pointwise += (phi_points @ part.left.T) @ (part.weights * c)

            expected = np.vdot(g_slot, T @ f_slot)
            residual = max(
                residual,
                abs(double - expected),
                float(np.max(np.abs(pointwise - phi_points @ (T @ f_slot)))),
            )
        return residual, f"{weights.size} nodes"


class ConjugateSymmetryCheck(VerificationCheck):
    """K(s,t) = conj(K*(t,s))."""

    name = "conjugate_symmetry"

    def measure(self, ctx):
        model = ctx.full_model
        s, t = ctx.sample_box(self.name, 100)
        forward = kernel_grid(model, ctx.basis, s, t, which=KERNEL)
        backward = kernel_grid(model, ctx.basis, t, s, which=KERNEL_STAR)
        return max_entry_norm(forward - np.conj(backward).T), None


class SmoothnessCheck(VerificationCheck):
    """Termwise d^{i+j}K/ds^i dt^j against central differences, scale-relative, i + j <= 3."""

    name = "smoothness"

    def should_run(self, ctx):
        return ctx.i_max >= 1

    def measure(self, ctx):
        model = ctx.full_model
        s, t = ctx.sample_box(self.name, ctx.config.sample_points)
        h = ctx.difference_step
        worst = 0.0
        worst_at = None
        for i in range(ctx.i_max + 1):
            for j in range(ctx.i_max + 1):
                if not 1 <= i + j <= 3:
                    continue
                exact = kernel_grid(model, ctx.basis, s, t, i, j)
                if i >= 1:
                    difference = (
                        kernel_grid(model, ctx.basis, s + h, t, i - 1, j)
                        - kernel_grid(model, ctx.basis, s - h, t, i - 1, j)
                    ) / (2.0 * h)
                else:
                    difference = (
                        kernel_grid(model, ctx.basis, s, t + h, i, j - 1)
                        - kernel_grid(model, ctx.basis, s, t - h, i, j - 1)
                    ) / (2.0 * h)
                error = _relative(max_entry_norm(difference - exact), max_entry_norm(exact))
                if error >= worst:
                    worst, worst_at = error, (i, j)
        return worst, f"worst (i, j)={worst_at}, h={h:.1e}"


class CarlemanParsevalCheck(VerificationCheck):
    """||k(s)||^2 by coefficient Parseval against the t-quadrature of |K(s,t)|^2, for K and K*."""

    name = "carleman_parseval"

    def measure(self, ctx):
        model = ctx.full_model
        _, weights = ctx.rule(model.slots)
        phi_t = ctx.phi(model.slots, model.slots)
        s = ctx.rng(self.name).uniform(-ctx.config.grid_extent, ctx.config.grid_extent, 10)
        phi_s = ctx.basis.basis_matrix(model.slots, s)
        residual = 0.0
        for which in (KERNEL, KERNEL_STAR):
            grid = _series_grid(model.series(which), phi_s, phi_t)
            quadrature = np.abs(grid) ** 2 @ weights
            parseval = carleman_norms(model, ctx.basis, s, 0, which) ** 2
            residual = max(residual, float(np.max(np.abs(quadrature - parseval) / np.maximum(1.0, parseval))))
        return residual, f"{weights.size} nodes"


def check_condition_ii(
    model: KernelModel,
    basis: WaveletBasis,
    order: int,
    grid: np.ndarray,
    which: str = KERNEL,
    frame: Optional[np.ndarray] = None,
    core: Optional[np.ndarray] = None,
    vanishing_tolerance: float = DEFAULT_TOLERANCES['vanishing_ratio'],
    bound: float = 1.0,
) -> CheckRecord:
    """
    Continuity and decay of the order-th derivative of the Carleman function.

    Continuity: the largest step ||k(s + delta) - k(s)|| along the grid,
    divided by delta times the certified bound on ||k^(order+1)||, must stay
    <= 1. Decay: the largest norm over the frame divided by the largest norm
    over the core must stay below vanishing_tolerance. The residual is the
    larger of the two normalised ratios; the record passes when it is <= bound.
    """
    started = time.perf_counter()
    grid = np.asarray(grid, dtype=float)
    profile = carleman_profile(model, basis, grid, order, which)
    steps = np.linalg.norm(np.diff(profile, axis=0), axis=1)
    largest_step = float(np.max(steps)) if steps.size else 0.0
    delta = float(np.max(np.diff(grid))) if grid.size > 1 else 0.0
    lipschitz = carleman_derivative_bound(model, basis, order + 1, which)
    continuity = _relative(largest_step, delta * lipschitz)

    decay = 0.0
    if frame is not None and core is not None:
        frame_max = float(np.max(carleman_norms(model, basis, frame, order, which)))
        core_max = float(np.max(carleman_norms(model, basis, core, order, which)))
        decay = _relative(frame_max, core_max)

    residual = max(continuity, decay / vanishing_tolerance)
    suffix = "ii" if which == KERNEL else "iii"
    return {
        'name': f"condition_{suffix}_order{order}",
        'bound': bound,
        'residual': residual,
        'passed': residual <= bound,
        'runtime': time.perf_counter() - started,
        'detail': f"continuity={continuity:.3e} decay={decay:.3e}",
    }


class ConditionCheck(VerificationCheck):
    """Carleman function of K (condition ii) or K* (condition iii) at one derivative order."""

    def __init__(self, order: int, which: str = KERNEL):
        self.order = order
        self.which = which

    @property
    def tolerance_key(self) -> str:
        return "condition_ii" if self.which == KERNEL else "condition_iii"

    @property
    def name(self) -> str:
        return f"{self.tolerance_key}_order{self.order}"

    def should_run(self, ctx):
        return self.order <= ctx.i_max

    def measure(self, ctx):
        extent = ctx.config.grid_extent
        delta = CONTINUITY_STEP * 2.0 ** (-ctx.fine_exponent)
        grid = np.arange(-extent, extent + 0.5 * delta, delta)
        record = check_condition_ii(
            ctx.full_model,
            ctx.basis,
            self.order,
            grid,
            self.which,
            frame=ctx.frame_points(33),
            core=ctx.core_points(129),
            vanishing_tolerance=ctx.tolerance('vanishing_ratio'),
            bound=ctx.tolerance(self.tolerance_key),
        )
        return record['residual'], record['detail']


class StrongDerivativeCheck(VerificationCheck):
    """Central differences of the Carleman function converge to its termwise derivative in L2."""

    name = "strong_derivative"

    def should_run(self, ctx):
        return ctx.i_max >= 1

    def measure(self, ctx):
        model = ctx.full_model
        s = ctx.rng(self.name).uniform(-ctx.config.grid_extent, ctx.config.grid_extent, ctx.config.sample_points)
        h = ctx.difference_step
        worst = 0.0
        for which in (KERNEL, KERNEL_STAR):
            for i in range(1, ctx.i_max + 1):
                exact = carleman_profile(model, ctx.basis, s, i, which)
                difference = (
                    carleman_profile(model, ctx.basis, s + h, i - 1, which)
                    - carleman_profile(model, ctx.basis, s - h, i - 1, which)
                ) / (2.0 * h)
                error = float(np.max(np.linalg.norm(difference - exact, axis=1)))
                scale = float(np.max(np.linalg.norm(exact, axis=1)))
                worst = max(worst, _relative(error, scale))
        return worst, None


class VanishingRatioCheck(VerificationCheck):
    """sup |d^{i+j}K| over the frame against the sup over the core, every i, j <= i_max."""

    name = "vanishing_ratio"

    def measure(self, ctx):
        model = ctx.full_model
        frame = ctx.frame_points(17)
        outer = ctx.config.frame_outer * ctx.frame_scale
        sweep = np.linspace(-outer, outer, 257)
        core = ctx.core_points(129)
        worst = 0.0
        for i in range(ctx.i_max + 1):
            for j in range(ctx.i_max + 1):
                core_max = max_entry_norm(kernel_grid(model, ctx.basis, core, core, i, j))
                frame_max = max(
                    max_entry_norm(kernel_grid(model, ctx.basis, frame, sweep, i, j)),
                    max_entry_norm(kernel_grid(model, ctx.basis, sweep, frame, i, j)),
                )
                worst = max(worst, _relative(frame_max, core_max))
        return worst, f"frame scale {ctx.frame_scale:g}"


class TruncationCheck(VerificationCheck):
    """With every series capped at half, the omitted mass stays below truncation_bound."""

    name = "truncation"

    def measure(self, ctx):
        full = ctx.full_model
        longest = max(len(full.P_terms), len(full.Ptilde_terms), len(full.F_terms), len(full.Ftilde_terms))
        capped = full.with_term_cap(longest // 2)
        s, t = ctx.sample_box(self.name, ctx.config.sample_points)
        top = min(1, ctx.i_max)
        excess = -math.inf
        for which in (KERNEL, KERNEL_STAR):
            for i in range(top + 1):
                for j in range(top + 1):
                    omitted = max_entry_norm(
                        kernel_grid(full, ctx.basis, s, t, i, j, which)
                        - kernel_grid(capped, ctx.basis, s, t, i, j, which)
                    )
                    excess = max(excess, omitted - truncation_bound(capped, i, j, which))
        return float(excess), f"cap={longest // 2}"


# ============================================================================
# RUNNER
# ============================================================================

def get_default_checks(i_max: int) -> List[VerificationCheck]:
    """
    Get the default check list.

    Callers can modify this list or build their own.
    """
    checks: List[VerificationCheck] = [
        ParsevalCheck(),
        QuadratureSelfCheck(),
        WaveletOrthonormalityCheck(),
        BoundCertificateCheck(),
        SvdReconstructionCheck(),
        SchwarzChainCheck(),
        SplittingIdentityCheck(),
        AdjointRelationCheck(),
        QRepresentationCheck(),
        NullSequenceSumCheck(),
        UnitarityCheck(),
        IsometryCheck(),
        AssignmentConsistencyCheck(),
        SummabilityCheck(),
        TransferNormsCheck(),
        DecompositionCheck(),
        ActionAgreementCheck(),
        ConjugateSymmetryCheck(),
        SmoothnessCheck(),
        CarlemanParsevalCheck(),
        StrongDerivativeCheck(),
        VanishingRatioCheck(),
        TruncationCheck(),
    ]
    for which in (KERNEL, KERNEL_STAR):
        checks.extend(ConditionCheck(order, which) for order in range(i_max + 1))
    return checks


def _record(name: str, bound: float, residual: float, runtime: float, detail: Optional[str]) -> CheckRecord:
    if not math.isfinite(residual):
        detail = f"non-finite residual {residual}" + (f"; {detail}" if detail else "")
        residual = FAILED_RESIDUAL
        passed = False
    else:
        passed = residual <= bound
    return {
        'name': name,
        'bound': bound,
        'residual': float(residual),
        'passed': passed,
        'runtime': runtime,
        'detail': detail,
    }


def run_all(
    env: OperatorEnvironment,
    split: SplitSystem,
    assignment: Assignment,
    model: KernelModel,
    basis: WaveletBasis,
    config: "PipelineConfig",
    checks: Optional[List[VerificationCheck]] = None,
) -> VerificationReport:
    """
    Run every check and merge the records.

    Never raises for failing data: exceptions inside a check become failed
    records. Deterministic for a fixed config seed.
    """
    ctx = VerificationContext(env, split, assignment, model, basis, config)
    checks = checks if checks is not None else get_default_checks(model.i_max)

    records: List[CheckRecord] = []
    for check in checks:
        if not check.should_run(ctx):
            logger.debug(f"Skipping check {check.name}")
            continue
        bound = ctx.tolerance(check.tolerance_key)
        started = time.perf_counter()
        try:
            residual, detail = check.measure(ctx)
            record = _record(check.name, bound, float(residual), time.perf_counter() - started, detail)
        except Exception as e:
            logger.error(f"Check {check.name} failed: {e}", exc_info=True)
            record = _record(check.name, bound, FAILED_RESIDUAL, time.perf_counter() - started, f"raised: {e}")
            record['passed'] = False
        if not record['passed']:
            logger.warning(f"⚠️ Check {check.name} FAILED: residual={record['residual']:.3e} bound={bound:.3e}")
        records.append(record)

    passed = all(r['passed'] for r in records)
    failed = sum(1 for r in records if not r['passed'])
    summary = {'total': len(records), 'passed': len(records) - failed, 'failed': failed}
    logger.info(f"📊 Verification: {summary['passed']}/{summary['total']} checks passed")
    return {'records': records, 'passed': passed, 'summary': summary}


def format_report(report: VerificationReport) -> str:
    """Line-oriented text report; runtimes are left out so reruns are byte-identical."""
    lines = [
        f"CHECK {r['name']} residual={r['residual']:.6e} bound={r['bound']:.6e} {'PASS' if r['passed'] else 'FAIL'}"
        for r in report['records']
    ]
    summary = report['summary']
    lines.append(
        f"SUMMARY passed={summary['passed']} failed={summary['failed']} total={summary['total']} "
        f"{'PASS' if report['passed'] else 'FAIL'}"
    )
    return "\n".join(lines) + "\n"
