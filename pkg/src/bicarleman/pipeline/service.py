"""
Pipeline Service - Unified facade over the kernel construction stages

This is the main entry point for a pipeline run. It combines:
- Null-sequence membership and normalisation
- The operator split and its Schmidt data
- The wavelet assignment U and its summability report
- The kernel model, grid evaluation and the verification harness

Stages are built on first use and cached; fault specs carried by the
operator document are applied to the assignment and the kernel model.

Usage:
    from bicarleman import PipelineService

    service = PipelineService.from_operator_file("operator.json")
    report = service.verify()
    print(format_report(report))
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import PipelineConfig
from .assignment import Assignment, assign, summability_report
from .constants import (
    DEFAULT_ENUMERATION_SIZE,
    DEFAULT_I_MAX,
    DEFAULT_MEMBERSHIP_TOLERANCE,
    DEFAULT_QUADRATURE_ORDER,
    DEFAULT_QUADRATURE_PANELS,
    DEFAULT_TAIL_RADIUS,
)
from .documents import load_operator, write_grid_csv
from .kernel import KERNEL, KernelModel, build_kernel_model, kernel_grid
from .splitting import OperatorEnvironment, SplitSystem, build_split, check_c00, normalize_null_sequence
from .types import MembershipReport, SummabilityReport, VerificationReport
from .verification import VerificationCheck, get_default_checks, run_all
from .wavelets import WaveletBasis, enumeration_size_for, get_wavelet_basis

logger = logging.getLogger(__name__)


def _uses_default_basis(config: PipelineConfig) -> bool:
    return (
        not config.tabulated_mother
        and config.i_max <= DEFAULT_I_MAX
        and config.enumeration_size == DEFAULT_ENUMERATION_SIZE
        and config.quadrature_panels == DEFAULT_QUADRATURE_PANELS
        and config.quadrature_order == DEFAULT_QUADRATURE_ORDER
        and config.tail_radius == DEFAULT_TAIL_RADIUS
    )


class PipelineService:
    """
    Staged pipeline for one operator.

    Args:
        env: The operator environment as given (before normalisation)
        config: Pipeline settings (defaults if not provided)
        basis: Optional wavelet basis (default basis or one built from config);
            its enumeration is grown when too short for the operator
        checks: Optional verification checks (defaults if not provided)
    """

    def __init__(
        self,
        env: OperatorEnvironment,
        config: PipelineConfig = None,
        basis: WaveletBasis = None,
        checks: List[VerificationCheck] = None,
    ):
        self.raw_environment = env
        self.config = config or PipelineConfig()
        self._basis = basis
        self._checks = checks
        self._resolved_basis: Optional[WaveletBasis] = None

        self._environment: Optional[OperatorEnvironment] = None
        self._split: Optional[SplitSystem] = None
        self._assignment: Optional[Assignment] = None
        self._model: Optional[KernelModel] = None

        logger.info(f"PipelineService initialized for dim={env.dim}, i_max={self.config.i_max}")

    @classmethod
    def from_operator_file(cls, path, config: PipelineConfig = None) -> "PipelineService":
        return cls(load_operator(path), config)

    # ------------------------------------------------------------------
    # Stages
    # ------------------------------------------------------------------

    @property
    def basis(self) -> WaveletBasis:
        """
        The given basis, the default one or one built from config, with its
        enumeration grown to hold an h label for every basis vector.
        """
        if self._resolved_basis is None:
            basis = self._basis
            if basis is None and _uses_default_basis(self.config):
                basis = get_wavelet_basis()
            elif basis is None:
                basis = WaveletBasis.build(
                    i_max=max(self.config.i_max, DEFAULT_I_MAX),
                    enumeration_size=self.config.enumeration_size,
                    panels=self.config.quadrature_panels,
                    order=self.config.quadrature_order,
                    tail_radius=self.config.tail_radius,
                    tabulated=self.config.tabulated_mother,
                )
            needed = enumeration_size_for(self.padded_environment.dim)
            if basis.enumeration.size < needed:
                logger.info(f"🔍 Enumeration grown from {basis.enumeration.size} to {needed} labels")
                basis = basis.with_enumeration_size(needed)
            self._resolved_basis = basis
        return self._resolved_basis

    def membership(self, tolerance: float = DEFAULT_MEMBERSHIP_TOLERANCE) -> MembershipReport:
        """Membership report of the null sequence as given."""
        return check_c00(self.raw_environment, tolerance)

    @property
    def padded_environment(self) -> OperatorEnvironment:
        """The environment as given, zero-padded up to config.ambient_dim."""
        if self.config.ambient_dim is None:
            return self.raw_environment
        return self.raw_environment.padded(self.config.ambient_dim)

    @property
    def environment(self) -> OperatorEnvironment:
        """The padded environment with its null sequence normalised."""
        if self._environment is None:
            self._environment = normalize_null_sequence(self.padded_environment)
        return self._environment

    @property
    def split(self) -> SplitSystem:
        if self._split is None:
            self._split = build_split(
                self.environment,
                tolerance=self.config.jacobi_tolerance,
                max_sweeps=self.config.jacobi_max_sweeps,
                rank_tolerance=self.config.rank_tolerance,
            )
        return self._split

    @property
    def assignment(self) -> Assignment:
        if self._assignment is None:
            assignment = assign(
                self.environment, self.split, self.basis, self.config.i_max, self.config.required_x
            )
            fault = self.environment.fault or {}
            if 'swap_u_rows' in fault:
                a, b = fault['swap_u_rows']
                logger.warning(f"⚠️ Fault injected: U rows {a} and {b} swapped")
                assignment = assignment.with_swapped_rows(a, b)
            self._assignment = assignment
        return self._assignment

    def summability(self) -> SummabilityReport:
        return summability_report(self.assignment, self.split, self.environment, self.basis, self.config.i_max)

    @property
    def model(self) -> KernelModel:
        if self._model is None:
            model = build_kernel_model(
                self.environment,
                self.split,
                self.assignment,
                self.basis,
                self.config.i_max,
                self.config.term_cap,
            )
            fault = self.environment.fault or {}
            if 'scale_p_coefficient' in fault:
                term, slot, factor = fault['scale_p_coefficient']
                logger.warning(f"⚠️ Fault injected: P coefficient ({term}, {slot}) scaled by {factor}")
                model = model.with_scaled_p_coefficient(int(term), int(slot), float(factor))
            self._model = model
        return self._model

    # ------------------------------------------------------------------
    # Evaluation and verification
    # ------------------------------------------------------------------

    def grid_points(self) -> np.ndarray:
        """grid_points equispaced points on [-grid_extent, grid_extent]."""
        extent = self.config.grid_extent
        return np.linspace(-extent, extent, self.config.grid_points)

    def evaluate_grid(
        self,
        derivatives: Sequence[Tuple[int, int]] = ((0, 0),),
        which: str = KERNEL,
    ) -> Dict[Tuple[int, int], np.ndarray]:
        """d^{i+j}K/ds^i dt^j on the configured square grid, per requested (i, j)."""
        points = self.grid_points()
        return {
            (i, j): kernel_grid(self.model, self.basis, points, points, i, j, which)
            for i, j in sorted(set(derivatives))
        }

    def export_grid(self, path, derivatives: Sequence[Tuple[int, int]] = ((0, 0),)) -> int:
        """Write the kernel grid CSV; returns the number of data rows."""
        points = self.grid_points()
        return write_grid_csv(path, points, points, self.evaluate_grid(derivatives))

    def verify(self) -> VerificationReport:
        checks = self._checks if self._checks is not None else get_default_checks(self.config.i_max)
        return run_all(
            self.environment, self.split, self.assignment, self.model, self.basis, self.config, checks
        )

    def register_check(self, check: VerificationCheck):
        """Add a custom check to this service's verification run."""
        if self._checks is None:
            self._checks = get_default_checks(self.config.i_max)
        self._checks.append(check)
        logger.info(f"Check registered: {check.name}")
