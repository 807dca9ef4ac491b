"""
Pipeline Configuration

This module provides the configuration dataclass shared by the library
and the command-line front end. Values come from defaults, an optional
JSON document (--config) and CLI flag overrides, in that order.
"""
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Optional

from .pipeline.constants import (
    DEFAULT_CORE_EXTENT,
    DEFAULT_ENUMERATION_SIZE,
    DEFAULT_FRAME_INNER,
    DEFAULT_FRAME_OUTER,
    DEFAULT_GRID_EXTENT,
    DEFAULT_GRID_POINTS,
    DEFAULT_I_MAX,
    DEFAULT_JACOBI_MAX_SWEEPS,
    DEFAULT_JACOBI_TOLERANCE,
    DEFAULT_QUADRATURE_ORDER,
    DEFAULT_QUADRATURE_PANELS,
    DEFAULT_RANK_TOLERANCE,
    DEFAULT_SAMPLE_POINTS,
    DEFAULT_SEED,
    DEFAULT_SUPPORT_RADIUS,
    DEFAULT_TAIL_RADIUS,
    DEFAULT_TOLERANCES,
)
from .pipeline.exceptions import DocumentParseError

_INTEGER_FIELDS = {
    'i_max', 'quadrature_panels', 'quadrature_order', 'enumeration_size',
    'grid_points', 'seed', 'sample_points', 'jacobi_max_sweeps', 'required_x',
}
_REAL_FIELDS = {
    'tail_radius', 'support_radius', 'adaptive_tolerance', 'grid_extent', 'frame_inner',
    'frame_outer', 'core_extent', 'jacobi_tolerance', 'rank_tolerance',
}


@dataclass
class PipelineConfig:
    """
    Settings for one pipeline run.

    This includes:
    - An optional ambient dimension the operator is zero-padded to
    - The derivative order up to which smoothness is certified
    - Quadrature layout of the mother wavelet and spatial windows
    - Evaluation grid and vanishing frame (mother units, scaled per run)
    - Verification tolerances, seed and term caps
    """

    # ============================================================================
    # OPERATOR
    # ============================================================================

    ambient_dim: Optional[int] = None  # zero-pad the operator up to this dimension

    # ============================================================================
    # SMOOTHNESS
    # ============================================================================

    i_max: int = DEFAULT_I_MAX

    # ============================================================================
    # QUADRATURE
    # ============================================================================

    quadrature_panels: int = DEFAULT_QUADRATURE_PANELS
    quadrature_order: int = DEFAULT_QUADRATURE_ORDER  # 16 x 32 = 512 nodes over the bell
    tail_radius: float = DEFAULT_TAIL_RADIUS
    support_radius: float = DEFAULT_SUPPORT_RADIUS
    adaptive_tolerance: float = 1e-9
    tabulated_mother: bool = False  # Hermite-cubic table instead of direct quadrature

    # ============================================================================
    # WAVELET ENUMERATION
    # ============================================================================

    enumeration_size: int = DEFAULT_ENUMERATION_SIZE  # grown to fit the operator's h labels

    # ============================================================================
    # ASSIGNMENT
    # ============================================================================

    required_x: int = 0  # fewest null vectors that must map to g labels

    # ============================================================================
    # GRID AND FRAMES
    # ============================================================================

    grid_points: int = DEFAULT_GRID_POINTS
    grid_extent: float = DEFAULT_GRID_EXTENT
    frame_inner: float = DEFAULT_FRAME_INNER
    frame_outer: float = DEFAULT_FRAME_OUTER
    core_extent: float = DEFAULT_CORE_EXTENT

    # ============================================================================
    # VERIFICATION
    # ============================================================================

    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = DEFAULT_SEED
    term_cap: Optional[int] = None
    sample_points: int = DEFAULT_SAMPLE_POINTS

    # ============================================================================
    # LINEAR ALGEBRA
    # ============================================================================

    jacobi_tolerance: float = DEFAULT_JACOBI_TOLERANCE
    jacobi_max_sweeps: int = DEFAULT_JACOBI_MAX_SWEEPS
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Create config from a JSON document holding any subset of the fields"""
        text = Path(path).read_text(encoding="utf-8")
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentParseError(exc.msg, line=exc.lineno) from exc
        if not isinstance(document, dict):
            raise DocumentParseError("config document must be a JSON object", line=1)

        known = {f.name for f in fields(cls)}
        for key in document:
            if key not in known:
                raise DocumentParseError("unknown config field", field=key)

        for key, value in document.items():
            if key in _INTEGER_FIELDS and (isinstance(value, bool) or not isinstance(value, int)):
                raise DocumentParseError("expected an integer", field=key)
            if key in _REAL_FIELDS and (isinstance(value, bool) or not isinstance(value, (int, float))):
                raise DocumentParseError("expected a number", field=key)
            if key == 'tabulated_mother' and not isinstance(value, bool):
                raise DocumentParseError("expected true or false", field=key)
            if key in ('term_cap', 'ambient_dim') and value is not None and (
                isinstance(value, bool) or not isinstance(value, int)
            ):
                raise DocumentParseError("expected an integer or null", field=key)

        values = dict(document)
        if 'tolerances' in values:
            if not isinstance(values['tolerances'], dict):
                raise DocumentParseError("expected an object of check name -> bound", field='tolerances')
            values['tolerances'] = {**DEFAULT_TOLERANCES, **values['tolerances']}
        return cls(**values)

    def with_overrides(self, **values) -> "PipelineConfig":
        """Copy with the given fields replaced; None values are ignored"""
        return replace(self, **{k: v for k, v in values.items() if v is not None})

    def tolerance(self, check: str) -> float:
        return float(self.tolerances.get(check, DEFAULT_TOLERANCES[check]))

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> list[str]:
        """Validate configuration. Returns list of errors."""
        errors = []

        if not isinstance(self.i_max, int) or self.i_max < 0:
            errors.append("i_max must be a non-negative integer")
        if self.quadrature_panels < 1 or self.quadrature_order < 1:
            errors.append("quadrature_panels and quadrature_order must be positive")
        for name in ('tail_radius', 'support_radius', 'adaptive_tolerance', 'grid_extent',
                     'frame_inner', 'frame_outer', 'core_extent', 'jacobi_tolerance', 'rank_tolerance'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                errors.append(f"{name} must be positive")
        if self.frame_inner >= self.frame_outer:
            errors.append("frame_inner must be below frame_outer")
        if self.enumeration_size < 1:
            errors.append("enumeration_size must be positive")
        if self.required_x < 0:
            errors.append("required_x must be non-negative")
        if self.ambient_dim is not None and self.ambient_dim < 1:
            errors.append("ambient_dim must be None or positive")
        if self.grid_points < 1:
            errors.append("grid_points must be positive")
        if self.sample_points < 1:
            errors.append("sample_points must be positive")
        if self.jacobi_max_sweeps < 1:
            errors.append("jacobi_max_sweeps must be positive")
        if self.term_cap is not None and self.term_cap < 0:
            errors.append("term_cap must be None or non-negative")
        for name, bound in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                errors.append(f"unknown tolerance '{name}'")
            elif not (isinstance(bound, (int, float)) and math.isfinite(bound) and bound >= 0):
                errors.append(f"tolerance '{name}' must be a finite non-negative number")

        return errors

    def is_valid(self) -> bool:
        """Check if config is valid"""
        return len(self.validate()) == 0
