"""
bicarleman-kernels - Smooth bi-Carleman kernels for operators with a null sequence

This package provides functionality for:
- Splitting an operator along a null sequence and building the unitary U
  onto a Meyer wavelet basis
- Assembling, evaluating and exporting the kernel K and its adjoint kernel
- Verifying the kernel's properties with a pluggable check harness
"""

from .config import PipelineConfig

from .pipeline import (
    # Pipeline stages
    OperatorEnvironment,
    SplitSystem,
    Assignment,
    KernelModel,
    WaveletBasis,
    normalize_null_sequence,
    build_split,
    assign,
    build_kernel_model,
    get_wavelet_basis,

    # Evaluation
    eval_K,
    eval_K_star,
    kernel_grid,

    # Verification
    VerificationCheck,
    run_all,
    format_report,

    # Documents
    load_operator,
    write_grid_csv,

    # Errors
    BiCarlemanError,
)

from .pipeline.service import PipelineService

__version__ = "0.1.0"
__all__ = [
    # Config
    "PipelineConfig",
    # Stages
    "OperatorEnvironment",
    "SplitSystem",
    "Assignment",
    "KernelModel",
    "WaveletBasis",
    "normalize_null_sequence",
    "build_split",
    "assign",
    "build_kernel_model",
    "get_wavelet_basis",
    # Evaluation
    "eval_K",
    "eval_K_star",
    "kernel_grid",
    # Verification
    "VerificationCheck",
    "run_all",
    "format_report",
    # Documents
    "load_operator",
    "write_grid_csv",
    # Service
    "PipelineService",
    "BiCarlemanError",
]
