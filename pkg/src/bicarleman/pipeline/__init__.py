"""
Kernel construction pipeline

Provides:
- linalg: complex vectors, projectors, the Jacobi SVD and fractional powers
- quadrature: Gauss-Legendre rules, adaptive integration, spatial windows
- wavelets: the mother wavelet, its tabulation, the spiral enumeration and the basis
- splitting: operator environments, null-sequence normalisation, the split S = Q + E S
- assignment: the x/v split, the unitary U and the summability report
- kernel: the series K = P + F~ and K* = P~ + F, evaluation and truncation bounds
- verification: pluggable checks and the report
- documents: operator documents and grid export

The PipelineService facade lives in bicarleman.pipeline.service.
"""

# Linear algebra
from .linalg import (
    SchmidtSystem,
    adjoint,
    basis_vector,
    fractional_power_operator,
    inner,
    norm,
    projector,
    svd,
)

# Quadrature
from .quadrature import adaptive_gauss, composite_rule, gauss_legendre, label_window, window_rule

# Wavelets
from .wavelets import (
    MotherWavelet,
    TabulatedMotherWavelet,
    WaveletBasis,
    WaveletEnumeration,
    bell_eval,
    choose_h_subsequence,
    enumerate_wavelets,
    enumeration_size_for,
    get_wavelet_basis,
    mother_eval,
    smooth_step,
)

# Operator splitting
from .splitting import (
    OperatorEnvironment,
    SplitSystem,
    build_split,
    check_c00,
    d_functional,
    normalize_null_sequence,
    z_functional,
)

# Assignment
from .assignment import Assignment, assign, split_x_v, summability_report

# Kernel
from .kernel import (
    KERNEL,
    KERNEL_STAR,
    KernelModel,
    build_kernel_model,
    carleman_function,
    carleman_function_star,
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

# Verification
from .verification import (
    VerificationCheck,
    check_condition_ii,
    format_report,
    get_default_checks,
    run_all,
)

# Documents
from .documents import (
    load_operator,
    parse_operator_document,
    save_operator,
    serialize_operator_document,
    write_grid_csv,
)

# Errors
from .exceptions import (
    AssignmentError,
    BiCarlemanError,
    ConfigurationError,
    DimensionError,
    DocumentParseError,
    IndexRangeError,
    InfeasibleError,
    NumericalError,
)

# Types
from .types import CheckRecord, MembershipReport, SummabilityReport, VerificationReport

__all__ = [
    # Linear algebra
    "SchmidtSystem",
    "adjoint",
    "basis_vector",
    "fractional_power_operator",
    "inner",
    "norm",
    "projector",
    "svd",
    # Quadrature
    "adaptive_gauss",
    "composite_rule",
    "gauss_legendre",
    "label_window",
    "window_rule",
    # Wavelets
    "MotherWavelet",
    "TabulatedMotherWavelet",
    "WaveletBasis",
    "WaveletEnumeration",
    "bell_eval",
    "choose_h_subsequence",
    "enumerate_wavelets",
    "enumeration_size_for",
    "get_wavelet_basis",
    "mother_eval",
    "smooth_step",
    # Operator splitting
    "OperatorEnvironment",
    "SplitSystem",
    "build_split",
    "check_c00",
    "d_functional",
    "normalize_null_sequence",
    "z_functional",
    # Assignment
    "Assignment",
    "assign",
    "split_x_v",
    "summability_report",
    # Kernel
    "KERNEL",
    "KERNEL_STAR",
    "KernelModel",
    "build_kernel_model",
    "carleman_function",
    "carleman_function_star",
    "eval_F",
    "eval_Ftilde",
    "eval_K",
    "eval_K_star",
    "eval_P",
    "eval_Ptilde",
    "kernel_from_matrix",
    "kernel_grid",
    "transformed_operator",
    "truncation_bound",
    # Verification
    "VerificationCheck",
    "check_condition_ii",
    "format_report",
    "get_default_checks",
    "run_all",
    # Documents
    "load_operator",
    "parse_operator_document",
    "save_operator",
    "serialize_operator_document",
    "write_grid_csv",
    # Errors
    "AssignmentError",
    "BiCarlemanError",
    "ConfigurationError",
    "DimensionError",
    "DocumentParseError",
    "IndexRangeError",
    "InfeasibleError",
    "NumericalError",
    # Types
    "CheckRecord",
    "MembershipReport",
    "SummabilityReport",
    "VerificationReport",
]
