"""
Shared type definitions for pipeline reports and documents

Numeric artifacts (Schmidt systems, environments, assignments, kernel
models) are frozen dataclasses living next to the code that builds them.
The structures below are the JSON-shaped outputs: reports, check records
and the operator document.
"""

from typing import TypedDict, List, Optional, Dict


# ============================================================================
# Operator document
# ============================================================================

class FaultSpec(TypedDict, total=False):
    """Deliberate corruption applied before verification (fault fixtures)"""
    swap_u_rows: List[int]  # [a, b]
    scale_p_coefficient: List[float]  # [term, slot, factor]


class OperatorDocument(TypedDict, total=False):
    """On-disk operator specification"""
    dim: int
    matrix: List[List[List[float]]]  # N x N array of [re, im] pairs
    null_indices: List[int]
    complement_indices: List[int]
    fault: Optional[FaultSpec]


# ============================================================================
# Operator-splitting reports
# ============================================================================

class MembershipReport(TypedDict):
    """Result of check_c00()"""
    null_indices: List[int]
    s_norms: List[float]  # ||S e_k||
    s_star_norms: List[float]  # ||S* e_k||
    final_s_norm: float
    final_s_star_norm: float
    tolerance: float
    member: bool


# ============================================================================
# Basis-assignment reports
# ============================================================================

class SummabilityFamily(TypedDict):
    """One partial sum with its certified bound"""
    partial_sum: float
    bound: float


class SummabilityOrder(TypedDict):
    """The four summability families at one derivative order i"""
    order: int
    h_sum: SummabilityFamily  # sum_k H_{k,i}
    v_sum: SummabilityFamily  # sum_k z(v_k) H_{m(k),i}
    complement_sum: SummabilityFamily  # sum_k z(e_k^perp) H_{n(k),i}
    x_sum: SummabilityFamily  # sum_k d(x_k) (G_{k,i} + 1)


class SummabilityReport(TypedDict):
    """Result of summability_report()"""
    orders: List[SummabilityOrder]
    violations: List[str]
    ok: bool


# ============================================================================
# Verification reports
# ============================================================================

class CheckRecord(TypedDict):
    """A single verification check result"""
    name: str
    bound: float
    residual: float
    passed: bool
    runtime: float  # seconds; excluded from the text report
    detail: Optional[str]


class VerificationReport(TypedDict):
    """Result of run_all()"""
    records: List[CheckRecord]
    passed: bool
    summary: Dict[str, int]
