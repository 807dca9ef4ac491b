"""
Shared numeric constants for the kernel construction pipeline

These constants are used across the pipeline modules for:
- The Meyer bell support and the quadrature layout over it
- Tolerances of the verification checks
- Default extents of quadrature windows and vanishing frames
"""

import math

# ============================================================================
# MEYER BELL - support of b in angular frequency
# ============================================================================

BELL_LOWER = 2.0 * math.pi / 3.0
BELL_PEAK = 4.0 * math.pi / 3.0
BELL_UPPER = 8.0 * math.pi / 3.0

# Mother wavelet u is centred here (u(s) vanishes identically at s = -1/2 for i = 0)
MOTHER_CENTER = -0.5


# ============================================================================
# QUADRATURE - composite Gauss-Legendre over the bell support
# ============================================================================

DEFAULT_QUADRATURE_PANELS = 16
DEFAULT_QUADRATURE_ORDER = 32

# Largest phase (radians) a single panel may span before the panel count doubles
MAX_PANEL_PHASE = 40.0

# Beyond this mother coordinate |s + 1/2| the wavelet and its derivatives read as 0
DEFAULT_TAIL_RADIUS = 256.0

# Effective support radius of u in mother coordinates (|u| ~ 1e-7 there)
DEFAULT_SUPPORT_RADIUS = 48.0

# Order of the Gauss-Legendre rule used on each panel of spatial quadratures
SPATIAL_PANEL_ORDER = 16

# Panel width of spatial quadratures, in units of the finest wavelet period
SPATIAL_PANEL_WIDTH = 0.5


# ============================================================================
# LINEAR ALGEBRA
# ============================================================================

DEFAULT_JACOBI_TOLERANCE = 1e-14
DEFAULT_JACOBI_MAX_SWEEPS = 60
DEFAULT_RANK_TOLERANCE = 1e-12


# ============================================================================
# PIPELINE DEFAULTS
# ============================================================================

DEFAULT_I_MAX = 3
DEFAULT_ENUMERATION_SIZE = 256
DEFAULT_GRID_POINTS = 64
DEFAULT_GRID_EXTENT = 10.0
DEFAULT_CORE_EXTENT = 8.0
DEFAULT_FRAME_INNER = 48.0
DEFAULT_FRAME_OUTER = 64.0
DEFAULT_SAMPLE_POINTS = 20
DEFAULT_SEED = 0

# Final ||S e_k||, ||S* e_k|| below which a null sequence qualifies
DEFAULT_MEMBERSHIP_TOLERANCE = 1e-6

# Step of the Carleman continuity grid, scaled like the difference step
CONTINUITY_STEP = 1e-2

# Step of central finite differences, scaled by 2^{-j_max} at use sites
FINITE_DIFFERENCE_STEP = 1e-4


# ============================================================================
# VERIFICATION TOLERANCES - check name -> bound
# ============================================================================

# Exact checks use 0.0; normalised residuals (ratios to a certified bound) use 1.0

DEFAULT_TOLERANCES = {
    'parseval': 1e-8,
    'quadrature_self_check': 1e-9,
    'wavelet_orthonormality': 5e-6,
    'bound_certificate': 1.0,
    'svd_reconstruction': 1e-10,
    'schwarz_chain': 1e-9,
    'splitting_identity': 1e-10,
    'adjoint_relation': 1e-10,
    'q_representation': 1e-10,
    'null_sequence_sum': 1.0,
    'unitarity': 0.0,
    'isometry': 1e-14,
    'assignment_consistency': 0.0,
    'summability': 0.0,
    'transfer_norms': 1e-10,
    'action_agreement': 1e-4,
    'decomposition': 1e-9,
    'conjugate_symmetry': 1e-9,
    'smoothness': 1e-4,
    'carleman_parseval': 1e-5,
    'vanishing_ratio': 1e-5,
    'condition_ii': 1.0,
    'condition_iii': 1.0,
    'strong_derivative': 1e-4,
    'truncation': 0.0,
}
