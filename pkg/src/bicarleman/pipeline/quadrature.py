"""
Gauss-Legendre quadrature rules

Used by the wavelet and verification modules for:
- The fixed composite rule over the bell support (mother wavelet values)
- Composite rules over spatial windows (Gram matrices, double integrals)
- Adaptive refinement for smooth one-off integrals (Parseval, spot checks)
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Iterable, Tuple

import numpy as np

from .constants import MOTHER_CENTER, SPATIAL_PANEL_ORDER
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the order-point rule on [-1, 1] (read-only arrays)."""
    if order < 1:
        raise ConfigurationError(f"quadrature order must be positive, got {order}")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_rule(lower: float, upper: float, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Composite Gauss-Legendre rule with equal panels.

    Args:
        lower: Left end of the interval
        upper: Right end of the interval
        panels: Number of equal panels
        order: Nodes per panel

    Returns:
        (nodes, weights), each of length panels * order, nodes ascending
    """
    if panels < 1:
        raise ConfigurationError(f"panel count must be positive, got {panels}")
    if not upper > lower:
        raise ConfigurationError(f"empty interval [{lower}, {upper}]")
    x, w = gauss_legendre(order)
    edges = np.linspace(lower, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    centres = 0.5 * (edges[:-1] + edges[1:])
    nodes = (centres[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def window_rule(
    lower: float,
    upper: float,
    panel_width: float,
    order: int = SPATIAL_PANEL_ORDER,
) -> Tuple[np.ndarray, np.ndarray]:
    """Composite rule whose panels are at most panel_width wide."""
    if not panel_width > 0:
        raise ConfigurationError(f"panel width must be positive, got {panel_width}")
    panels = max(1, int(math.ceil((upper - lower) / panel_width)))
    return composite_rule(lower, upper, panels, order)


def integrate(func: Callable[[np.ndarray], np.ndarray], nodes: np.ndarray, weights: np.ndarray):
    """Apply a rule to func; func may return (len(nodes), ...) shaped values."""
    values = np.asarray(func(nodes))
    return np.tensordot(weights, values, axes=(0, 0))


def _panel(func, lower: float, upper: float, order: int):
    x, w = gauss_legendre(order)
    half = 0.5 * (upper - lower)
    nodes = 0.5 * (upper + lower) + half * x
    return half * np.tensordot(w, np.asarray(func(nodes)), axes=(0, 0))


def adaptive_gauss(
    func: Callable[[np.ndarray], np.ndarray],
    lower: float,
    upper: float,
    tolerance: float = 1e-9,
    order: int = SPATIAL_PANEL_ORDER,
    initial_panels: int = 1,
    max_depth: int = 30,
):
    """
    Adaptive composite Gauss-Legendre integration.

    Each panel is compared against the sum over its two halves; panels whose
    estimates differ by more than their share of the tolerance are split.
    Vector-valued integrands are refined on their largest component.

    Args:
        func: Vectorised integrand, nodes -> values with leading node axis
        lower: Left end
        upper: Right end
        tolerance: Absolute tolerance for the whole interval
        order: Nodes per panel
        initial_panels: Panels before any refinement
        max_depth: Refinement depth limit per initial panel

    Returns:
        Integral estimate (scalar or array)
    """
    if not upper > lower:
        raise ConfigurationError(f"empty interval [{lower}, {upper}]")
    length = upper - lower
    edges = np.linspace(lower, upper, max(1, initial_panels) + 1)
    stack = [(a, b, _panel(func, a, b, order), 0) for a, b in zip(edges[:-1], edges[1:])]

    total = None
    saturated = 0
    while stack:
        a, b, whole, depth = stack.pop()
        mid = 0.5 * (a + b)
        left = _panel(func, a, mid, order)
        right = _panel(func, mid, b, order)
        refined = left + right
        change = float(np.max(np.abs(refined - whole)))
        if change <= tolerance * (b - a) / length or depth >= max_depth:
            if depth >= max_depth and change > tolerance * (b - a) / length:
                saturated += 1
            total = refined if total is None else total + refined
        else:
            stack.append((a, mid, left, depth + 1))
            stack.append((mid, b, right, depth + 1))

    if saturated:
        logger.warning(f"⚠️ adaptive quadrature hit depth {max_depth} on {saturated} panels over [{lower}, {upper}]")
    return total


# ============================================================================
# SPATIAL WINDOWS
# ============================================================================

def label_window(j: int, k: int, support_radius: float) -> Tuple[float, float]:
    """
    Effective support of u_{jk}(s) = 2^{j/2} u(2^j s - k).

    The mother wavelet is centred at -1/2, so u_{jk} is centred at
    (k - 1/2) 2^{-j} with radius support_radius * 2^{-j}.
    """
    scale = 2.0 ** (-j)
    centre = (k + MOTHER_CENTER) * scale
    radius = support_radius * scale
    return centre - radius, centre + radius


def union_window(scales: Iterable[Tuple[int, int]], support_radius: float) -> Tuple[float, float]:
    """Smallest interval containing the windows of all (j, k) pairs."""
    windows = [label_window(j, k, support_radius) for j, k in scales]
    if not windows:
        raise ConfigurationError("no wavelets to build a window for")
    return min(w[0] for w in windows), max(w[1] for w in windows)
