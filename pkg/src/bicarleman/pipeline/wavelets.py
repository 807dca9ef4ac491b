"""
Lemarié-Meyer wavelet basis of L2(R)

Used by the assignment and kernel modules for:
- Evaluating u_n = u_{j_n k_n} and its derivatives pointwise and on grids
- The enumeration n <-> (j_n, k_n) and the certified bounds D_n, A_i
- Choosing the fast-decaying h subsequence and the g candidates

The mother wavelet is taken in its one-sided frequency form

    u^(i)(s) = (1j / pi) * integral_{2pi/3}^{8pi/3} eta^i sin(eta (s + 1/2) + i pi/2) b(eta) d eta

which is purely imaginary and centred at s = -1/2.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .constants import (
    BELL_LOWER,
    BELL_PEAK,
    BELL_UPPER,
    MOTHER_CENTER,
    DEFAULT_I_MAX,
    DEFAULT_QUADRATURE_PANELS,
    DEFAULT_QUADRATURE_ORDER,
    DEFAULT_TAIL_RADIUS,
    DEFAULT_ENUMERATION_SIZE,
    MAX_PANEL_PHASE,
)
from .exceptions import ConfigurationError, IndexRangeError
from .quadrature import composite_rule, integrate, label_window

logger = logging.getLogger(__name__)

_CHUNK = 2048


# ============================================================================
# BELL FUNCTION
# ============================================================================

def _ramp(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    positive = x > 0
    out[positive] = np.exp(-1.0 / x[positive])
    return out


def smooth_step(x):
    """
    C-infinity step: 0 for x <= 0, 1 for x >= 1, f(x) / (f(x) + f(1 - x)) between,
    with f(x) = exp(-1/x) for x > 0 and 0 otherwise.
    """
    values = np.asarray(x, dtype=float)
    rising = _ramp(values)
    falling = _ramp(1.0 - values)
    result = rising / (rising + falling)
    return float(result) if result.ndim == 0 else result


def bell_eval(xi):
    """Standard Meyer bell b(xi), supported on [2pi/3, 8pi/3] with b(4pi/3) = 1."""
    values = np.asarray(xi, dtype=float)
    out = np.zeros_like(values)
    rising = (values >= BELL_LOWER) & (values <= BELL_PEAK)
    falling = (values > BELL_PEAK) & (values <= BELL_UPPER)
    out[rising] = np.sin(0.5 * math.pi * smooth_step(3.0 * values[rising] / (2.0 * math.pi) - 1.0))
    out[falling] = np.cos(0.5 * math.pi * smooth_step(3.0 * values[falling] / (4.0 * math.pi) - 1.0))
    return float(out) if out.ndim == 0 else out


def parseval_norm(
    panels: int = DEFAULT_QUADRATURE_PANELS,
    order: int = DEFAULT_QUADRATURE_ORDER,
) -> float:
    """||u||^2 = (1/2pi) integral b(|xi|)^2 d xi = (1/pi) integral_{2pi/3}^{8pi/3} b^2; equals 1."""
    nodes, weights = composite_rule(BELL_LOWER, BELL_UPPER, panels, order)
    return float(integrate(lambda x: bell_eval(x) ** 2, nodes, weights)) / math.pi


# ============================================================================
# MOTHER WAVELET
# ============================================================================

class MotherWavelet:
    """
    Quadrature evaluator for u and its derivatives up to i_max.

    Values come from a composite Gauss-Legendre rule over the bell support.
    The panel count doubles with |s + 1/2| so that no panel spans more than
    MAX_PANEL_PHASE radians; beyond tail_radius the values read as 0.
    """

    def __init__(
        self,
        i_max: int = DEFAULT_I_MAX,
        panels: int = DEFAULT_QUADRATURE_PANELS,
        order: int = DEFAULT_QUADRATURE_ORDER,
        tail_radius: float = DEFAULT_TAIL_RADIUS,
    ):
        if i_max < 0:
            raise ConfigurationError(f"i_max must be non-negative, got {i_max}")
        if panels < 1 or order < 1:
            raise ConfigurationError(f"invalid quadrature layout {panels} x {order}")
        if not tail_radius > 0:
            raise ConfigurationError(f"tail radius must be positive, got {tail_radius}")
        self.i_max = i_max
        self.panels = panels
        self.order = order
        self.tail_radius = tail_radius
        self._rules: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        self._sup_norms = tuple(self.majorant(i) for i in range(i_max + 1))

    def __repr__(self) -> str:
        return f"MotherWavelet(i_max={self.i_max}, nodes={self.panels * self.order})"

    @property
    def sup_norm_table(self) -> Tuple[float, ...]:
        """Certified majorants (1/pi) integral eta^i b(eta) d eta >= sup |u^(i)|."""
        return self._sup_norms

    def majorant(self, order: int) -> float:
        """(1/pi) integral eta^order b(eta) d eta, for any order >= 0."""
        nodes, weights = composite_rule(BELL_LOWER, BELL_UPPER, self.panels, self.order)
        return float(np.sum(weights * bell_eval(nodes) * nodes ** order) / math.pi)

    def check_order(self, order: int) -> None:
        if order < 0 or order > self.i_max:
            raise ConfigurationError(f"derivative order {order} outside [0, {self.i_max}]")

    def _rule(self, panels: int) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and per-order weighted moments w * eta^i * b(eta) / pi."""
        if panels not in self._rules:
            nodes, weights = composite_rule(BELL_LOWER, BELL_UPPER, panels, self.order)
            base = weights * bell_eval(nodes) / math.pi
            moments = np.vstack([base * nodes ** i for i in range(self.i_max + 1)])
            self._rules[panels] = (nodes, moments)
        return self._rules[panels]

    def _panel_cutoff(self, panels: int) -> float:
        return MAX_PANEL_PHASE * panels / (BELL_UPPER - BELL_LOWER)

    def evaluate(self, x, order: int = 0) -> np.ndarray:
        """u^(order)(x) for an array (or scalar) of mother coordinates."""
        self.check_order(order)
        points = np.asarray(x, dtype=float)
        flat = (points - MOTHER_CENTER).ravel()
        out = np.zeros(flat.shape, dtype=complex)
        pending = np.abs(flat) <= self.tail_radius

        panels = self.panels
        while np.any(pending):
            batch = pending & (np.abs(flat) <= self._panel_cutoff(panels))
            if np.any(batch):
                nodes, moments = self._rule(panels)
                positions = np.flatnonzero(batch)
                for start in range(0, positions.size, _CHUNK):
                    chunk = positions[start:start + _CHUNK]
                    phase = np.outer(flat[chunk], nodes) + order * 0.5 * math.pi
                    out[chunk] = 1j * (np.sin(phase) @ moments[order])
                pending &= ~batch
            panels *= 2
        return out.reshape(points.shape)

    def __call__(self, x, order: int = 0):
        values = self.evaluate(x, order)
        return complex(values) if values.ndim == 0 else values

    def self_check(self, points) -> float:
        """Largest change, over orders and points, when the node count doubles."""
        finer = MotherWavelet(self.i_max, 2 * self.panels, self.order, self.tail_radius)
        points = np.asarray(points, dtype=float)
        return max(
            float(np.max(np.abs(finer.evaluate(points, i) - self.evaluate(points, i))))
            for i in range(self.i_max + 1)
        )


def mother_eval(s: float, i: int = 0, mother: Optional[MotherWavelet] = None) -> complex:
    """u^(i)(s) through the given (or the default) mother wavelet."""
    mother = mother or get_wavelet_basis().mother
    return complex(mother.evaluate(s, i))


class TabulatedMotherWavelet:
    """
    Piecewise Hermite-cubic tabulation of the mother wavelet.

    Each order i is tabulated on |s + 1/2| <= radius from the quadrature values
    of u^(i) and u^(i+1); points outside the table fall back to quadrature.
    Splines are built on first use.
    """

    def __init__(
        self,
        i_max: int = DEFAULT_I_MAX,
        radius: float = 48.0,
        spacing: float = 1.0 / 1024.0,
        panels: int = DEFAULT_QUADRATURE_PANELS,
        order: int = DEFAULT_QUADRATURE_ORDER,
        tail_radius: float = DEFAULT_TAIL_RADIUS,
    ):
        if not radius > 0 or not spacing > 0:
            raise ConfigurationError("tabulation radius and spacing must be positive")
        self.direct = MotherWavelet(i_max + 1, panels, order, tail_radius)
        self.i_max = i_max
        self.radius = radius
        self.spacing = spacing
        count = int(math.ceil(radius / spacing))
        self._grid = MOTHER_CENTER + spacing * np.arange(-count, count + 1)
        self._splines: Dict[int, CubicHermiteSpline] = {}

    def __repr__(self) -> str:
        return f"TabulatedMotherWavelet(i_max={self.i_max}, radius={self.radius}, spacing={self.spacing})"

    @property
    def sup_norm_table(self) -> Tuple[float, ...]:
        return self.direct.sup_norm_table[: self.i_max + 1]

    def majorant(self, order: int) -> float:
        return self.direct.majorant(order)

    def check_order(self, order: int) -> None:
        if order < 0 or order > self.i_max:
            raise ConfigurationError(f"derivative order {order} outside [0, {self.i_max}]")

    def _spline(self, order: int) -> CubicHermiteSpline:
        if order not in self._splines:
            # u is purely imaginary; tabulate the imaginary part
            values = self.direct.evaluate(self._grid, order).imag
            slopes = self.direct.evaluate(self._grid, order + 1).imag
            self._splines[order] = CubicHermiteSpline(self._grid, values, slopes)
            logger.debug(f"Tabulated u^({order}) on {self._grid.size} points")
        return self._splines[order]

    def evaluate(self, x, order: int = 0) -> np.ndarray:
        self.check_order(order)
        points = np.asarray(x, dtype=float)
        flat = points.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        inside = np.abs(flat - MOTHER_CENTER) <= self.radius
        if np.any(inside):
            out[inside] = 1j * self._spline(order)(flat[inside])
        if not np.all(inside):
            out[~inside] = self.direct.evaluate(flat[~inside], order)
        return out.reshape(points.shape)

    def __call__(self, x, order: int = 0):
        values = self.evaluate(x, order)
        return complex(values) if values.ndim == 0 else values

    def self_check(self, points) -> float:
        """Largest interpolation error against direct quadrature."""
        points = np.asarray(points, dtype=float)
        return max(
            float(np.max(np.abs(self.evaluate(points, i) - self.direct.evaluate(points, i))))
            for i in range(self.i_max + 1)
        )


# ============================================================================
# ENUMERATION
# ============================================================================

def _spiral(count: int) -> List[Tuple[int, int]]:
    """(0,0) then rings max(|j|,|k|) = R, each by (|j|+|k|, angle from +k toward +j)."""
    labels = [(0, 0)]
    ring = 1
    while len(labels) < count:
        points = [
            (j, k)
            for j in range(-ring, ring + 1)
            for k in range(-ring, ring + 1)
            if max(abs(j), abs(k)) == ring
        ]
        points.sort(key=lambda p: (abs(p[0]) + abs(p[1]), math.atan2(p[0], p[1]) % (2.0 * math.pi)))
        labels.extend(points)
        ring += 1
    return labels[:count]


def decay_factor(j: int) -> float:
    """D = 2^{j^2} for j > 0 and (1/sqrt 2)^{|j|} for j <= 0."""
    if j > 0:
        return 2.0 ** (j * j)
    return 2.0 ** (-abs(j) / 2.0)


@dataclass(frozen=True)
class WaveletEnumeration:
    """
    Bijection n <-> (j_n, k_n) over the first `size` labels (n is 1-based)
    together with the bound tables D_n and A_i.
    """

    labels: Tuple[Tuple[int, int], ...]
    sup_norm_table: Tuple[float, ...]
    _positions: Dict[Tuple[int, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        positions = {scale: n for n, scale in enumerate(self.labels, start=1)}
        if len(positions) != len(self.labels):
            raise IndexRangeError("enumeration labels are not distinct")
        object.__setattr__(self, '_positions', positions)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def i_max(self) -> int:
        return len(self.sup_norm_table) - 1

    def scale(self, n: int) -> Tuple[int, int]:
        """(j_n, k_n) of label n."""
        if not 1 <= n <= self.size:
            raise IndexRangeError(f"wavelet label {n} outside enumerated range [1, {self.size}]")
        return self.labels[n - 1]

    def label(self, j: int, k: int) -> int:
        if (j, k) not in self._positions:
            raise IndexRangeError(f"(j, k) = ({j}, {k}) not enumerated")
        return self._positions[(j, k)]

    def d_value(self, n: int) -> float:
        return decay_factor(self.scale(n)[0])

    def a_value(self, i: int) -> float:
        if not 0 <= i <= self.i_max:
            raise ConfigurationError(f"derivative order {i} outside [0, {self.i_max}]")
        return 2.0 ** ((i + 0.5) ** 2) * self.sup_norm_table[i]

    @property
    def d_table(self) -> Dict[int, float]:
        return {n: self.d_value(n) for n in range(1, self.size + 1)}

    @property
    def a_table(self) -> Tuple[float, ...]:
        return tuple(self.a_value(i) for i in range(self.i_max + 1))

    def bound(self, n: int, i: int) -> float:
        """Certified sup-norm bound D_n * A_i of u_n^(i)."""
        return self.d_value(n) * self.a_value(i)


def enumerate_wavelets(count: int, sup_norm_table: Sequence[float]) -> WaveletEnumeration:
    """Spiral enumeration of the first count labels with the given sup-norm majorants."""
    if count < 1:
        raise IndexRangeError(f"enumeration size must be positive, got {count}")
    return WaveletEnumeration(tuple(_spiral(count)), tuple(float(v) for v in sup_norm_table))


def choose_h_subsequence(enumeration: WaveletEnumeration, count: int) -> List[int]:
    """
    Labels n_1 < n_2 < ... with j_{n_k} <= -k, each the first such label after
    its predecessor. In the spiral this is (j, k) = (-k, 0), so D_{n_k} = 2^{-k/2}.

    Raises:
        IndexRangeError: the enumeration cannot supply count labels
    """
    if count < 1:
        raise IndexRangeError(f"h count must be positive, got {count}")
    selected: List[int] = []
    label = 1
    for k in range(1, count + 1):
        while label <= enumeration.size and enumeration.scale(label)[0] > -k:
            label += 1
        if label > enumeration.size:
            raise IndexRangeError(
                f"enumeration of {enumeration.size} labels supplies only {len(selected)} h indices, {count} requested"
            )
        selected.append(label)
        label += 1
    return selected


def canonical_h_labels(enumeration: WaveletEnumeration) -> List[int]:
    """Every label the h subsequence can reach inside the enumeration."""
    labels: List[int] = []
    label = 1
    k = 1
    while True:
        while label <= enumeration.size and enumeration.scale(label)[0] > -k:
            label += 1
        if label > enumeration.size:
            return labels
        labels.append(label)
        label += 1
        k += 1


def enumeration_size_for(h_count: int) -> int:
    """
    Smallest enumeration holding the first h_count h labels.

    (-R, 0) is the fourth label of ring R, after the (2R - 1)^2 labels of the
    inner rings.
    """
    if h_count < 1:
        return 1
    return (2 * h_count - 1) ** 2 + 4


def g_candidates(enumeration: WaveletEnumeration, count: int) -> List[int]:
    """The first count labels outside the h subsequence, in enumeration order."""
    reserved = set(canonical_h_labels(enumeration))
    candidates = [n for n in range(1, enumeration.size + 1) if n not in reserved][:count]
    if len(candidates) < count:
        raise IndexRangeError(
            f"enumeration of {enumeration.size} labels supplies only {len(candidates)} g indices, {count} requested"
        )
    return candidates


# ============================================================================
# WAVELET BASIS
# ============================================================================

class WaveletBasis:
    """
    Mother wavelet plus enumeration: evaluates u_n^(i)(s) = 2^{j(i+1/2)} u^(i)(2^j s - k).

    The mother may be a MotherWavelet or a TabulatedMotherWavelet.
    """

    def __init__(self, mother, enumeration: WaveletEnumeration):
        if enumeration.i_max > mother.i_max:
            raise ConfigurationError(
                f"enumeration tables reach order {enumeration.i_max}, mother only {mother.i_max}"
            )
        self.mother = mother
        self.enumeration = enumeration

    def __repr__(self) -> str:
        return f"WaveletBasis({self.mother!r}, labels={self.enumeration.size})"

    @classmethod
    def build(
        cls,
        i_max: int = DEFAULT_I_MAX,
        enumeration_size: int = DEFAULT_ENUMERATION_SIZE,
        panels: int = DEFAULT_QUADRATURE_PANELS,
        order: int = DEFAULT_QUADRATURE_ORDER,
        tail_radius: float = DEFAULT_TAIL_RADIUS,
        tabulated: bool = False,
    ) -> "WaveletBasis":
        if tabulated:
            mother = TabulatedMotherWavelet(i_max, panels=panels, order=order, tail_radius=tail_radius)
        else:
            mother = MotherWavelet(i_max, panels, order, tail_radius)
        return cls(mother, enumerate_wavelets(enumeration_size, mother.sup_norm_table))

    def with_enumeration_size(self, size: int) -> "WaveletBasis":
        """Same mother over a longer or shorter spiral (labels are a common prefix)."""
        if size == self.enumeration.size:
            return self
        return WaveletBasis(self.mother, enumerate_wavelets(size, self.enumeration.sup_norm_table))

    @property
    def i_max(self) -> int:
        return self.enumeration.i_max

    def check_order(self, order: int) -> None:
        if order < 0 or order > self.i_max:
            raise ConfigurationError(f"derivative order {order} outside [0, {self.i_max}]")

    def basis_eval(self, n: int, s, i: int = 0):
        """u_n^(i)(s); complex for scalar s, array otherwise."""
        self.check_order(i)
        j, k = self.enumeration.scale(n)
        values = 2.0 ** (j * (i + 0.5)) * self.mother.evaluate(2.0 ** j * np.asarray(s, dtype=float) - k, i)
        return complex(values) if values.ndim == 0 else values

    def basis_matrix(self, labels: Sequence[int], points, i: int = 0) -> np.ndarray:
        """Phi_i with Phi_i[p, c] = u_{labels[c]}^(i)(points[p])."""
        self.check_order(i)
        points = np.asarray(points, dtype=float).ravel()
        matrix = np.empty((points.size, len(labels)), dtype=complex)
        for column, n in enumerate(labels):
            matrix[:, column] = self.basis_eval(n, points, i)
        return matrix

    def bound(self, n: int, i: int) -> float:
        return self.enumeration.bound(n, i)

    def a_bound(self, order: int) -> float:
        """A_order = 2^{(order+1/2)^2} times the majorant; defined beyond i_max too."""
        return 2.0 ** ((order + 0.5) ** 2) * self.mother.majorant(order)

    def window(self, n: int, support_radius: float) -> Tuple[float, float]:
        j, k = self.enumeration.scale(n)
        return label_window(j, k, support_radius)

    def finest_scale(self, labels: Sequence[int]) -> int:
        return max(self.enumeration.scale(n)[0] for n in labels)

    def coarsest_scale(self, labels: Sequence[int]) -> int:
        return min(self.enumeration.scale(n)[0] for n in labels)


_wavelet_basis_instance: Optional[WaveletBasis] = None


def get_wavelet_basis() -> WaveletBasis:
    """Get or create the process-wide default wavelet basis."""
    global _wavelet_basis_instance
    if _wavelet_basis_instance is None:
        _wavelet_basis_instance = WaveletBasis.build()
        logger.info(f"✅ Default wavelet basis ready: {_wavelet_basis_instance!r}")
    return _wavelet_basis_instance
