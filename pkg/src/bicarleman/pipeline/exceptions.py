"""
Exception hierarchy for the kernel construction pipeline

Report-only operations (membership checks, summability reports,
verification) never raise for failing data. Everything else raises one of
the classes below so the CLI can map it to an exit status.
"""

from typing import Optional


class BiCarlemanError(Exception):
    """Base class for all pipeline errors."""


class DimensionError(BiCarlemanError):
    """Shape, length or index mismatch between vectors, matrices and index sets."""


class ConfigurationError(BiCarlemanError):
    """Invalid configuration or a derivative order above the configured limit."""


class NumericalError(BiCarlemanError):
    """An iterative method failed to converge."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class IndexRangeError(BiCarlemanError):
    """Unknown wavelet label, or an enumeration too small for the request."""


class InfeasibleError(BiCarlemanError):
    """The null sequence cannot be normalized."""


class AssignmentError(InfeasibleError):
    """Too few admissible x candidates for the requested g slots."""


class DocumentParseError(BiCarlemanError):
    """Malformed operator or config document."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field
