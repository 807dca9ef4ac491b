"""
Document formats for operators and kernel grids

Used by the CLI and the pipeline service for:
- Operator documents (JSON): dim, matrix as [re, im] pairs, null and
  complement indices, optional fault spec
- Grid export (CSV): header s,t,deriv_s,deriv_t,re,im with 17 significant digits
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DimensionError, DocumentParseError
from .splitting import OperatorEnvironment
from .types import FaultSpec, OperatorDocument

logger = logging.getLogger(__name__)

GRID_HEADER = ("s", "t", "deriv_s", "deriv_t", "re", "im")

_OPERATOR_FIELDS = ('dim', 'matrix', 'null_indices', 'complement_indices', 'fault')


# ============================================================================
# PARSING
# ============================================================================

def _line_of(text: str, field: str) -> Optional[int]:
    """Line of the first occurrence of the quoted field name."""
    needle = f'"{field}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def _is_integer(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _index_list(document: dict, field: str, dim: int, text: str) -> List[int]:
    values = document.get(field)
    if not isinstance(values, list) or not all(_is_integer(v) for v in values):
        raise DocumentParseError("expected an array of integers", line=_line_of(text, field), field=field)
    for value in values:
        if not 0 <= value < dim:
            raise DocumentParseError(
                f"index {value} outside [0, {dim})", line=_line_of(text, field), field=field
            )
    return list(values)


def _fault(value, text: str) -> Optional[FaultSpec]:
    if value is None:
        return None
    line = _line_of(text, 'fault')
    if not isinstance(value, dict) or not value:
        raise DocumentParseError("expected an object", line=line, field='fault')
    fault: FaultSpec = {}
    for key, entry in value.items():
        if key == 'swap_u_rows':
            if not (isinstance(entry, list) and len(entry) == 2 and all(_is_integer(v) for v in entry)):
                raise DocumentParseError("expected [a, b]", line=line, field='fault.swap_u_rows')
            fault['swap_u_rows'] = list(entry)
        elif key == 'scale_p_coefficient':
            if not (
                isinstance(entry, list) and len(entry) == 3
                and _is_integer(entry[0]) and _is_integer(entry[1]) and _is_number(entry[2])
            ):
                raise DocumentParseError("expected [term, slot, factor]", line=line, field='fault.scale_p_coefficient')
            fault['scale_p_coefficient'] = list(entry)
        else:
            raise DocumentParseError(f"unknown fault '{key}'", line=line, field='fault')
    return fault


def parse_operator_document(text: str) -> OperatorDocument:
    """
    Parse and validate an operator document.

    Raises:
        DocumentParseError: with the offending line and/or field
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(document, dict):
        raise DocumentParseError("operator document must be a JSON object", line=1)

    for key in document:
        if key not in _OPERATOR_FIELDS:
            raise DocumentParseError("unknown field", line=_line_of(text, key), field=key)
    for key in ('dim', 'matrix', 'null_indices', 'complement_indices'):
        if key not in document:
            raise DocumentParseError("missing required field", field=key)

    dim = document['dim']
    if not _is_integer(dim) or dim < 1:
        raise DocumentParseError("expected a positive integer", line=_line_of(text, 'dim'), field='dim')

    matrix = document['matrix']
    matrix_line = _line_of(text, 'matrix')
    if not isinstance(matrix, list) or len(matrix) != dim:
        raise DocumentParseError(f"expected {dim} rows", line=matrix_line, field='matrix')
    for r, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != dim:
            raise DocumentParseError(f"row {r}: expected {dim} entries", line=matrix_line, field='matrix')
        for c, entry in enumerate(row):
            if not (isinstance(entry, list) and len(entry) == 2 and all(_is_number(v) for v in entry)):
                raise DocumentParseError(
                    f"entry ({r}, {c}): expected a finite [re, im] pair", line=matrix_line, field='matrix'
                )

    parsed: OperatorDocument = {
        'dim': dim,
        'matrix': [[[float(v) for v in entry] for entry in row] for row in matrix],
        'null_indices': _index_list(document, 'null_indices', dim, text),
        'complement_indices': _index_list(document, 'complement_indices', dim, text),
        'fault': _fault(document.get('fault'), text),
    }
    return parsed


def serialize_operator_document(document: OperatorDocument) -> str:
    """JSON text with one matrix row per line; parses back to the same document."""
    rows = ",\n".join(f"    {json.dumps(row)}" for row in document['matrix'])
    lines = [
        "{",
        f'  "dim": {json.dumps(document["dim"])},',
        f'  "matrix": [\n{rows}\n  ],',
        f'  "null_indices": {json.dumps(document["null_indices"])},',
        f'  "complement_indices": {json.dumps(document["complement_indices"])}',
    ]
    if document.get('fault'):
        lines[-1] += ","
        lines.append(f'  "fault": {json.dumps(document["fault"])}')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ============================================================================
# OPERATOR ENVIRONMENTS
# ============================================================================

def operator_from_document(document: OperatorDocument) -> OperatorEnvironment:
    matrix = np.array([[complex(re, im) for re, im in row] for row in document['matrix']])
    try:
        return OperatorEnvironment(
            matrix,
            document['null_indices'],
            document['complement_indices'],
            fault=document.get('fault'),
        )
    except DimensionError as exc:
        raise DocumentParseError(str(exc), field='complement_indices') from exc


def document_from_operator(env: OperatorEnvironment) -> OperatorDocument:
    return {
        'dim': env.dim,
        'matrix': [[[float(v.real), float(v.imag)] for v in row] for row in env.matrix],
        'null_indices': list(env.null_indices),
        'complement_indices': list(env.complement_indices),
        'fault': env.fault,
    }


def load_operator(path) -> OperatorEnvironment:
    """Read an operator document from disk."""
    text = Path(path).read_text(encoding="utf-8")
    env = operator_from_document(parse_operator_document(text))
    logger.info(
        f"✅ Loaded operator from {path}: dim={env.dim}, "
        f"{len(env.null_indices)} null / {len(env.complement_indices)} complement indices"
    )
    return env


def save_operator(env: OperatorEnvironment, path) -> None:
    Path(path).write_text(serialize_operator_document(document_from_operator(env)), encoding="utf-8")


# ============================================================================
# GRID EXPORT
# ============================================================================

def _g17(value: float) -> str:
    return "%.17g" % value


def grid_rows(
    s_points: Sequence[float],
    t_points: Sequence[float],
    grids: Dict[Tuple[int, int], np.ndarray],
) -> List[Tuple[str, ...]]:
    """
    Formatted rows ordered by s, then t, then derivative pair.

    grids[(i, j)] has shape len(s_points) x len(t_points).
    """
    s_points = np.asarray(s_points, dtype=float)
    t_points = np.asarray(t_points, dtype=float)
    s_order = np.argsort(s_points, kind="stable")
    t_order = np.argsort(t_points, kind="stable")
    derivatives = sorted(grids)
    for key in derivatives:
        if grids[key].shape != (s_points.size, t_points.size):
            raise DimensionError(f"grid {key} has shape {grids[key].shape}, expected ({s_points.size}, {t_points.size})")

    rows = []
    for a in s_order:
        for b in t_order:
            for i, j in derivatives:
                value = complex(grids[(i, j)][a, b])
                rows.append((
                    _g17(s_points[a]), _g17(t_points[b]), str(i), str(j), _g17(value.real), _g17(value.imag),
                ))
    return rows


def write_grid_csv(
    path,
    s_points: Sequence[float],
    t_points: Sequence[float],
    grids: Dict[Tuple[int, int], np.ndarray],
) -> int:
    """Write the grid file; returns the number of data rows."""
    rows = grid_rows(s_points, t_points, grids)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(GRID_HEADER)
        writer.writerows(rows)
    logger.info(f"✅ Wrote {len(rows)} grid rows to {path}")
    return len(rows)
