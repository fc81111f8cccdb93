"""
Output formatting: fixed-precision floats in CSV and JSON.
"""
import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np


def format_float(value: float, digits: int = 17) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def format_cell(value: Any, digits: int = 17) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value, digits)
    if value is None:
        return ""
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], digits: int = 17) -> str:
    """Render rows as CSV text with ``\\n`` line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell, digits) for cell in row])
    return buffer.getvalue()


def to_json(payload: Any, digits: int = 17) -> str:
    """Render ``payload`` as JSON with keys in insertion order and floats at ``digits`` significant digits."""
    return _render(payload, digits) + "\n"


def _render(value: Any, digits: int) -> str:
    if isinstance(value, dict):
        items = (f"{json.dumps(str(k))}: {_render(v, digits)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_render(v, digits) for v in value) + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(float(value)):
            return json.dumps(format_float(value, digits))
        return format_float(value, digits)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return json.dumps(value.value)
    return json.dumps(str(value))
