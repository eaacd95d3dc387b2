"""Report writers for classification, verification and geometry results."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence, TextIO

import numpy as np

from lbcv.models import OUTPUT_FORMATS

logger = logging.getLogger(__name__)

FLOAT_DIGITS = 17


def format_float(value: float) -> Optional[str]:
    """17 significant digits; -0.0 prints as 0.0, non-finite values have no text form."""
    value = float(value)
    if not math.isfinite(value):
        return None
    if value == 0.0:
        value = 0.0
    text = f"{value:.{FLOAT_DIGITS}g}"
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _plain(value: Any) -> Any:
    """Unwrap numpy scalars and arrays into Python values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def to_json(value: Any, indent: int = 0) -> str:
    """Serialize like json.dumps(indent=2), but with 17-digit floats."""
    value = _plain(value)
    pad = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        text = format_float(value)
        return "null" if text is None else text
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(_plain(v), (dict, list)) for v in value):
            return "[" + ", ".join(to_json(v) for v in value) + "]"
        items = [pad + to_json(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    raise TypeError(f"Cannot serialize {type(value).__name__} to JSON")


def to_cell(value: Any) -> str:
    """Flatten one value for a CSV cell or a text line (lists join with ';')."""
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value) or ""
    if isinstance(value, list):
        return ";".join(to_cell(v) for v in value)
    return str(value)


class ReportWriter:
    """Writes report rows (``to_dict()`` output) as JSON, CSV or text."""

    def __init__(self, output_format: str = "json", output_path: Optional[str] = None):
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format: {output_format}")
        self.output_format = output_format
        self.output_path = Path(output_path) if output_path else None

        if self.output_path:
            self.output_path.parent.mkdir(parents=True, exist_ok=True)

    def render(self, rows: Sequence[dict], fieldnames: List[str], single: bool = False) -> str:
        """Render rows; ``single`` emits one JSON object instead of an array."""
        if self.output_format == "json":
            if single and len(rows) == 1:
                return to_json(rows[0]) + "\n"
            return to_json(list(rows)) + "\n"

        if self.output_format == "csv":
            buffer = io.StringIO()
            writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: to_cell(row.get(k)) for k in fieldnames})
            return buffer.getvalue()

        width = max((len(k) for k in fieldnames), default=0)
        blocks = [
            "\n".join(f"{k.ljust(width)}: {to_cell(row.get(k))}" for k in fieldnames)
            for row in rows
        ]
        return "\n\n".join(blocks) + ("\n" if blocks else "")

    def write(
        self,
        rows: Sequence[dict],
        fieldnames: List[str],
        single: bool = False,
        stream: Optional[TextIO] = None,
    ) -> int:
        """Write rows to the output file (or ``stream``/stdout). Returns the row count."""
        text = self.render(rows, fieldnames, single=single)
        if self.output_path:
            with open(self.output_path, "w", newline="") as f:
                f.write(text)
            logger.info(f"Wrote {len(rows)} rows to {self.output_path}")
        else:
            (stream or sys.stdout).write(text)
        return len(rows)
