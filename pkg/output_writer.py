"""
CSV emission.

Every file starts with '#' comment lines (tool version, command, seed and
the effective config as indented JSON), then one row of column names, then
the data with 12 significant digits. Fit summaries follow the data as
further '#' lines.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from constants import CSV_COMMENT, CSV_PRECISION, VERSION

logger = logging.getLogger(__name__)


def format_value(value: Any, precision: int = CSV_PRECISION) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{precision}g}"
    return str(value)


def header_lines(command: str, config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None,
                 extra: Optional[Dict[str, Any]] = None) -> List[str]:
    lines = [f"{CSV_COMMENT} nonlocal-entanglement {VERSION}", f"{CSV_COMMENT} command: {command}"]
    lines.append(f"{CSV_COMMENT} seed: {'none' if seed is None else seed}")
    for key, value in (extra or {}).items():
        lines.append(f"{CSV_COMMENT} {key}: {format_value(value)}")
    if config is not None:
        lines.append(f"{CSV_COMMENT} config:")
        for line in json.dumps(config, indent=2, sort_keys=True, default=str).splitlines():
            lines.append(f"{CSV_COMMENT}   {line}")
    return lines


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence[Any]], command: str,
              config: Optional[Dict[str, Any]] = None, seed: Optional[int] = None,
              extra: Optional[Dict[str, Any]] = None, footer: Sequence[str] = (),
              precision: int = CSV_PRECISION) -> Path:
    """Write one CSV file with header comments and an optional comment footer."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        for line in header_lines(command, config, seed, extra):
            f.write(line + "\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow([format_value(v, precision) for v in row])
            count += 1
        for line in footer:
            f.write(f"{CSV_COMMENT} {line}\n")
    logger.info("wrote %d rows to %s", count, path)
    return path


def fit_summary(label: str, fit) -> str:
    """One footer line describing a ScalingFit."""
    params = " ".join(f"{k}={format_value(v)}" for k, v in fit.params.items())
    return (f"fit curve={label!r} form={fit.form.value} window=[{format_value(fit.window[0])}, "
            f"{format_value(fit.window[1])}] {params} residual={format_value(fit.residual)}")


def read_csv(path) -> Dict[str, Any]:
    """Parse a file written by write_csv into comments, columns and rows of strings."""
    comments, rows = [], []
    columns = None
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith(CSV_COMMENT):
                comments.append(line[len(CSV_COMMENT):].strip())
            elif columns is None:
                columns = next(csv.reader([line]))
            elif line:
                rows.append(next(csv.reader([line])))
    return {"comments": comments, "columns": columns, "rows": rows}
