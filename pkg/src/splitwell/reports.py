"""Deterministic table serialization: CSV (RFC 4180, LF) and JSON mirrors.

Floats are rendered with 9 significant digits so repeated runs of the same
configuration produce byte-identical files.  Files are written atomically
(temp file in the target directory, then rename).
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

FLOAT_DIGITS = 9


def format_value(value) -> str:
    """Stable cell rendering: floats at 9 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{FLOAT_DIGITS}g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float(f"{value:.{FLOAT_DIGITS}g}")
    return value


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.chmod(tmp_name, 0o644)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def render_csv(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    return buffer.getvalue()


def render_json(header: list[str], rows: list[list]) -> str:
    payload = {
        "columns": header,
        "rows": [[_json_value(cell) for cell in row] for row in rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_table(directory: Path, name: str, header: list[str], rows: list[list],
                fmt: str = "csv") -> Path:
    """Write one table as ``<name>.<fmt>`` and return the path."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unsupported format {fmt!r}")
    path = Path(directory) / f"{name}.{fmt}"
    text = render_csv(header, rows) if fmt == "csv" else render_json(header, rows)
    atomic_write_text(path, text)
    return path
