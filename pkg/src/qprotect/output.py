"""Columnar output in CSV and JSON with atomic file writes.

Both renderers are deterministic functions of (metadata, columns, rows):
no timestamps, no environment state.  Rendering the parsed form of a JSON
document reproduces it byte for byte, which is what makes rerun-and-compare
checks meaningful.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

__all__ = [
    "format_value",
    "render_csv",
    "render_json",
    "write_text",
]


def format_value(value) -> str:
    """Render one cell: 12 significant digits for floats, verbatim otherwise."""
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12g" % float(value)
    return str(value)


def _native(value):
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return str(value)


def render_csv(metadata: dict, columns: list[str], rows: list[tuple]) -> str:
    """CSV text: '#'-prefixed metadata lines, then header, then data rows."""
    lines = ["# %s: %s" % (key, format_value(val)) for key, val in metadata.items()]
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row width %d does not match %d columns" % (len(row), len(columns)))
        lines.append(",".join(format_value(cell) for cell in row))
    return "\n".join(lines) + "\n"


def render_json(metadata: dict, columns: list[str], rows: list[tuple]) -> str:
    """JSON text with the stable shape {metadata, columns, rows}.

    json.loads followed by render of the same payload is byte-identical:
    keys are emitted sorted and floats use the shortest round-trip repr.
    """
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row width %d does not match %d columns" % (len(row), len(columns)))
    payload = {
        "metadata": {key: _native(val) for key, val in metadata.items()},
        "columns": list(columns),
        "rows": [[_native(cell) for cell in row] for row in rows],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_text(path: str, content: str) -> None:
    """Write atomically: a temp file in the target directory, then rename.

    Readers either see the previous complete file or the new complete file,
    never a partial one.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".qprotect-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(content)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
