"""Deterministic JSON/CSV writers.

All floats are rendered with 17 significant digits so that every double
round-trips exactly and repeated runs produce byte-identical files.
Non-finite floats map to JSON null (standard JSON has no Infinity/NaN).
"""

from __future__ import annotations

import math

import numpy as np


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(float(x), ".17g")
    # normalize "-0" so output does not depend on rounding direction of zero
    if float(s) == 0.0:
        return "0"
    return s


def _render(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, complex):
        return _render([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
        return f'"{out}"'
    if isinstance(obj, np.ndarray):
        return _render(list(obj), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}"{k}": {_render(v, indent, level + 1)}' for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + close_pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_render(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + close_pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def to_json_text(obj, indent: int = 2) -> str:
    return _render(obj, indent, 0) + "\n"


def write_json(path, obj, indent: int = 2) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json_text(obj, indent))


def write_csv(path, header: str, columns) -> None:
    """Write columns of floats under a comma-separated header line."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("csv columns must share a length")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for i in range(n):
            fh.write(",".join(fmt_float(c[i]) for c in cols) + "\n")
