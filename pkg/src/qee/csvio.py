"""CSV tables with ``# key: value`` metadata lines ahead of the header row."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if x is None:
        return "absent"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    # 17 significant digits round-trip any double
    return format(float(x), ".17g")


def write_table(path, columns, rows, meta: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {v}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([fmt(x) for x in row] for row in rows)
    path.write_text(buf.getvalue())


def read_table(path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """Inverse of :func:`write_table` for numeric columns.

    Non-numeric columns come back as arrays of strings.
    """
    meta: dict[str, str] = {}
    body = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
        elif line:
            body.append(line)
    if not body:
        raise ValueError(f"{path}: no header row")
    header, *rows = list(csv.reader(body))
    cols = {}
    for i, name in enumerate(header):
        raw = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(x) for x in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return meta, cols
