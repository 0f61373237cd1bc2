"""CSV / JSON emission with bit-stable number formatting."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

FLOAT_FORMAT = "{:.16e}"  # 17 significant digits


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FORMAT.format(float(x))


def header_lines(header: Mapping | Sequence[str] | None) -> list[str]:
    if header is None:
        return []
    if isinstance(header, Mapping):
        return [f"# {k} = {_header_value(v)}" for k, v in header.items()]
    return [line if line.startswith("#") else f"# {line}" for line in header]


def _header_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns: Mapping[str, Sequence], header=None) -> Path:
    """Write equal-length columns; ``header`` becomes leading ``#`` lines."""
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    lengths = {len(d) for d in data}
    if len(lengths) > 1:
        raise ValueError(f"columns differ in length: {sorted(lengths)}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines(header):
            fh.write(line + "\n")
        fh.write(",".join(names) + "\n")
        for row in zip(*data):
            fh.write(",".join(format_number(v) for v in row) + "\n")
    return path


def read_csv(path):
    """Parse a file written by :func:`write_csv` into (header lines, columns)."""
    header, names, rows = [], None, []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                header.append(line)
            elif names is None:
                names = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows, dtype=float).reshape(len(rows), len(names or []))
    return header, {n: arr[:, k] for k, n in enumerate(names or [])}


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload: Mapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path
