"""Deterministic CSV/JSON writers.

Floats are written with 17 significant digits. Every CSV starts with ``#``
comment lines that hold the resolved run configuration as JSON. No
timestamps or host details are written, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

SPECTRUM_COLUMNS = ("nu", "A")
STATS_COLUMNS = ("N", "V", "fwhm", "fwhm_times_N", "mean", "variance", "area", "peak_pos", "peak_height")
TRACE_COLUMNS = ("t", "re_c", "im_c")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return "%.17g" % float(x)


def tag(x: float) -> str:
    """Compact, filename-safe rendering of a parameter value."""
    s = "%.12g" % float(x)
    return "0" if s == "-0" else s


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_csv(path: Path, columns, rows, config: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# config: " + json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))]
    lines.append(",".join(columns))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path: Path, record: dict, config: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps({"config": config, **record}), encoding="utf-8")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Read back a file written by ``write_csv`` (header names, float array)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(header))
    return header, data
