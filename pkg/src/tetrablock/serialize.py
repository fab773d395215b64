"""JSON and CSV wire formats.

Complex numbers are two-element arrays ``[re, im]``. A square matrix is
``{"order": n, "data": [[re, im], ...]}`` with entries in row-major order;
a rectangular one uses ``"rows"``/``"cols"`` instead of ``"order"``. Floats
are written with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .errors import DimensionError

CSV_COLUMNS = ("x1_re", "x1_im", "x2_re", "x2_im", "x3_re", "x3_im", "residual", "tag")


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {M.shape}")
    data = [[v.real, v.imag] for v in M.ravel()]
    if M.shape[0] == M.shape[1]:
        return {"order": M.shape[0], "data": data}
    return {"rows": M.shape[0], "cols": M.shape[1], "data": data}


def decode_matrix(obj) -> np.ndarray:
    """Inverse of :func:`encode_matrix`; also accepts a nested list of rows
    whose entries are numbers or ``[re, im]`` pairs."""
    if isinstance(obj, dict):
        if "order" in obj:
            rows = cols = int(obj["order"])
        elif "rows" in obj and "cols" in obj:
            rows, cols = int(obj["rows"]), int(obj["cols"])
        else:
            raise ValueError("matrix object needs 'order' or 'rows'/'cols'")
        data = obj.get("data")
        if not isinstance(data, list) or len(data) != rows * cols:
            raise ValueError(f"matrix data must hold {rows * cols} entries")
        vals = [decode_complex(v) for v in data]
        return np.array(vals, dtype=complex).reshape(rows, cols)
    if isinstance(obj, list):
        rows = [[decode_complex(v) for v in row] for row in obj]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix rows")
        return np.array(rows, dtype=complex).reshape(len(rows), len(rows[0]) if rows else 0)
    raise ValueError(f"cannot read a matrix from {type(obj).__name__}")


def decode_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex number must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return parse_complex(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"not a number: {v!r}")
    return complex(v)


def parse_complex(text: str) -> complex:
    """``"0.5"``, ``"1-2i"``, ``"3j"``, ``"i"`` and the like."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j"):
        return 1j
    if t == "-j":
        return -1j
    t = t.replace("+j", "+1j").replace("-j", "-1j")
    if t.startswith("j"):
        t = "1" + t
    try:
        return complex(t)
    except ValueError:
        raise ValueError(f"cannot parse complex number {text!r}") from None


def parse_point(text: str, size: int = 3) -> tuple[complex, ...]:
    parts = [p for p in text.split(",")]
    if len(parts) != size:
        raise ValueError(f"expected {size} comma-separated coordinates, got {len(parts)}")
    return tuple(parse_complex(p) for p in parts)


def to_plain(obj: Any) -> Any:
    """Convert results into JSON-ready builtins (complex as ``[re, im]``)."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, type(None), str, int)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return encode_matrix(obj)
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, out: list[str], indent: int, level: int) -> None:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(obj, float):
        out.append(fmt_float(obj))
    elif isinstance(obj, (bool, type(None), str, int)):
        out.append(json.dumps(obj))
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
        elif all(isinstance(v, (float, int)) and not isinstance(v, bool) for v in obj):
            out.append("[" + ", ".join(fmt_float(v) if isinstance(v, float) else str(v) for v in obj) + "]")
        else:
            out.append("[")
            for i, v in enumerate(obj):
                out.append((sep if i else "") + pad)
                _emit(v, out, indent, level + 1)
            out.append(end + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append((sep if i else "") + pad + json.dumps(k) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    out: list[str] = []
    _emit(to_plain(obj), out, indent, 0)
    return "".join(out)


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_matrix(path: str | Path) -> np.ndarray:
    return decode_matrix(load_json(path))


def cloud_rows(cloud) -> Iterable[list[str]]:
    for pt, res, tag in cloud.rows():
        vals = []
        for z in pt:
            vals += [fmt_float(z.real), fmt_float(z.imag)]
        yield vals + [fmt_float(res), str(tag)]


def cloud_to_csv(cloud, fh=None) -> str | None:
    """Write a point cloud as CSV; returns the text when ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(cloud_rows(cloud))
    return buf.getvalue() if fh is None else None


def cloud_from_csv(text: str) -> list[tuple[tuple[complex, complex, complex], float, str]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError("unexpected CSV header")
    out = []
    for r in rows[1:]:
        f = [float(v) for v in r[:7]]
        out.append(((complex(f[0], f[1]), complex(f[2], f[3]), complex(f[4], f[5])), f[6], r[7]))
    return out


def cloud_to_plain(cloud) -> dict:
    records = []
    for rec in cloud:
        entry = {"x3": rec.x3}
        if rec.ok:
            entry["pairs"] = [[a, b] for a, b in rec.spectrum.pairs]
            entry["residuals"] = [float(r) for r in rec.spectrum.residuals]
            entry["tags"] = [str(t) for t in rec.tags]
        else:
            entry["error"] = rec.error
        records.append(entry)
    return {"order": cloud.order, "records": records}
