"""JSON file formats.

State/matrix files look like::

    {"dims": [2, 2], "kind": "pure" | "density" | "observable",
     "data": [[re, im], ...]}

with matrices flattened row-major. Floats are written with 17 significant
digits, which round-trips IEEE doubles exactly. Output is deterministic:
keys keep insertion order and no timestamps are emitted.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import EntProbeError
from .measure import Observable
from .qcore import DensityMatrix, PureState, SystemShape

KINDS = ("pure", "density", "observable")


class FormatError(EntProbeError, ValueError):
    """File does not parse as the expected JSON layout."""


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".17g")
    if s in ("0", "-0"):
        return s + ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialize to JSON with 17-significant-digit floats.

    Lists made only of scalars are kept on one line.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def complex_pairs(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def to_record(obj: PureState | DensityMatrix | Observable) -> dict:
    if isinstance(obj, PureState):
        kind, data = "pure", obj.amplitudes
    elif isinstance(obj, DensityMatrix):
        kind, data = "density", obj.matrix
    elif isinstance(obj, Observable):
        kind, data = "observable", obj.matrix
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")
    rec = {"dims": list(obj.shape.dims), "kind": kind, "data": complex_pairs(data)}
    if isinstance(obj, Observable) and obj.label:
        rec["label"] = obj.label
    return rec


def from_record(rec: Any, expect: str | None = None):
    """Decode a record; shape/format problems raise FormatError, physics ones propagate."""
    if not isinstance(rec, dict):
        raise FormatError("record must be a JSON object")
    try:
        dims = [int(d) for d in rec["dims"]]
        kind = rec["kind"]
        data = np.array([complex(float(re), float(im)) for re, im in rec["data"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed record: {exc}") from exc
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}")
    if expect is not None and kind != expect:
        raise FormatError(f"expected kind {expect!r}, got {kind!r}")
    shape = SystemShape(dims)
    D = shape.total_dim
    if kind == "pure":
        if data.size != D:
            raise FormatError(f"{data.size} amplitudes for total dimension {D}")
        return PureState(shape, data)
    if data.size != D * D:
        raise FormatError(f"{data.size} entries for a {D}x{D} matrix")
    mat = data.reshape(D, D)
    if kind == "density":
        return DensityMatrix(shape, mat)
    return Observable(shape, mat, rec.get("label", ""))


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def load(path: str | Path, expect: str | None = None):
    return from_record(read_json(path), expect)


def load_observables(path: str | Path) -> list[Observable]:
    """A single observable record or a JSON array of them."""
    raw = read_json(path)
    recs = raw if isinstance(raw, list) else [raw]
    out = [from_record(r, "observable") for r in recs]
    for i, o in enumerate(out):
        if not o.label:
            out[i] = Observable(o.shape, o.matrix, f"O{i + 1}")
    return out


def save(obj: Any, path: str | Path) -> None:
    text = dumps(to_record(obj) if isinstance(obj, (PureState, DensityMatrix, Observable)) else obj)
    Path(path).write_text(text + "\n")
