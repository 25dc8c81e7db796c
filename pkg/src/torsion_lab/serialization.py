"""JSON encodings for algebras, metrics and reports.

Complex numbers are always written as ``[re, im]`` pairs, so a complex array of
shape ``s`` becomes a nested list of shape ``s + (2,)``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionError, TorsionLabError
from .lie_core import StructureConstants
from .hermitian import HermitianMetric


class FormatError(TorsionLabError, ValueError):
    """JSON document does not follow the expected layout."""


def encode_array(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_array(data) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"not a numeric nested list: {exc}") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise FormatError(f"complex entries must be [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _dim(data: dict) -> int:
    try:
        n = data["dim"]
    except (KeyError, TypeError):
        raise FormatError("missing 'dim'") from None
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError(f"'dim' must be a positive integer, got {n!r}")
    return n


def algebra_to_dict(alg: StructureConstants) -> dict:
    out = {"dim": alg.dim, "c": encode_array(alg.c)}
    if alg.name:
        out["name"] = alg.name
    return out


def algebra_from_dict(data: dict) -> StructureConstants:
    n = _dim(data)
    if "c" not in data:
        raise FormatError("missing 'c'")
    c = decode_array(data["c"])
    if c.shape != (n, n, n):
        raise DimensionError(f"'c' has shape {c.shape}, expected {(n, n, n)}")
    return StructureConstants(c, name=data.get("name", ""))


def metric_to_dict(metric: HermitianMetric) -> dict:
    return {"dim": metric.dim, "H": encode_array(metric.H)}


def metric_from_dict(data: dict) -> HermitianMetric:
    n = _dim(data)
    if "H" not in data:
        raise FormatError("missing 'H'")
    H = decode_array(data["H"])
    if H.shape != (n, n):
        raise DimensionError(f"'H' has shape {H.shape}, expected {(n, n)}")
    return HermitianMetric(H)


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON ({exc})") from None


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def load_algebra(source: str) -> StructureConstants:
    """Catalog name or path to an algebra JSON file."""
    from . import catalog

    if source in catalog.names():
        return catalog.get(source)
    if Path(source).is_file():
        return algebra_from_dict(read_json(source))
    raise KeyError(f"unknown catalog algebra {source!r} (and no such file); "
                   f"known: {', '.join(catalog.names())}")


def load_metric(path) -> HermitianMetric:
    return metric_from_dict(read_json(path))
