"""System files: UTF-8 JSON with row-major nested arrays.

Schema: {"dim": r, "A": [[...]], "R": [[...]], "S": [[...]],
"metadata": {"name": ..., "seed": ...}} with metadata optional.  Floats are
written with shortest round-trip rendering, so a file regenerated from the
same seed is byte-identical.  Parse errors are ValueError naming the
offending field; R and S are PSD-certified on load.
"""

from __future__ import annotations

import json

import numpy as np

from .config import Tolerances
from .errors import RiccatiLabError
from .matrices import PsdMatrix
from .systems import SystemTriple

__all__ = ["load_system", "save_system", "system_to_dict"]


def _parse_matrix(data: dict, field: str, dim: int) -> np.ndarray:
    if field not in data:
        raise ValueError(f"field '{field}' is missing")
    try:
        M = np.asarray(data[field], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"field '{field}' is not a numeric array: {exc}") from exc
    if M.shape != (dim, dim):
        raise ValueError(
            f"field '{field}' has shape {M.shape}, expected ({dim}, {dim})"
        )
    if not np.all(np.isfinite(M)):
        raise ValueError(f"field '{field}' contains non-finite entries")
    return M


def load_system(path, tols: Tolerances | None = None) -> tuple[SystemTriple, dict]:
    """Read a system file; returns (system, metadata).

    Raises ValueError (or json.JSONDecodeError, a subclass) on any schema
    problem, naming the offending field.
    """
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError("top level must be a JSON object")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError(f"field 'dim' must be a positive integer, got {dim!r}")
    A = _parse_matrix(data, "A", dim)
    R = _parse_matrix(data, "R", dim)
    S = _parse_matrix(data, "S", dim)
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ValueError("field 'metadata' must be an object")
    for field, M in (("R", R), ("S", S)):
        try:
            PsdMatrix.from_array(M, tols)
        except RiccatiLabError as exc:
            raise ValueError(f"field '{field}' failed PSD certification: {exc}") from exc
    return SystemTriple.from_arrays(A, R, S, tols), metadata


def system_to_dict(sys: SystemTriple, metadata: dict | None = None) -> dict:
    out = {
        "dim": sys.dim,
        "A": sys.A.tolist(),
        "R": sys.R.values.tolist(),
        "S": sys.S.values.tolist(),
    }
    if metadata:
        out["metadata"] = metadata
    return out


def save_system(path, sys: SystemTriple, metadata: dict | None = None) -> None:
    """Write a system file (UTF-8, 2-space indent, trailing newline)."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(system_to_dict(sys, metadata), f, indent=2)
        f.write("\n")
