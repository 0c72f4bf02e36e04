"""Central numerical tolerances.

All thresholds are scale-relative: a tolerance ``t`` applied to a matrix M
means ``t * max(1, ||M||)`` with the spectral norm.  Defaults are chosen for
double precision at dimensions up to ~16.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

__all__ = ["Tolerances", "DEFAULT_TOLERANCES", "resolve", "fixed_point_tol"]


@dataclass(frozen=True)
class Tolerances:
    """Scale-relative tolerance constants used across the library."""

    sym: float = 1e-12          # symmetry defect allowed at construction
    psd: float = 1e-10          # eigenvalue slack for positive semi-definite
    pd: float = 1e-12           # eigenvalue margin required for positive definite
    rank: float = 1e-10         # singular values below rank * sigma_max count as zero
    pivot: float = 1e-14        # LU pivot threshold for "invertible"
    fixed_point: float = 1e-12  # successive-iterate stopping rule
    identity: float = 1e-9      # residual budget for algebraic identities

    def with_fixed_point(self, tol: float) -> "Tolerances":
        return replace(self, fixed_point=tol)


DEFAULT_TOLERANCES = Tolerances()


def resolve(tols: Tolerances | None) -> Tolerances:
    return DEFAULT_TOLERANCES if tols is None else tols


def fixed_point_tol(override: float | None = None) -> float:
    """Default fixed-point tolerance, honoring the RICCATI_LAB_TOL env var."""
    if override is not None:
        return float(override)
    env = os.environ.get("RICCATI_LAB_TOL")
    if env is not None:
        value = float(env)
        if value <= 0:
            raise ValueError(f"RICCATI_LAB_TOL must be positive, got {env!r}")
        return value
    return DEFAULT_TOLERANCES.fixed_point
