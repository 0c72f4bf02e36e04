"""Model triples (A, R, S) and their standing assumptions.

A system is a drift matrix A together with PSD weights R and S.  The library's
guarantees hold when (A, R^{1/2}) is controllable and (A, S^{1/2}) is
observable; this module certifies those rank conditions, exposes the dual
triple (A', S, R), and generates random certified systems for tests and the
CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Tolerances, resolve
from .errors import UncertifiedSystem
from .matrices import (
    PsdMatrix,
    SymmetricMatrix,
    as_matrix,
    principal_sqrt,
    spectral_radius,
)

__all__ = [
    "SystemTriple",
    "AssumptionCertificate",
    "controllability_rank",
    "observability_rank",
    "pbh_observability",
    "check_reach_pd",
    "dual",
    "certify",
    "require_certified",
    "random_system",
    "random_psd",
    "random_pd",
]


@dataclass(frozen=True, eq=False)
class SystemTriple:
    """The model (A, R, S) with cached square roots of R and S."""

    A: np.ndarray
    R: PsdMatrix
    S: PsdMatrix
    sqrt_r: SymmetricMatrix
    sqrt_s: SymmetricMatrix

    def __post_init__(self):
        self.A.setflags(write=False)

    @classmethod
    def from_arrays(cls, A, R, S, tols: Tolerances | None = None) -> "SystemTriple":
        A = as_matrix(A).copy()
        R = PsdMatrix.from_array(R, tols)
        S = PsdMatrix.from_array(S, tols)
        r = A.shape[0]
        if R.dim != r or S.dim != r:
            raise ValueError(
                f"dimension mismatch: A is {r}x{r}, R is {R.dim}x{R.dim}, "
                f"S is {S.dim}x{S.dim}"
            )
        return cls(A, R, S, principal_sqrt(R, tols), principal_sqrt(S, tols))

    @property
    def dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class AssumptionCertificate:
    """Outcome of the standing-assumption checks for a system."""

    controllable: bool
    observable: bool
    ctrl_rank: int
    obs_rank: int
    reach_pd_min_eig: float

    @property
    def certified(self) -> bool:
        return self.controllable and self.observable


def _numerical_rank(M: np.ndarray, tols: Tolerances) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tols.rank * sv[0]))


def _ctrb_blocks(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    r = A.shape[0]
    blocks = [B]
    for _ in range(r - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks)


def controllability_rank(sys: SystemTriple, tols: Tolerances | None = None) -> int:
    """Numerical rank of [R^{1/2}, A R^{1/2}, ..., A^{r-1} R^{1/2}]."""
    tols = resolve(tols)
    return _numerical_rank(_ctrb_blocks(sys.A, sys.sqrt_r.values), tols)


def observability_rank(sys: SystemTriple, tols: Tolerances | None = None) -> int:
    """Rank of the stacked [S^{1/2}; S^{1/2} A; ...]; equals the dual's
    controllability rank, which is how it is computed."""
    return controllability_rank(dual(sys), tols)


def pbh_observability(E, sqrt_s, tols: Tolerances | None = None) -> bool:
    """Popov-Belevitch-Hautus test for the pair (E, S^{1/2}).

    True iff for every eigenvalue lambda of E the stacked matrix
    [E - lambda I; S^{1/2}] has full column rank (checked in complex
    arithmetic; E generally has complex spectrum).
    """
    tols = resolve(tols)
    E = as_matrix(E)
    C = as_matrix(sqrt_s)
    r = E.shape[0]
    eye = np.eye(r)
    for lam in np.linalg.eigvals(E):
        stacked = np.vstack([E - lam * eye, C.astype(complex)])
        if _numerical_rank(stacked, tols) < r:
            return False
    return True


def check_reach_pd(sys: SystemTriple) -> float:
    """lambda_min(A A' + R); positive for every controllable system."""
    M = sys.A @ sys.A.T + sys.R.values
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def dual(sys: SystemTriple) -> SystemTriple:
    """The dual triple (A', S, R); involutive exactly (field swap, no recompute)."""
    return SystemTriple(
        np.ascontiguousarray(sys.A.T),
        sys.S,
        sys.R,
        sys.sqrt_s,
        sys.sqrt_r,
    )


def certify(sys: SystemTriple, tols: Tolerances | None = None) -> AssumptionCertificate:
    ctrl = controllability_rank(sys, tols)
    obs = observability_rank(sys, tols)
    r = sys.dim
    return AssumptionCertificate(
        controllable=ctrl == r,
        observable=obs == r,
        ctrl_rank=ctrl,
        obs_rank=obs,
        reach_pd_min_eig=check_reach_pd(sys),
    )


def require_certified(sys: SystemTriple, tols: Tolerances | None = None) -> AssumptionCertificate:
    cert = certify(sys, tols)
    if not cert.certified:
        raise UncertifiedSystem(
            f"rank conditions fail: controllability rank {cert.ctrl_rank}, "
            f"observability rank {cert.obs_rank}, dimension {sys.dim}"
        )
    return cert


def random_psd(
    rng: np.random.Generator,
    dim: int,
    norm: float = 1.0,
    rank: int | None = None,
) -> np.ndarray:
    """Random PSD matrix with spectral norm ``norm`` (0 gives the zero matrix)."""
    if rank is None:
        rank = dim
    if norm == 0.0 or rank == 0:
        return np.zeros((dim, dim))
    B = rng.standard_normal((dim, rank))
    M = B @ B.T
    M = 0.5 * (M + M.T)
    top = float(np.linalg.eigvalsh(M)[-1])
    if top <= 0.0:
        return np.zeros((dim, dim))
    return M * (float(norm) / top)


def random_pd(
    rng: np.random.Generator,
    dim: int,
    norm: float = 1.0,
    min_eig_frac: float = 1e-3,
) -> np.ndarray:
    """Random PD matrix with spectral norm ``norm`` and a definite floor."""
    M = random_psd(rng, dim, norm=1.0)
    M = M + min_eig_frac * np.eye(dim)
    top = float(np.linalg.eigvalsh(M)[-1])
    return M * (float(norm) / top)


def random_system(
    dim: int,
    rng: np.random.Generator | int | None = None,
    spectral_radius_target: float | None = None,
    rank_r: int | None = None,
    rank_s: int | None = None,
    ridge_r: float = 0.0,
    ridge_s: float = 0.0,
    max_attempts: int = 1000,
    tols: Tolerances | None = None,
) -> SystemTriple:
    """Random system certified controllable and observable.

    A has i.i.d. standard normal entries, optionally rescaled so its spectral
    radius hits ``spectral_radius_target``.  R = B B' + ridge_r I and
    S = C C' + ridge_s I with the given inner ranks.  Rejection-samples until
    both rank conditions hold; raises UncertifiedSystem after max_attempts.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if rank_r is None:
        rank_r = dim
    if rank_s is None:
        rank_s = dim
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    for _ in range(max_attempts):
        A = rng.standard_normal((dim, dim))
        if spectral_radius_target is not None:
            rho = spectral_radius(A)
            if rho > 0.0:
                A = A * (spectral_radius_target / rho)
        B = rng.standard_normal((dim, rank_r)) if rank_r > 0 else np.zeros((dim, 0))
        C = rng.standard_normal((dim, rank_s)) if rank_s > 0 else np.zeros((dim, 0))
        R = B @ B.T + ridge_r * np.eye(dim)
        S = C @ C.T + ridge_s * np.eye(dim)
        sys = SystemTriple.from_arrays(A, 0.5 * (R + R.T), 0.5 * (S + S.T), tols)
        if certify(sys, tols).certified:
            return sys
    raise UncertifiedSystem(
        f"could not generate a certified system in {max_attempts} attempts "
        f"(dim {dim}, rank_r {rank_r}, rank_s {rank_s})"
    )
