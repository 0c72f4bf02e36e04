"""Dense symmetric-matrix substrate.

Immutable matrix values with a certified Löwner class (symmetric / positive
semi-definite / positive definite), plus the small set of kernels everything
else consumes: the Sherman-Morrison-Woodbury inverse, principal square roots,
spectral radius and norm, Löwner comparisons, and Gelfand root sequences.

Norms are spectral throughout: ``||M|| = sqrt(lambda_max(M M'))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg as sla

from .config import Tolerances, resolve
from .errors import NotPd, NotPsd, NotSymmetric, SingularFactor

__all__ = [
    "SymmetricMatrix",
    "PsdMatrix",
    "PdMatrix",
    "LoewnerRelation",
    "LoewnerComparison",
    "as_matrix",
    "symmetrize",
    "spectral_norm",
    "spectral_radius",
    "scale_of",
    "smw_inverse",
    "principal_sqrt",
    "loewner_compare",
    "gelfand_estimate",
    "lu_min_pivot",
    "solve_lu",
]


def as_matrix(M) -> np.ndarray:
    """Coerce a wrapper type or array-like to a float64 square ndarray."""
    if isinstance(M, SymmetricMatrix):
        return M.values
    A = np.asarray(M, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def symmetrize(M) -> np.ndarray:
    M = as_matrix(M)
    return 0.5 * (M + M.T)


def spectral_norm(M) -> float:
    """Spectral norm sqrt(lambda_max(M M')); symmetric solver when possible."""
    A = as_matrix(M)
    if A.shape[0] == 1:
        return abs(float(A[0, 0]))
    if np.array_equal(A, A.T):
        w = np.linalg.eigvalsh(A)
        return float(max(abs(w[0]), abs(w[-1])))
    return float(np.linalg.norm(A, 2))


def spectral_radius(M) -> float:
    """max |lambda| over the (generally complex) spectrum of M."""
    A = as_matrix(M)
    if A.shape[0] == 1:
        return abs(float(A[0, 0]))
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def scale_of(*values) -> float:
    """max(1, ||M||) over matrices and |x| over scalars: the residual scale."""
    s = 1.0
    for v in values:
        if np.ndim(v) == 0:
            s = max(s, abs(float(v)))
        else:
            s = max(s, spectral_norm(v))
    return s


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """An immutable, exactly symmetric real matrix."""

    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @classmethod
    def from_array(cls, M, tols: Tolerances | None = None) -> "SymmetricMatrix":
        """Certify symmetry, then store the exactly symmetrized copy."""
        tols = resolve(tols)
        A = as_matrix(M)
        defect = spectral_norm(A - A.T)
        if defect > tols.sym * scale_of(A):
            raise NotSymmetric(
                f"symmetry defect {defect:.3e} exceeds {tols.sym:.1e} * scale"
            )
        return cls(0.5 * (A + A.T))

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def norm(self) -> float:
        return spectral_norm(self.values)

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.values.astype(dtype)
        return self.values


@dataclass(frozen=True, eq=False)
class PsdMatrix(SymmetricMatrix):
    """Symmetric matrix certified positive semi-definite; min eigenvalue cached."""

    min_eig: float = 0.0

    @classmethod
    def from_array(
        cls, M, tols: Tolerances | None = None, clamp: bool = False
    ) -> "PsdMatrix":
        """Certify lambda_min >= -psd_tol * scale.

        With ``clamp=True``, eigenvalues in (-psd_tol * scale, 0) are clamped
        to 0 (used on Riccati-map outputs to control drift across iterations).
        """
        tols = resolve(tols)
        sym = SymmetricMatrix.from_array(M, tols)
        A = sym.values
        w = np.linalg.eigvalsh(A)
        lam_min = float(w[0])
        threshold = -tols.psd * scale_of(A)
        if lam_min < threshold:
            raise NotPsd(f"lambda_min = {lam_min:.3e} below {threshold:.3e}")
        if clamp and lam_min < 0.0:
            _, V = np.linalg.eigh(A)
            A = (V * np.clip(w, 0.0, None)) @ V.T
            A = 0.5 * (A + A.T)
            lam_min = max(lam_min, 0.0)
        return cls(A, min_eig=lam_min)


@dataclass(frozen=True, eq=False)
class PdMatrix(PsdMatrix):
    """Symmetric matrix certified positive definite."""

    @classmethod
    def from_array(cls, M, tols: Tolerances | None = None, clamp: bool = False) -> "PdMatrix":
        tols = resolve(tols)
        sym = SymmetricMatrix.from_array(M, tols)
        lam_min = float(np.linalg.eigvalsh(sym.values)[0])
        if lam_min <= tols.pd * scale_of(sym.values):
            raise NotPd(f"lambda_min = {lam_min:.3e} not above {tols.pd:.1e} * scale")
        return cls(sym.values, min_eig=lam_min)


def _as_psd(P, tols: Tolerances | None = None) -> PsdMatrix:
    return P if isinstance(P, PsdMatrix) else PsdMatrix.from_array(P, tols)


def _as_pd(P, tols: Tolerances | None = None) -> PdMatrix:
    return P if isinstance(P, PdMatrix) else PdMatrix.from_array(P, tols)


def _lu_factor_quiet(A):
    # singularity is gated on the pivots afterwards; scipy's warning is noise
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        return sla.lu_factor(A, check_finite=False)


def lu_min_pivot(M) -> float:
    """Smallest |pivot| of the partially-pivoted LU of M."""
    A = as_matrix(M)
    lu, _ = _lu_factor_quiet(A)
    return float(np.min(np.abs(np.diag(lu))))


def solve_lu(M, B, context: str = "matrix", tols: Tolerances | None = None) -> np.ndarray:
    """LU solve M X = B with an explicit pivot gate; raises SingularFactor."""
    tols = resolve(tols)
    A = as_matrix(M)
    B = np.asarray(B, dtype=float)
    lu, piv = _lu_factor_quiet(A)
    min_pivot = float(np.min(np.abs(np.diag(lu))))
    if min_pivot <= tols.pivot * scale_of(A):
        raise SingularFactor(
            f"{context}: pivot {min_pivot:.3e} below {tols.pivot:.1e} * scale"
        )
    return sla.lu_solve((lu, piv), B, check_finite=False)


def smw_inverse(M, N, U, V, tols: Tolerances | None = None) -> np.ndarray:
    """(M + U N V)^{-1} via the Sherman-Morrison-Woodbury identity.

    Computed literally as M^{-1} - M^{-1} U (N^{-1} + V M^{-1} U)^{-1} V M^{-1};
    raises SingularFactor when any of the three required inverses fails.
    """
    M = as_matrix(M)
    N = as_matrix(N)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    V = np.atleast_2d(np.asarray(V, dtype=float))
    r = M.shape[0]
    k = N.shape[0]
    if U.shape != (r, k) or V.shape != (k, r):
        raise ValueError(
            f"nonconformable update: M is {M.shape}, N is {N.shape}, "
            f"U is {U.shape}, V is {V.shape}"
        )
    Minv = solve_lu(M, np.eye(r), context="M", tols=tols)
    Ninv = solve_lu(N, np.eye(k), context="N", tols=tols)
    MinvU = Minv @ U
    core = Ninv + V @ MinvU
    VMinv = V @ Minv
    correction = MinvU @ solve_lu(core, VMinv, context="N^-1 + V M^-1 U", tols=tols)
    return Minv - correction


def principal_sqrt(P, tols: Tolerances | None = None) -> SymmetricMatrix:
    """Principal symmetric square root of a PSD matrix.

    Eigendecomposition-based for every input (negative eigenvalues within the
    PSD slack are clamped to zero) so the root is symmetric and reproducible.
    """
    P = _as_psd(P, tols)
    w, V = np.linalg.eigh(P.values)
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    return SymmetricMatrix(0.5 * (root + root.T))


class LoewnerRelation(Enum):
    GREATER = ">"
    GREATER_EQUAL = ">="
    LESS = "<"
    LESS_EQUAL = "<="
    EQUAL = "=="
    INCOMPARABLE = "<>"


@dataclass(frozen=True)
class LoewnerComparison:
    """Outcome of a Löwner-order comparison of symmetric X and Y.

    ``lam_min_xy`` is lambda_min(X - Y) and ``lam_min_yx`` is lambda_min(Y - X);
    the booleans are threshold classifications of those two numbers.  Equality
    within tolerance reports both ``ge`` and ``le`` (zero gap).
    """

    lam_min_xy: float
    lam_min_yx: float
    ge: bool
    gt: bool
    le: bool
    lt: bool

    @property
    def incomparable(self) -> bool:
        return not (self.ge or self.le)

    @property
    def relation(self) -> LoewnerRelation:
        if self.ge and self.le:
            return LoewnerRelation.EQUAL
        if self.gt:
            return LoewnerRelation.GREATER
        if self.ge:
            return LoewnerRelation.GREATER_EQUAL
        if self.lt:
            return LoewnerRelation.LESS
        if self.le:
            return LoewnerRelation.LESS_EQUAL
        return LoewnerRelation.INCOMPARABLE


def loewner_compare(X, Y, tols: Tolerances | None = None) -> LoewnerComparison:
    """Classify X vs Y in the Löwner partial order."""
    tols = resolve(tols)
    X = as_matrix(X)
    Y = as_matrix(Y)
    if X.shape != Y.shape:
        raise ValueError(f"dimension mismatch: {X.shape} vs {Y.shape}")
    D = symmetrize(X - Y)
    w = np.linalg.eigvalsh(D) if D.shape[0] > 1 else np.array([D[0, 0]])
    lam_min_xy = float(w[0])
    lam_min_yx = float(-w[-1])
    s = scale_of(D)
    ge = lam_min_xy >= -tols.psd * s
    le = lam_min_yx >= -tols.psd * s
    gt = lam_min_xy > tols.pd * s
    lt = lam_min_yx > tols.pd * s
    return LoewnerComparison(lam_min_xy, lam_min_yx, ge=ge, gt=gt, le=le, lt=lt)


def gelfand_estimate(M, k_max: int) -> np.ndarray:
    """Sequence ||M^k||^{1/k} for k = 1..k_max (Gelfand root sequence)."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    A = as_matrix(M)
    out = np.empty(k_max)
    Mk = np.eye(A.shape[0])
    # overflow surfaces as the OverflowError below, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, k_max + 1):
            Mk = Mk @ A
            if not np.all(np.isfinite(Mk)):
                raise OverflowError(
                    f"||M^{k}|| exceeds the representable range (rho(M) > 1 regime)"
                )
            out[k - 1] = float(np.linalg.norm(Mk, 2)) ** (1.0 / k)
    return out
