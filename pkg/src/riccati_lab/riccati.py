"""The Riccati map, its semigroup, and the transport identities.

The map sends a PSD matrix P to A(I+PS)^{-1}PA' + R.  Alongside the iterates
this module computes the step matrices E(P) = A(I+PS)^{-1} and
F(P) = S(I+PS)^{-1}, the directed products of step matrices along a
trajectory, the accumulated Gramians, parallel addition, Frechet derivative
action, and the exact algebraic identities tying them together.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .config import Tolerances, resolve
from .errors import IdentityViolation
from .matrices import (
    PdMatrix,
    PsdMatrix,
    SymmetricMatrix,
    _as_pd,
    _as_psd,
    principal_sqrt,
    scale_of,
    spectral_norm,
    symmetrize,
)
from .systems import SystemTriple, dual

__all__ = [
    "RiccatiTrajectory",
    "AlphaBounds",
    "IdentityReport",
    "phi",
    "phi_raw",
    "phi_hat",
    "phi_n",
    "map_E",
    "map_F",
    "alpha_bounds",
    "parallel_add",
    "frechet_apply",
    "verify_identities",
]


@dataclass(frozen=True, eq=False)
class RiccatiTrajectory:
    """Iterates P_k, directed products and Gramians of one trajectory.

    ``P``, ``Eprod`` and ``G`` are (n+1, r, r) stacks when the path is kept
    (P[k] is the k-th iterate, Eprod[0] = I, G[0] = 0) and None when only the
    endpoint was stored; ``final_P``/``final_Eprod``/``final_G`` always hold
    the endpoint.
    """

    sys: SystemTriple
    P0: PsdMatrix
    n: int
    P: np.ndarray | None
    Eprod: np.ndarray | None
    G: np.ndarray | None
    final_P: np.ndarray
    final_Eprod: np.ndarray
    final_G: np.ndarray

    def __post_init__(self):
        for arr in (self.P, self.Eprod, self.G,
                    self.final_P, self.final_Eprod, self.final_G):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def has_path(self) -> bool:
        return self.P is not None

    def _path(self, arr, name):
        if arr is None:
            raise ValueError(f"trajectory stored endpoint only; {name} path unavailable")
        return arr

    def iterate(self, k: int) -> np.ndarray:
        return self._path(self.P, "iterate")[k]

    def product(self, k: int) -> np.ndarray:
        return self._path(self.Eprod, "product")[k]

    def gramian(self, k: int) -> np.ndarray:
        return self._path(self.G, "gramian")[k]


@dataclass(frozen=True)
class AlphaBounds:
    """The two scalars squeezing F(P) between multiples of S."""

    alpha_minus: float
    alpha_plus: float


def _triple(sys: SystemTriple):
    return sys.A, sys.R.values, sys.S.values


def phi(sys: SystemTriple, P, tols: Tolerances | None = None) -> PsdMatrix:
    """One step of the map: A(I+PS)^{-1}PA' + R, symmetrized and re-certified.

    Eigenvalues within the PSD slack below zero are clamped to zero so that
    long iterations cannot drift out of the cone.
    """
    P = _as_psd(P, tols)
    A, R, S = _triple(sys)
    P_next, _, _ = _backend.riccati_step(A, R, S, P.values)
    return PsdMatrix.from_array(P_next, tols, clamp=True)


def phi_raw(sys: SystemTriple, P) -> np.ndarray:
    """The map evaluated with no symmetrization anywhere (defect probe)."""
    P = _as_psd(P)
    A, _, S = _triple(sys)
    r = sys.dim
    E_val = np.linalg.solve(np.eye(r) + S @ P.values, A.T).T
    return E_val @ P.values @ A.T + sys.R.values


def phi_hat(sys: SystemTriple, P, tols: Tolerances | None = None) -> PsdMatrix:
    """The dual map: the step map of (A', S, R)."""
    return phi(dual(sys), P, tols)


def phi_n(
    sys: SystemTriple,
    P,
    n: int,
    keep_path: bool = True,
    tols: Tolerances | None = None,
) -> RiccatiTrajectory:
    """n-fold iteration with products and Gramians in one forward sweep.

    The three sequences share the recursion: P advances by the map, the
    product picks up the step matrix on the left, and the Gramian accumulates
    the F-weighted square of the product so far.  Cost is O(n) matrix
    products; set ``keep_path=False`` to store only the endpoint.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    P0 = _as_psd(P, tols)
    A, R, S = _triple(sys)
    if keep_path:
        P_arr, E_arr, G_arr = _backend.riccati_sweep(A, R, S, P0.values, n)
        return RiccatiTrajectory(
            sys=sys, P0=P0, n=n, P=P_arr, Eprod=E_arr, G=G_arr,
            final_P=P_arr[-1].copy(), final_Eprod=E_arr[-1].copy(),
            final_G=G_arr[-1].copy(),
        )
    P_fin, E_fin, G_fin = _backend.riccati_final(A, R, S, P0.values, n)
    return RiccatiTrajectory(
        sys=sys, P0=P0, n=n, P=None, Eprod=None, G=None,
        final_P=P_fin, final_Eprod=E_fin, final_G=G_fin,
    )


def map_E(sys: SystemTriple, P, tols: Tolerances | None = None) -> np.ndarray:
    """The step matrix A(I+PS)^{-1}."""
    P = _as_psd(P, tols)
    A, R, S = _triple(sys)
    _, E_val, _ = _backend.riccati_step(A, R, S, P.values)
    return E_val


def map_F(sys: SystemTriple, P, tols: Tolerances | None = None) -> PsdMatrix:
    """S(I+PS)^{-1} computed in its manifestly symmetric form.

    Evaluates S^{1/2}(I + S^{1/2} P S^{1/2})^{-1} S^{1/2}, which is symmetric
    PSD by construction and equal to S(I+PS)^{-1}.
    """
    P = _as_psd(P, tols)
    sq = sys.sqrt_s.values
    r = sys.dim
    inner = np.eye(r) + sq @ P.values @ sq
    F_val = sq @ np.linalg.solve(symmetrize(inner), sq)
    return PsdMatrix.from_array(symmetrize(F_val), tols, clamp=True)


def alpha_bounds(sys: SystemTriple, P, tols: Tolerances | None = None) -> AlphaBounds:
    """Scalars with alpha_minus * S <= F(P) <= alpha_plus * S."""
    P = _as_psd(P, tols)
    wp = np.linalg.eigvalsh(P.values)
    ws = np.linalg.eigvalsh(sys.S.values)
    return AlphaBounds(
        alpha_minus=1.0 / (1.0 + float(wp[-1]) * float(ws[-1])),
        alpha_plus=1.0 / (1.0 + float(wp[0]) * float(ws[0])),
    )


def parallel_add(P, Q, tols: Tolerances | None = None) -> PdMatrix:
    """Parallel addition (P + Q^{-1})^{-1} of positive definite P and Q.

    Computed as Q^{1/2}(Q^{1/2} P Q^{1/2} + I)^{-1} Q^{1/2}: symmetric by
    construction and free of an explicit inverse of Q.
    """
    P = _as_pd(P, tols)
    Q = _as_pd(Q, tols)
    if P.dim != Q.dim:
        raise ValueError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    sq = principal_sqrt(Q, tols).values
    inner = sq @ P.values @ sq + np.eye(P.dim)
    H_val = sq @ np.linalg.solve(symmetrize(inner), sq)
    return PdMatrix.from_array(symmetrize(H_val), tols)


def frechet_apply(
    sys: SystemTriple, P, H, n: int, tols: Tolerances | None = None
) -> SymmetricMatrix:
    """Derivative of the n-fold map at P in direction H: E_n(P) H E_n(P)'."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    H = H if isinstance(H, SymmetricMatrix) else SymmetricMatrix.from_array(H, tols)
    traj = phi_n(sys, P, n, keep_path=False, tols=tols)
    En = traj.final_Eprod
    return SymmetricMatrix.from_array(symmetrize(En @ H.values @ En.T), tols)


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of the three transport identities at (P, Q, n).

    ``one_step``: E(Q) vs E(P)(I + (P-Q)F(Q));
    ``difference``: the n-step difference vs E_n(P)(P-Q)E_n(Q)';
    ``product``: E_n(Q) vs E_n(P)(I + (P-Q)G_n(Q)).
    Each residual is a spectral norm with its own scale = max(1, side norms).
    """

    n: int
    one_step: float
    one_step_scale: float
    difference: float
    difference_scale: float
    product: float
    product_scale: float

    def worst(self) -> float:
        """Largest scale-relative residual."""
        return max(
            self.one_step / self.one_step_scale,
            self.difference / self.difference_scale,
            self.product / self.product_scale,
        )


def verify_identities(
    sys: SystemTriple, P, Q, n: int, tols: Tolerances | None = None
) -> IdentityReport:
    """Evaluate both sides of the transport identities and compare.

    Raises IdentityViolation when any residual exceeds the identity budget
    relative to its own scale; otherwise returns the report.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tols = resolve(tols)
    P = _as_psd(P, tols)
    Q = _as_psd(Q, tols)
    A, R, S = _triple(sys)
    D = P.values - Q.values
    eye = np.eye(sys.dim)

    _, E_p, _ = _backend.riccati_step(A, R, S, P.values)
    _, E_q, F_q = _backend.riccati_step(A, R, S, Q.values)
    rhs1 = E_p @ (eye + D @ F_q)
    res1 = spectral_norm(E_q - rhs1)
    scale1 = scale_of(E_q, rhs1)

    Pn_p, En_p, _ = _backend.riccati_final(A, R, S, P.values, n)
    Pn_q, En_q, Gn_q = _backend.riccati_final(A, R, S, Q.values, n)
    lhs2 = Pn_p - Pn_q
    rhs2 = En_p @ D @ En_q.T
    res2 = spectral_norm(lhs2 - rhs2)
    scale2 = scale_of(lhs2, rhs2)

    rhs3 = En_p @ (eye + D @ Gn_q)
    res3 = spectral_norm(En_q - rhs3)
    scale3 = scale_of(En_q, rhs3)

    report = IdentityReport(
        n=n,
        one_step=res1, one_step_scale=scale1,
        difference=res2, difference_scale=scale2,
        product=res3, product_scale=scale3,
    )
    budget = tols.identity
    for name, res, scale in (
        ("one-step factor identity", res1, scale1),
        ("semigroup difference identity", res2, scale2),
        ("product transport identity", res3, scale3),
    ):
        if res > budget * scale:
            raise IdentityViolation(
                f"{name} failed at n={n}: budget {budget:.1e} * {scale:.3e}", res
            )
    return report
