"""Fixed points of the map and everything assembled from them.

The monotone iteration from zero converges to the unique positive definite
fixed point; the dual system gives the dual fixed point.  From the pair we
assemble the closed-loop matrices E and Ehat (certified stable), the weight
F, and H, which solves the Lyapunov equation H = E'HE + F and is also
computable by plain series summation.  The two routes are kept independent
so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .config import Tolerances, fixed_point_tol, resolve
from .errors import (
    Divergence,
    IdentityViolation,
    NoConvergence,
    SingularA,
    SpectralCertificateFailure,
)
from .matrices import (
    PdMatrix,
    PsdMatrix,
    SymmetricMatrix,
    _as_psd,
    as_matrix,
    lu_min_pivot,
    scale_of,
    spectral_norm,
    spectral_radius,
    symmetrize,
)
from .riccati import map_E, map_F, parallel_add
from .systems import SystemTriple, dual, require_certified

__all__ = [
    "FixedPointPair",
    "solve_fixed_point",
    "lyapunov_solve_series",
    "lyapunov_solve_dual",
    "limit_gramian",
    "negative_fixed_point",
]

_LYAPUNOV_TERM_CAP = 100_000
_DIVERGENCE_WINDOW = 20


@dataclass(frozen=True, eq=False)
class FixedPointPair:
    """Primal and dual fixed points with their closed-loop data.

    ``iterations`` is the larger of the primal and dual iteration counts;
    ``residual`` the larger of the two fixed-point residuals (spectral norm
    of one further map application minus the point).
    """

    sys: SystemTriple
    Pinf: PdMatrix
    Phat_inf: PdMatrix
    E: np.ndarray
    Ehat: np.ndarray
    F: PsdMatrix
    H: PdMatrix
    rho_E: float
    rho_Ehat: float
    iterations: int
    residual: float

    def __post_init__(self):
        self.E.setflags(write=False)
        self.Ehat.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.sys.dim


def _converge(sys: SystemTriple, P0: np.ndarray, tol: float, max_iter: int):
    """Iterate to the fixed point and certify the residual at the returned
    point, spending leftover iteration budget on polish steps if needed."""
    A, R, S = sys.A, sys.R.values, sys.S.values
    P, it, diff = _backend.fixed_point(A, R, S, P0, tol, max_iter)
    if diff > tol * scale_of(P):
        raise NoConvergence(max_iter, P, diff)
    while True:
        P_next, _, _ = _backend.riccati_step(A, R, S, P)
        residual = spectral_norm(P_next - P)
        if residual <= tol * scale_of(P):
            return P, it, residual
        if it >= max_iter:
            raise NoConvergence(max_iter, P, residual)
        P = P_next
        it += 1


def solve_fixed_point(
    sys: SystemTriple,
    tol: float | None = None,
    max_iter: int = 100_000,
    P0=None,
    tols: Tolerances | None = None,
) -> FixedPointPair:
    """Fixed points of the map and its dual by monotone iteration from zero.

    The start defaults to zero, from which the iterates increase; any PSD
    start converges and ``P0`` is exposed for uniqueness probes.  After both
    solves the closed-loop spectral radii are certified < 1.
    """
    require_certified(sys, tols)
    tol = fixed_point_tol(tol)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    start = np.zeros((sys.dim, sys.dim)) if P0 is None else _as_psd(P0, tols).values

    P_val, it_p, res_p = _converge(sys, start, tol, max_iter)
    dual_sys = dual(sys)
    Phat_val, it_d, res_d = _converge(dual_sys, start, tol, max_iter)

    Pinf = PdMatrix.from_array(symmetrize(P_val), tols)
    Phat_inf = PdMatrix.from_array(symmetrize(Phat_val), tols)

    E = map_E(sys, Pinf, tols)
    Ehat = map_E(dual_sys, Phat_inf, tols)
    F = map_F(sys, Pinf, tols)
    rho_E = spectral_radius(E)
    rho_Ehat = spectral_radius(Ehat)
    if rho_E >= 1.0:
        raise SpectralCertificateFailure(rho_E, which="E")
    if rho_Ehat >= 1.0:
        raise SpectralCertificateFailure(rho_Ehat, which="Ehat")
    H = parallel_add(Pinf, Phat_inf, tols)

    return FixedPointPair(
        sys=sys,
        Pinf=Pinf,
        Phat_inf=Phat_inf,
        E=E,
        Ehat=Ehat,
        F=F,
        H=H,
        rho_E=rho_E,
        rho_Ehat=rho_Ehat,
        iterations=max(it_p, it_d),
        residual=max(res_p, res_d),
    )


def lyapunov_solve_series(
    E,
    F,
    tol: float | None = None,
    max_terms: int = _LYAPUNOV_TERM_CAP,
    tols: Tolerances | None = None,
) -> PsdMatrix:
    """Sum of E'^k F E^k, truncated when the term norm drops below tol.

    Requires a stable E; divergence is detected from the term norms growing
    over a sliding window rather than from an up-front eigenvalue solve.
    """
    E = as_matrix(E)
    F = _as_psd(F, tols)
    if tol is None:
        tol = 1e-13 * scale_of(F.values)
    X, terms, status, last_term = _backend.lyapunov_series(
        E, F.values, tol, max_terms, _DIVERGENCE_WINDOW
    )
    if status == 2:
        raise Divergence(
            f"series terms grew over {_DIVERGENCE_WINDOW} consecutive steps "
            f"(term norm {last_term:.3e} after {terms} terms): "
            "spectral radius >= 1 suspected"
        )
    if status == 1:
        raise NoConvergence(max_terms, X, last_term)
    return PsdMatrix.from_array(X, tols, clamp=True)


def lyapunov_solve_dual(sys: SystemTriple, tols: Tolerances | None = None) -> PdMatrix:
    """H = (Pinf + Phat_inf^{-1})^{-1}: the Lyapunov solution obtained from
    the two Riccati fixed points instead of series summation."""
    return solve_fixed_point(sys, tols=tols).H


def limit_gramian(fp: FixedPointPair, n: int, tols: Tolerances | None = None) -> PsdMatrix:
    """G_n = H - E'^n H E^n, the n-step Gramian at the fixed point."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    En = np.linalg.matrix_power(fp.E, n)
    G = fp.H.values - En.T @ fp.H.values @ En
    return PsdMatrix.from_array(symmetrize(G), tols, clamp=True)


def negative_fixed_point(sys: SystemTriple, tols: Tolerances | None = None) -> SymmetricMatrix:
    """The negative definite fixed point -Phat_inf^{-1} of the extended map.

    Requires invertible A.  The result is certified to lie strictly between
    -S^{-1} (when S is PD) and 0, and to satisfy the extended-map equation
    A(P^{-1}+S)^{-1}A' + R = P to the identity budget.
    """
    tols = resolve(tols)
    require_certified(sys, tols)
    pivot = lu_min_pivot(sys.A)
    if pivot <= 1e-12 * spectral_norm(sys.A):
        raise SingularA(
            f"smallest LU pivot {pivot:.3e} below 1e-12 * ||A||; "
            "the negative fixed point needs invertible A"
        )
    fp = solve_fixed_point(sys, tols=tols)
    Phat = fp.Phat_inf.values
    r = sys.dim
    P_neg = symmetrize(-np.linalg.solve(Phat, np.eye(r)))

    w_neg = np.linalg.eigvalsh(P_neg)
    if w_neg[-1] >= 0.0:
        raise IdentityViolation(
            "negative fixed point is not negative definite", float(w_neg[-1])
        )
    if sys.S.min_eig > tols.pd * scale_of(sys.S.values):
        S_inv = np.linalg.solve(sys.S.values, np.eye(r))
        gap = np.linalg.eigvalsh(symmetrize(P_neg + S_inv))
        if gap[0] <= 0.0:
            raise IdentityViolation(
                "negative fixed point does not dominate -S^{-1}", float(gap[0])
            )

    # extended-map residual: P^{-1} = -Phat_inf, so (P^{-1}+S) = S - Phat_inf
    core = np.linalg.solve(symmetrize(sys.S.values - Phat), sys.A.T)
    residual = spectral_norm(symmetrize(sys.A @ core + sys.R.values) - P_neg)
    if residual > tols.identity * scale_of(P_neg):
        raise IdentityViolation("extended-map residual exceeds budget", residual)
    return SymmetricMatrix(P_neg)
